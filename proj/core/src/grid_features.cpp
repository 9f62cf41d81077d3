#include "islr/grid_features.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace islr {

namespace {

// Lookup table mapping an offset u in [0,extent) to its block index
// under the floor partition boundaries floor(c*extent/n).
std::vector<int> block_lookup(int extent, int n) {
    std::vector<int> lut(extent, 0);
    for (int c = 0; c < n; ++c) {
        const int lo = static_cast<int>(static_cast<std::int64_t>(c) * extent / n);
        const int hi = static_cast<int>(static_cast<std::int64_t>(c + 1) * extent / n);
        for (int u = lo; u < hi; ++u) lut[u] = c;
    }
    return lut;
}

}  // namespace

GridCounts grid_block_counts(const Blob& hand, GridSpec grid) {
    if (hand.area < 1) throw std::invalid_argument("blob must have area >= 1");
    if (hand.stride < 1) throw std::invalid_argument("blob stride unset");
    const int w = hand.bbox.width();
    const int h = hand.bbox.height();
    const int n = grid.cells();

    GridCounts counts;
    counts.hand.assign(n, 0);
    counts.block.assign(n, 0);

    for (int r = 0; r < grid.rows; ++r) {
        const std::int64_t ry0 = static_cast<std::int64_t>(r) * h / grid.rows;
        const std::int64_t ry1 = static_cast<std::int64_t>(r + 1) * h / grid.rows;
        for (int c = 0; c < grid.cols; ++c) {
            const std::int64_t cx0 = static_cast<std::int64_t>(c) * w / grid.cols;
            const std::int64_t cx1 = static_cast<std::int64_t>(c + 1) * w / grid.cols;
            counts.block[r * grid.cols + c] = (ry1 - ry0) * (cx1 - cx0);
        }
    }

    const std::vector<int> col_of = block_lookup(w, grid.cols);
    const std::vector<int> row_of = block_lookup(h, grid.rows);
    for (const std::int32_t p : hand.pixels) {
        const int x = p % hand.stride - hand.bbox.x_min;
        const int y = p / hand.stride - hand.bbox.y_min;
        ++counts.hand[row_of[y] * grid.cols + col_of[x]];
    }
    return counts;
}

FeatureVector extract_features(const Blob& hand, GridSpec grid) {
    GridCounts counts = grid_block_counts(hand, grid);
    FeatureVector fv;
    fv.grid = grid;
    fv.values.assign(grid.cells(), 0.0);
    for (int i = 0; i < grid.cells(); ++i)
        if (counts.block[i] > 0)
            fv.values[i] = static_cast<double>(counts.hand[i]) / counts.block[i];
    return fv;
}

double feature_distance(const FeatureVector& a, const FeatureVector& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("feature vectors have mismatched grid specs");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void write_features_csv(std::ostream& out, std::span<const LabeledSample> samples) {
    if (samples.empty()) return;
    out << "label";
    for (int i = 0; i < samples[0].features.grid.cells(); ++i) out << ",f" << i;
    out << "\n";
    char buf[32];
    for (const auto& s : samples) {
        out << s.label;
        for (const double v : s.features.values) {
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace islr
