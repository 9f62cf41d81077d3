#pragma once

// Grid-occupancy features: the hand blob's tight bounding box is split
// into an MxN grid and each block contributes the fraction of its
// pixels covered by the blob.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "islr/imaging.hpp"

namespace islr {

struct GridSpec {
    int rows = 10;
    int cols = 10;

    int cells() const { return rows * cols; }
    bool operator==(const GridSpec&) const = default;
};

struct FeatureVector {
    GridSpec grid;
    std::vector<double> values;  // row-major over grid blocks, each in [0,1]
};

// Integer per-block tallies, exposed so mass conservation can be checked
// exactly: sum of `hand` equals the blob area.
struct GridCounts {
    std::vector<std::int64_t> hand;   // blob pixels inside each block
    std::vector<std::int64_t> block;  // total pixels of each block
};

GridCounts grid_block_counts(const Blob& hand, GridSpec grid);

// Blocks partition the bbox via floor boundaries (column c spans
// [floor(c*W/N), floor((c+1)*W/N))); zero-size blocks yield 0.
FeatureVector extract_features(const Blob& hand, GridSpec grid);

// Euclidean distance; throws std::invalid_argument on grid mismatch.
double feature_distance(const FeatureVector& a, const FeatureVector& b);

struct LabeledSample {
    std::string label;
    FeatureVector features;
};

// CSV with header `label,f0,...,f{MN-1}`, one row per sample.
void write_features_csv(std::ostream& out, std::span<const LabeledSample> samples);

}  // namespace islr
