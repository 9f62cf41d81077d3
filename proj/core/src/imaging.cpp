#include "islr/imaging.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace islr {

Frame Frame::solid(int w, int h, Rgb color) {
    Frame f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) f.set(x, y, color);
    return f;
}

namespace {

std::uint8_t quantize(double v) {
    const double r = std::floor(v + 0.5);  // round half-up
    if (r < 0.0) return 0;
    if (r > 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

}  // namespace

YuvPixel rgb_to_yuv(Rgb p) {
    const double r = p.r, g = p.g, b = p.b;
    return YuvPixel{
        quantize(0.299 * r + 0.587 * g + 0.114 * b),
        quantize(-0.147 * r - 0.289 * g + 0.436 * b + 128.0),
        quantize(0.615 * r - 0.515 * g - 0.100 * b + 128.0),
    };
}

bool is_skin(Rgb p) {
    const YuvPixel yuv = rgb_to_yuv(p);
    const int u = yuv.u, v = yuv.v;
    const int r = p.r, g = p.g, b = p.b;
    return 80 < u && u < 130 && 136 < v && v < 200 && v > u && r > 80 &&
           g > 30 && b > 15 && std::abs(r - g) > 15;
}

std::size_t BinaryMask::count_true() const {
    return std::accumulate(bits.begin(), bits.end(), std::size_t{0});
}

BinaryMask segment_skin(const Frame& f) {
    BinaryMask m(f.width, f.height);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x)
            if (is_skin(f.at(x, y))) m.set(x, y, true);
    return m;
}

StructuringElement StructuringElement::square(int radius) {
    if (radius < 1) throw std::invalid_argument("structuring element radius must be >= 1");
    return StructuringElement{radius};
}

BinaryMask erode(const BinaryMask& m, const StructuringElement& se) {
    const int r = se.radius;
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (int dy = -r; all && dy <= r; ++dy) {
                const int ny = y + dy;
                if (ny < 0 || ny >= m.height) {
                    all = false;
                    break;
                }
                for (int dx = -r; dx <= r; ++dx) {
                    const int nx = x + dx;
                    if (nx < 0 || nx >= m.width || !m.get(nx, ny)) {
                        all = false;
                        break;
                    }
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

BinaryMask dilate(const BinaryMask& m, const StructuringElement& se) {
    const int r = se.radius;
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            bool any = false;
            for (int dy = -r; !any && dy <= r; ++dy) {
                const int ny = y + dy;
                if (ny < 0 || ny >= m.height) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    const int nx = x + dx;
                    if (nx >= 0 && nx < m.width && m.get(nx, ny)) {
                        any = true;
                        break;
                    }
                }
            }
            out.set(x, y, any);
        }
    }
    return out;
}

BinaryMask morph_open(const BinaryMask& m, const StructuringElement& se) {
    return dilate(erode(m, se), se);
}

BinaryMask morph_close(const BinaryMask& m, const StructuringElement& se) {
    return erode(dilate(m, se), se);
}

std::vector<Blob> connected_components(const BinaryMask& m) {
    const int w = m.width, h = m.height;
    std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<Blob> blobs;
    std::vector<std::int32_t> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int32_t start = y * w + x;
            if (!m.bits[start] || label[start] >= 0) continue;

            const std::int32_t id = static_cast<std::int32_t>(blobs.size());
            Blob blob;
            blob.stride = w;
            blob.bbox = IRect{x, y, x, y};
            double sx = 0.0, sy = 0.0;

            label[start] = id;
            stack.push_back(start);
            while (!stack.empty()) {
                const std::int32_t p = stack.back();
                stack.pop_back();
                const int px = p % w, py = p / w;

                blob.pixels.push_back(p);
                blob.bbox.x_min = std::min(blob.bbox.x_min, px);
                blob.bbox.x_max = std::max(blob.bbox.x_max, px);
                blob.bbox.y_min = std::min(blob.bbox.y_min, py);
                blob.bbox.y_max = std::max(blob.bbox.y_max, py);
                sx += px;
                sy += py;

                for (int dy = -1; dy <= 1; ++dy) {
                    const int ny = py + dy;
                    if (ny < 0 || ny >= h) continue;
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx;
                        if (nx < 0 || nx >= w) continue;
                        const std::int32_t q = ny * w + nx;
                        if (m.bits[q] && label[q] < 0) {
                            label[q] = id;
                            stack.push_back(q);
                        }
                    }
                }
            }

            blob.area = static_cast<std::int64_t>(blob.pixels.size());
            blob.centroid = Vec2{sx / blob.area, sy / blob.area};
            std::sort(blob.pixels.begin(), blob.pixels.end());
            blobs.push_back(std::move(blob));
        }
    }
    return blobs;
}

}  // namespace islr
