#pragma once

// Raster primitives: RGB frames, YUV conversion, skin segmentation,
// binary morphology and connected-component analysis.

#include <cstdint>
#include <vector>

#include "islr/geometry.hpp"

namespace islr {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

// 8-bit RGB raster, row-major, origin top-left.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 3 bytes per pixel

    Frame() = default;
    Frame(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    static Frame solid(int w, int h, Rgb color);

    std::size_t index(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * 3;
    }
    Rgb at(int x, int y) const {
        const std::size_t i = index(x, y);
        return Rgb{data[i], data[i + 1], data[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const std::size_t i = index(x, y);
        data[i] = c.r;
        data[i + 1] = c.g;
        data[i + 2] = c.b;
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    bool operator==(const Frame&) const = default;
};

struct YuvPixel {
    std::uint8_t y = 0;
    std::uint8_t u = 0;
    std::uint8_t v = 0;

    bool operator==(const YuvPixel&) const = default;
};

// Y = 0.299R + 0.587G + 0.114B
// U = -0.147R - 0.289G + 0.436B + 128
// V = 0.615R - 0.515G - 0.100B + 128
// each rounded half-up, then clamped to [0,255].
YuvPixel rgb_to_yuv(Rgb p);

// Skin rule, all clauses strict:
//   80 < U < 130, 136 < V < 200, V > U,
//   R > 80, G > 30, B > 15, |R-G| > 15.
bool is_skin(Rgb p);

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    bool get(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count_true() const;

    bool operator==(const BinaryMask&) const = default;
};

BinaryMask segment_skin(const Frame& f);

// Square structuring element, side 2*radius+1, anchored at center.
struct StructuringElement {
    int radius = 1;

    static StructuringElement square(int radius);
};

// Out-of-bounds neighbors count as false for erode and contribute
// nothing for dilate.
BinaryMask erode(const BinaryMask& m, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& m, const StructuringElement& se);
BinaryMask morph_open(const BinaryMask& m, const StructuringElement& se);
BinaryMask morph_close(const BinaryMask& m, const StructuringElement& se);

// One 8-connected component of a mask.  `pixels` holds row-major linear
// indices of the member pixels (x = p % stride, y = p / stride), sorted
// ascending; `stride` is the source mask width.
struct Blob {
    std::int64_t area = 0;
    IRect bbox;
    Vec2 centroid;
    int stride = 0;
    std::vector<std::int32_t> pixels;
};

std::vector<Blob> connected_components(const BinaryMask& m);

}  // namespace islr
