#pragma once

#include <algorithm>
#include <cmath>

namespace islr {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Inclusive integer rectangle: x_max/y_max are the last pixels inside.
struct IRect {
    int x_min = 0;
    int y_min = 0;
    int x_max = -1;
    int y_max = -1;

    int width() const { return x_max - x_min + 1; }
    int height() const { return y_max - y_min + 1; }
    bool empty() const { return x_max < x_min || y_max < y_min; }

    bool contains(int x, int y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }

    IRect clamped(int frame_w, int frame_h) const {
        IRect r = *this;
        r.x_min = std::max(r.x_min, 0);
        r.y_min = std::max(r.y_min, 0);
        r.x_max = std::min(r.x_max, frame_w - 1);
        r.y_max = std::min(r.y_max, frame_h - 1);
        return r;
    }

    IRect translated(int dx, int dy) const {
        return IRect{x_min + dx, y_min + dy, x_max + dx, y_max + dy};
    }

    Vec2 center() const {
        return Vec2{(x_min + x_max) / 2.0, (y_min + y_max) / 2.0};
    }

    bool operator==(const IRect&) const = default;
};

}  // namespace islr
