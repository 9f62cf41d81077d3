#pragma once

// Hand blob extraction and centroid-motion quantization with the
// 20px/7px hysteresis circle.

#include <optional>
#include <string>

#include "islr/imaging.hpp"

namespace islr {

enum class Direction { Up = 0, Right = 1, Left = 2, Down = 3 };

enum class MotionEvent { None, Up, Right, Left, Down, HandAbsent };

std::string to_string(Direction d);
std::string to_string(MotionEvent e);
std::optional<Direction> direction_of(MotionEvent e);
MotionEvent to_motion_event(Direction d);
Direction direction_from_string(const std::string& s);  // throws on unknown

// Largest-area component of the mask, or nullopt if below min_area.
std::optional<Blob> extract_hand(const BinaryMask& mask, std::int64_t min_area);

// Slope-based direction of a supra-threshold centroid shift, with
// dx = prev.x - curr.x and dy = prev.y - curr.y in image coordinates:
// |dy| >= |dx| picks Up (dy > 0) or Down, otherwise Left (dx > 0) or Right.
Direction quantize_motion(const Vec2& prev_anchor, const Vec2& curr);

struct TrackerState {
    std::optional<Vec2> anchor;  // comparison centroid; not updated on noise
    bool moving = false;
    double rest_radius = 20.0;
    double move_radius = 7.0;

    double radius() const { return moving ? move_radius : rest_radius; }
    void reset() {
        anchor.reset();
        moving = false;
    }
};

// One event per frame.  Sub-threshold shifts leave the anchor in place
// and restore the rest radius; detected motion moves the anchor and
// tightens the radius to move_radius.
MotionEvent track(TrackerState& state, const std::optional<Blob>& hand);

}  // namespace islr
