#include "islr/hand_tracker.hpp"

#include <cmath>
#include <stdexcept>

namespace islr {

std::string to_string(Direction d) {
    switch (d) {
        case Direction::Up: return "up";
        case Direction::Right: return "right";
        case Direction::Left: return "left";
        case Direction::Down: return "down";
    }
    return "?";
}

std::string to_string(MotionEvent e) {
    switch (e) {
        case MotionEvent::None: return "none";
        case MotionEvent::Up: return "up";
        case MotionEvent::Right: return "right";
        case MotionEvent::Left: return "left";
        case MotionEvent::Down: return "down";
        case MotionEvent::HandAbsent: return "absent";
    }
    return "?";
}

std::optional<Direction> direction_of(MotionEvent e) {
    switch (e) {
        case MotionEvent::Up: return Direction::Up;
        case MotionEvent::Right: return Direction::Right;
        case MotionEvent::Left: return Direction::Left;
        case MotionEvent::Down: return Direction::Down;
        default: return std::nullopt;
    }
}

MotionEvent to_motion_event(Direction d) {
    switch (d) {
        case Direction::Up: return MotionEvent::Up;
        case Direction::Right: return MotionEvent::Right;
        case Direction::Left: return MotionEvent::Left;
        case Direction::Down: return MotionEvent::Down;
    }
    return MotionEvent::None;
}

Direction direction_from_string(const std::string& s) {
    if (s == "up") return Direction::Up;
    if (s == "right") return Direction::Right;
    if (s == "left") return Direction::Left;
    if (s == "down") return Direction::Down;
    throw std::invalid_argument("unknown direction: " + s);
}

std::optional<Blob> extract_hand(const BinaryMask& mask, std::int64_t min_area) {
    std::optional<Blob> best;
    for (auto& blob : connected_components(mask)) {
        if (!best || blob.area > best->area) best = std::move(blob);
    }
    if (best && best->area < min_area) return std::nullopt;
    return best;
}

Direction quantize_motion(const Vec2& prev_anchor, const Vec2& curr) {
    const double dx = prev_anchor.x - curr.x;
    const double dy = prev_anchor.y - curr.y;
    if (std::abs(dy) >= std::abs(dx)) return dy > 0 ? Direction::Up : Direction::Down;
    return dx > 0 ? Direction::Left : Direction::Right;
}

MotionEvent track(TrackerState& state, const std::optional<Blob>& hand) {
    if (!hand) {
        state.reset();
        return MotionEvent::HandAbsent;
    }
    const Vec2 centroid = hand->centroid;
    if (!state.anchor) {
        state.anchor = centroid;
        state.moving = false;
        return MotionEvent::None;
    }
    const double d = distance(*state.anchor, centroid);
    if (d <= state.radius()) {
        // Noise: the comparison coordinate is deliberately not updated.
        state.moving = false;
        return MotionEvent::None;
    }
    const Direction dir = quantize_motion(*state.anchor, centroid);
    state.anchor = centroid;
    state.moving = true;
    return to_motion_event(dir);
}

}  // namespace islr
