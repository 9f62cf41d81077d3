#pragma once

// Camera-shake cancellation: every frame is shifted so the tracked face
// stays at the reference position captured at segment start.

#include <optional>

#include "islr/face.hpp"

namespace islr {

struct StabilizerState {
    std::optional<Vec2> reference;  // set once per gesture segment
    std::optional<Vec2> last;       // most recent face center seen
    bool disabled = false;          // no face on the segment's first frame

    void reset() { *this = StabilizerState{}; }
};

struct StabilizeResult {
    Frame frame;
    int shift_x = 0;
    int shift_y = 0;
    bool active = false;  // false while stabilization is disabled
};

// Integer-pixel translation with revealed borders filled black.
Frame translate_frame(const Frame& f, int dx, int dy);

// shift = reference - current face center, rounded to whole pixels.
// With no face this frame the previous shift carries over; with no face
// on the segment's first frame the segment runs unstabilized.
StabilizeResult stabilize(const Frame& f, const std::optional<FaceBox>& face,
                          StabilizerState& state);

}  // namespace islr
