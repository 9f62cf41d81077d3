#include "islr/stabilizer.hpp"

#include <cmath>
#include <cstring>

namespace islr {

Frame translate_frame(const Frame& f, int dx, int dy) {
    if (dx == 0 && dy == 0) return f;
    Frame out(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        const int sy = y - dy;
        if (sy < 0 || sy >= f.height) continue;
        const int x_begin = std::max(0, dx);
        const int x_end = std::min(f.width, f.width + dx);
        if (x_begin >= x_end) continue;
        const std::size_t dst = out.index(x_begin, y);
        const std::size_t src = f.index(x_begin - dx, sy);
        std::memcpy(&out.data[dst], &f.data[src],
                    static_cast<std::size_t>(x_end - x_begin) * 3);
    }
    return out;
}

StabilizeResult stabilize(const Frame& f, const std::optional<FaceBox>& face,
                          StabilizerState& state) {
    if (state.disabled) return {f, 0, 0, false};

    if (!state.reference) {
        if (!face) {
            state.disabled = true;
            return {f, 0, 0, false};
        }
        state.reference = face->box.center();
        state.last = *state.reference;
        return {f, 0, 0, true};
    }

    if (face) state.last = face->box.center();
    const int dx = static_cast<int>(std::lround(state.reference->x - state.last->x));
    const int dy = static_cast<int>(std::lround(state.reference->y - state.last->y));
    return {translate_frame(f, dx, dy), dx, dy, true};
}

}  // namespace islr
