#include "islr/face.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace islr {

GrayImage luminance(const Frame& f) {
    GrayImage g(f.width, f.height);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x)
            g.set(x, y, static_cast<float>(rgb_to_yuv(f.at(x, y)).y));
    return g;
}

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
    GrayImage out(out_w, out_h);
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double top = img.at(x0, y0) * (1 - wx) + img.at(x1, y0) * wx;
            const double bot = img.at(x0, y1) * (1 - wx) + img.at(x1, y1) * wx;
            out.set(x, y, static_cast<float>(top * (1 - wy) + bot * wy));
        }
    }
    return out;
}

int hog_descriptor_length(int window_w, int window_h, const HogParams& p) {
    const int cx = window_w / p.cell_size;
    const int cy = window_h / p.cell_size;
    const int bx = cx - p.block_cells + 1;
    const int by = cy - p.block_cells + 1;
    if (bx < 1 || by < 1) return 0;
    return bx * by * p.block_cells * p.block_cells * p.bins;
}

HogDescriptor hog_descriptor(const GrayImage& gray, const IRect& window,
                             const HogParams& params) {
    if (window.x_min < 0 || window.y_min < 0 || window.x_max >= gray.width ||
        window.y_max >= gray.height)
        throw std::invalid_argument("hog: window outside raster");
    const int w = window.width();
    const int h = window.height();
    if (w % params.cell_size != 0 || h % params.cell_size != 0)
        throw std::invalid_argument("hog: window not divisible by cell size");

    const int cells_x = w / params.cell_size;
    const int cells_y = h / params.cell_size;
    std::vector<float> hist(static_cast<std::size_t>(cells_x) * cells_y * params.bins, 0.f);

    // Gradients are taken within the window with clamp-to-edge sampling.
    auto sample = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return gray.at(window.x_min + x, window.y_min + y);
    };
    const double bin_width = 180.0 / params.bins;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = sample(x + 1, y) - sample(x - 1, y);
            const double gy = sample(x, y + 1) - sample(x, y - 1);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            if (angle < 0) angle += 180.0;
            if (angle >= 180.0) angle -= 180.0;
            // Bin anchors sit at multiples of bin_width; mass splits
            // linearly between the two enclosing bins (mod wraparound).
            const double pos = angle / bin_width;
            int b0 = static_cast<int>(pos);
            const double frac = pos - b0;
            b0 %= params.bins;
            const int b1 = (b0 + 1) % params.bins;
            const int cell = (y / params.cell_size) * cells_x + (x / params.cell_size);
            hist[cell * params.bins + b0] += static_cast<float>(mag * (1.0 - frac));
            hist[cell * params.bins + b1] += static_cast<float>(mag * frac);
        }
    }

    HogDescriptor d;
    d.params = params;
    d.cells_x = cells_x;
    d.cells_y = cells_y;
    const int bc = params.block_cells;
    const int blocks_x = cells_x - bc + 1;
    const int blocks_y = cells_y - bc + 1;
    if (blocks_x < 1 || blocks_y < 1) return d;
    d.values.reserve(static_cast<std::size_t>(blocks_x) * blocks_y * bc * bc * params.bins);
    std::vector<float> block(static_cast<std::size_t>(bc) * bc * params.bins);
    for (int by = 0; by < blocks_y; ++by) {
        for (int bx = 0; bx < blocks_x; ++bx) {
            std::size_t n = 0;
            double norm2 = 0.0;
            for (int cy = 0; cy < bc; ++cy) {
                for (int cx = 0; cx < bc; ++cx) {
                    const int cell = (by + cy) * cells_x + (bx + cx);
                    for (int k = 0; k < params.bins; ++k) {
                        const float v = hist[cell * params.bins + k];
                        block[n++] = v;
                        norm2 += static_cast<double>(v) * v;
                    }
                }
            }
            const double inv =
                1.0 / std::sqrt(norm2 + static_cast<double>(params.epsilon) * params.epsilon);
            for (std::size_t i = 0; i < n; ++i)
                d.values.push_back(static_cast<float>(block[i] * inv));
        }
    }
    return d;
}

LinearFaceModel LinearFaceModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    LinearFaceModel m;
    if (!(in >> m.window_w >> m.window_h >> m.threshold >> m.bias))
        throw std::runtime_error(path.string() + ": malformed face model header");
    double w = 0.0;
    while (in >> w) m.weights.push_back(w);
    const int expect = hog_descriptor_length(m.window_w, m.window_h);
    if (static_cast<int>(m.weights.size()) != expect)
        throw std::runtime_error(path.string() + ": expected " + std::to_string(expect) +
                                 " weights, got " + std::to_string(m.weights.size()));
    return m;
}

void LinearFaceModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << window_w << " " << window_h << "\n" << threshold << "\n" << bias << "\n";
    char buf[32];
    for (const double w : weights) {
        std::snprintf(buf, sizeof(buf), "%.9g", w);
        out << buf << "\n";
    }
}

namespace {

constexpr double kPyramidScale = 1.25;
constexpr int kWindowStride = 8;

double score_window(const GrayImage& gray, const IRect& window,
                    const LinearFaceModel& model) {
    const HogDescriptor d = hog_descriptor(gray, window);
    double s = model.bias;
    for (std::size_t i = 0; i < d.values.size(); ++i) s += model.weights[i] * d.values[i];
    return s;
}

}  // namespace

std::optional<FaceBox> detect_face(const Frame& f, const LinearFaceModel& model) {
    if (model.window_w < 1 || model.window_h < 1 ||
        static_cast<int>(model.weights.size()) !=
            hog_descriptor_length(model.window_w, model.window_h))
        throw std::invalid_argument("detect_face: model dimensions inconsistent");

    GrayImage level = luminance(f);
    double scale = 1.0;
    std::optional<FaceBox> best;
    while (level.width >= model.window_w && level.height >= model.window_h) {
        for (int y = 0; y + model.window_h <= level.height; y += kWindowStride) {
            for (int x = 0; x + model.window_w <= level.width; x += kWindowStride) {
                const IRect win{x, y, x + model.window_w - 1, y + model.window_h - 1};
                const double s = score_window(level, win, model);
                if (s <= model.threshold) continue;
                if (best && s <= best->score) continue;
                IRect mapped{
                    static_cast<int>(std::lround(x * scale)),
                    static_cast<int>(std::lround(y * scale)),
                    static_cast<int>(std::lround((x + model.window_w) * scale)) - 1,
                    static_cast<int>(std::lround((y + model.window_h) * scale)) - 1,
                };
                best = FaceBox{mapped.clamped(f.width, f.height), s};
            }
        }
        scale *= kPyramidScale;
        const int nw = static_cast<int>(f.width / scale);
        const int nh = static_cast<int>(f.height / scale);
        if (nw < model.window_w || nh < model.window_h) break;
        level = resize_bilinear(luminance(f), nw, nh);
    }
    return best;
}

IRect expand_face_region(const IRect& box, int frame_w, int frame_h,
                         double width_scale, double height_scale) {
    const double cx = (box.x_min + box.x_max) / 2.0;
    const double half_w = width_scale * box.width() / 2.0;
    IRect r;
    r.x_min = static_cast<int>(std::ceil(cx - half_w));
    r.x_max = static_cast<int>(std::floor(cx + half_w));
    r.y_min = box.y_min;
    r.y_max = static_cast<int>(std::floor(box.y_min + height_scale * box.height() - 1));
    return r.clamped(frame_w, frame_h);
}

Frame eliminate_face(const Frame& f, const IRect& box, double width_scale,
                     double height_scale) {
    const IRect r = expand_face_region(box, f.width, f.height, width_scale, height_scale);
    Frame out = f;
    for (int y = r.y_min; y <= r.y_max; ++y)
        for (int x = r.x_min; x <= r.x_max; ++x) out.set(x, y, Rgb{0, 0, 0});
    return out;
}

AnnotationFaceProvider::AnnotationFaceProvider(const std::filesystem::path& sidecar) {
    std::ifstream in(sidecar);
    if (!in) throw std::runtime_error(sidecar.string() + ": cannot open");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int idx = 0;
        IRect box;
        std::string extra;
        if (!(ls >> idx >> box.x_min >> box.y_min >> box.x_max >> box.y_max) ||
            (ls >> extra) || box.x_min > box.x_max || box.y_min > box.y_max)
            throw std::runtime_error(sidecar.string() + ":" + std::to_string(lineno) +
                                     ": malformed face annotation");
        boxes_[idx] = box;
    }
}

std::optional<FaceBox> AnnotationFaceProvider::face_for(int frame_index, const Frame& f) {
    const auto it = boxes_.find(frame_index);
    if (it == boxes_.end()) return std::nullopt;
    return FaceBox{it->second.clamped(f.width, f.height), 1.0};
}

std::optional<FaceBox> HeuristicFaceProvider::face_for(int frame_index, const Frame& f) {
    const BinaryMask mask = segment_skin(f);
    const double min_area = min_area_fraction_ * f.pixel_count();
    std::optional<FaceBox> top;
    for (const Blob& blob : connected_components(mask)) {
        const double aspect = static_cast<double>(blob.bbox.width()) / blob.bbox.height();
        if (aspect < aspect_lo_ || aspect > aspect_hi_) continue;
        if (static_cast<double>(blob.area) < min_area) continue;
        if (!top || blob.bbox.y_min < top->box.y_min)
            top = FaceBox{blob.bbox, static_cast<double>(blob.area)};
    }
    return top;
}

std::optional<FaceBox> HogFaceProvider::face_for(int frame_index, const Frame& f) {
    return detect_face(f, model_);
}

}  // namespace islr
