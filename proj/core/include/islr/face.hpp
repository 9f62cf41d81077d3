#pragma once

// Face detection (HOG + linear scoring over a sliding-window pyramid),
// interchangeable face providers, and face-neck elimination.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "islr/imaging.hpp"

namespace islr {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> v;

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), v(static_cast<std::size_t>(w) * h, 0.f) {}

    float at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, float val) { v[static_cast<std::size_t>(y) * width + x] = val; }
};

// Y channel of the RGB->YUV conversion.
GrayImage luminance(const Frame& f);

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h);

struct FaceBox {
    IRect box;
    double score = 0.0;
};

struct HogParams {
    int cell_size = 8;
    int block_cells = 2;  // 2x2 cells per block, stride one cell
    int bins = 9;         // unsigned gradients over [0, 180)
    float epsilon = 1e-5f;
};

struct HogDescriptor {
    HogParams params;
    int cells_x = 0;
    int cells_y = 0;
    std::vector<float> values;  // concatenated L2-normalized blocks
};

int hog_descriptor_length(int window_w, int window_h, const HogParams& p = {});

// Centered-difference gradients, magnitude-weighted 9-bin histograms with
// linear interpolation between adjacent orientation bins, 2x2-cell blocks
// at one-cell stride, L2 normalization with the stabilizing epsilon.
// Throws if the window is not divisible by the cell size.
HogDescriptor hog_descriptor(const GrayImage& gray, const IRect& window,
                             const HogParams& params = {});

struct LinearFaceModel {
    int window_w = 0;
    int window_h = 0;
    double bias = 0.0;
    double threshold = 0.0;
    std::vector<double> weights;

    // Text file: `<w> <h>`, then `<threshold>`, then `<bias>`, then one
    // weight per line.
    static LinearFaceModel load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

// Sliding window (stride 8) over a 1.25-per-level pyramid; best box
// scoring above model.threshold, mapped back to frame coordinates.
std::optional<FaceBox> detect_face(const Frame& f, const LinearFaceModel& model);

// Expansion applied before blackening: width scaled about center,
// height extended downward, clipped to the frame.
IRect expand_face_region(const IRect& box, int frame_w, int frame_h,
                         double width_scale = 1.2, double height_scale = 1.6);

Frame eliminate_face(const Frame& f, const IRect& box, double width_scale = 1.2,
                     double height_scale = 1.6);

class FaceProvider {
public:
    virtual ~FaceProvider() = default;
    virtual std::optional<FaceBox> face_for(int frame_index, const Frame& f) = 0;
};

// Sidecar file, one line per frame: `<frame_index> <x_min> <y_min> <x_max> <y_max>`.
class AnnotationFaceProvider : public FaceProvider {
public:
    explicit AnnotationFaceProvider(const std::filesystem::path& sidecar);
    explicit AnnotationFaceProvider(std::map<int, IRect> boxes) : boxes_(std::move(boxes)) {}

    std::optional<FaceBox> face_for(int frame_index, const Frame& f) override;

private:
    std::map<int, IRect> boxes_;
};

// Topmost skin blob whose bbox aspect ratio w/h lies in [0.6, 1.4] and
// whose area is at least 2% of the frame.
class HeuristicFaceProvider : public FaceProvider {
public:
    HeuristicFaceProvider(double aspect_lo = 0.6, double aspect_hi = 1.4,
                          double min_area_fraction = 0.02)
        : aspect_lo_(aspect_lo), aspect_hi_(aspect_hi), min_area_fraction_(min_area_fraction) {}

    std::optional<FaceBox> face_for(int frame_index, const Frame& f) override;

private:
    double aspect_lo_;
    double aspect_hi_;
    double min_area_fraction_;
};

class HogFaceProvider : public FaceProvider {
public:
    explicit HogFaceProvider(LinearFaceModel model) : model_(std::move(model)) {}

    std::optional<FaceBox> face_for(int frame_index, const Frame& f) override;

private:
    LinearFaceModel model_;
};

}  // namespace islr
