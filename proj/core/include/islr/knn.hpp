#pragma once

// k-Nearest-Neighbours pose classifier with interchangeable brute-force
// and KD-tree backends.  Both backends return bit-identical answers:
// neighbors are ordered by (squared distance, insertion index).

#include <filesystem>
#include <string>
#include <vector>

#include "islr/grid_features.hpp"

namespace islr {

enum class KnnBackend { Brute, KdTree };

std::string to_string(KnnBackend b);
KnnBackend knn_backend_from_string(const std::string& s);

struct Classification {
    std::string label;
    int votes = 0;
    double mean_distance = 0.0;
};

class KnnModel {
public:
    // Throws on empty sample set, k out of range, or dimension mismatch.
    static KnnModel fit(std::vector<LabeledSample> samples, int k, KnnBackend backend);

    // Majority label among the k nearest by Euclidean distance.
    // Tie-breaking: distance ties by insertion index; vote ties by
    // smaller mean distance, then lexicographic label.
    Classification classify(const FeatureVector& query) const;

    // k nearest as (squared distance, insertion index), best first.
    std::vector<std::pair<double, int>> k_nearest(const FeatureVector& query) const;

    int k() const { return k_; }
    KnnBackend backend() const { return backend_; }
    GridSpec grid() const { return grid_; }
    const std::vector<LabeledSample>& samples() const { return samples_; }

    // Text model file: `KNN v1 k=<k> grid=<M>x<N> backend=<b>`, then one
    // line per sample with features at 9 significant digits.
    void save(const std::filesystem::path& path) const;
    static KnnModel load(const std::filesystem::path& path);

private:
    struct KdNode {
        int dim = -1;        // split dimension, -1 for leaf
        double split = 0.0;  // splitting coordinate
        int point = -1;      // sample index stored at this node
        int left = -1;
        int right = -1;
        int begin = 0;  // leaf: range into order_
        int end = 0;
    };

    KnnModel() = default;
    void build_tree();
    int build_node(int begin, int end, int depth);
    void search_node(int node, const std::vector<double>& q,
                     std::vector<std::pair<double, int>>& heap) const;
    double squared_distance(int sample, const std::vector<double>& q) const;

    int k_ = 5;
    KnnBackend backend_ = KnnBackend::KdTree;
    GridSpec grid_;
    std::vector<LabeledSample> samples_;
    std::vector<KdNode> nodes_;
    std::vector<int> order_;
    int root_ = -1;
};

}  // namespace islr
