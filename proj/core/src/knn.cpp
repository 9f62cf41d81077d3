#include "islr/knn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace islr {

namespace {

constexpr int kLeafSize = 8;

// Total order on neighbor candidates: closer first, insertion index
// breaks exact distance ties.
bool better(const std::pair<double, int>& a, const std::pair<double, int>& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
}

void push_candidate(std::vector<std::pair<double, int>>& heap, std::size_t k,
                    std::pair<double, int> cand) {
    if (heap.size() == k && !better(cand, heap.back())) return;
    auto pos = std::upper_bound(heap.begin(), heap.end(), cand, better);
    heap.insert(pos, cand);
    if (heap.size() > k) heap.pop_back();
}

}  // namespace

std::string to_string(KnnBackend b) {
    return b == KnnBackend::Brute ? "brute" : "kd_tree";
}

KnnBackend knn_backend_from_string(const std::string& s) {
    if (s == "brute") return KnnBackend::Brute;
    if (s == "kd_tree") return KnnBackend::KdTree;
    throw std::invalid_argument("unknown knn backend: " + s);
}

KnnModel KnnModel::fit(std::vector<LabeledSample> samples, int k, KnnBackend backend) {
    if (samples.empty()) throw std::invalid_argument("knn: empty sample set");
    if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
    if (k > static_cast<int>(samples.size()))
        throw std::invalid_argument("knn: k exceeds sample count");

    KnnModel m;
    m.grid_ = samples[0].features.grid;
    for (const auto& s : samples) {
        if (!(s.features.grid == m.grid_) ||
            s.features.values.size() != static_cast<std::size_t>(m.grid_.cells()))
            throw std::invalid_argument("knn: sample dimension mismatch");
    }
    m.k_ = k;
    m.backend_ = backend;
    m.samples_ = std::move(samples);
    if (backend == KnnBackend::KdTree) m.build_tree();
    return m;
}

double KnnModel::squared_distance(int sample, const std::vector<double>& q) const {
    const std::vector<double>& s = samples_[sample].features.values;
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double d = s[i] - q[i];
        acc += d * d;
    }
    return acc;
}

void KnnModel::build_tree() {
    order_.resize(samples_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    nodes_.clear();
    nodes_.reserve(2 * samples_.size() / kLeafSize + 4);
    root_ = build_node(0, static_cast<int>(order_.size()), 0);
}

int KnnModel::build_node(int begin, int end, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }
    const int dim = depth % grid_.cells();
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         const double va = samples_[a].features.values[dim];
                         const double vb = samples_[b].features.values[dim];
                         return va < vb || (va == vb && a < b);
                     });
    const int point = order_[mid];
    const double split = samples_[point].features.values[dim];
    const int left = build_node(begin, mid, depth + 1);
    const int right = build_node(mid + 1, end, depth + 1);
    nodes_[id].dim = dim;
    nodes_[id].split = split;
    nodes_[id].point = point;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void KnnModel::search_node(int node, const std::vector<double>& q,
                           std::vector<std::pair<double, int>>& heap) const {
    const KdNode& n = nodes_[node];
    const std::size_t k = static_cast<std::size_t>(k_);
    if (n.dim < 0) {
        for (int i = n.begin; i < n.end; ++i)
            push_candidate(heap, k, {squared_distance(order_[i], q), order_[i]});
        return;
    }
    push_candidate(heap, k, {squared_distance(n.point, q), n.point});

    const double delta = q[n.dim] - n.split;
    const int near = delta <= 0.0 ? n.left : n.right;
    const int far = delta <= 0.0 ? n.right : n.left;
    search_node(near, q, heap);
    // The far subtree can still hold an equal-distance, lower-index
    // neighbor, so prune only on a strictly larger plane distance.
    if (heap.size() < k || delta * delta <= heap.back().first)
        search_node(far, q, heap);
}

std::vector<std::pair<double, int>> KnnModel::k_nearest(const FeatureVector& query) const {
    if (!(query.grid == grid_) ||
        query.values.size() != static_cast<std::size_t>(grid_.cells()))
        throw std::invalid_argument("knn: query dimension mismatch");

    std::vector<std::pair<double, int>> heap;
    heap.reserve(k_ + 1);
    if (backend_ == KnnBackend::Brute) {
        for (std::size_t i = 0; i < samples_.size(); ++i)
            push_candidate(heap, static_cast<std::size_t>(k_),
                           {squared_distance(static_cast<int>(i), query.values),
                            static_cast<int>(i)});
    } else {
        search_node(root_, query.values, heap);
    }
    return heap;
}

Classification KnnModel::classify(const FeatureVector& query) const {
    const auto neighbors = k_nearest(query);

    struct Tally {
        int votes = 0;
        double dist_sum = 0.0;
    };
    std::map<std::string, Tally> tallies;
    for (const auto& [d2, idx] : neighbors) {
        Tally& t = tallies[samples_[idx].label];
        ++t.votes;
        t.dist_sum += std::sqrt(d2);
    }

    Classification best;
    double best_mean = 0.0;
    bool first = true;
    for (const auto& [label, t] : tallies) {
        const double mean = t.dist_sum / t.votes;
        if (first || t.votes > best.votes ||
            (t.votes == best.votes && mean < best_mean)) {
            best = Classification{label, t.votes, mean};
            best_mean = mean;
            first = false;
        }
        // map iteration is lexicographic, so equal (votes, mean) keeps
        // the smaller label.
    }
    return best;
}

void KnnModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "KNN v1 k=" << k_ << " grid=" << grid_.rows << "x" << grid_.cols
        << " backend=" << to_string(backend_) << "\n";
    char buf[32];
    for (const auto& s : samples_) {
        if (s.label.find_first_of(" \t\n") != std::string::npos)
            throw std::runtime_error("knn: label contains whitespace: " + s.label);
        out << s.label;
        for (const double v : s.features.values) {
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            out << ' ' << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

KnnModel KnnModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");

    auto fail = [&](int line, const std::string& msg) -> std::runtime_error {
        return std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + msg);
    };

    std::string header;
    if (!std::getline(in, header)) throw fail(1, "empty model file");
    std::istringstream hs(header);
    std::string tag, version, kf, gf, bf;
    hs >> tag >> version >> kf >> gf >> bf;
    if (tag != "KNN") throw fail(1, "not a KNN model file");
    if (version != "v1") throw fail(1, "unsupported version: " + version);

    int k = 0;
    GridSpec grid;
    char x = 0;
    std::string backend_name;
    if (std::sscanf(kf.c_str(), "k=%d", &k) != 1) throw fail(1, "bad k field");
    if (std::sscanf(gf.c_str(), "grid=%d%c%d", &grid.rows, &x, &grid.cols) != 3 || x != 'x')
        throw fail(1, "bad grid field");
    if (bf.rfind("backend=", 0) != 0) throw fail(1, "bad backend field");
    backend_name = bf.substr(8);

    std::vector<LabeledSample> samples;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        LabeledSample s;
        if (!(ls >> s.label)) throw fail(lineno, "missing label");
        s.features.grid = grid;
        s.features.values.reserve(grid.cells());
        double v = 0.0;
        while (ls >> v) s.features.values.push_back(v);
        if (static_cast<int>(s.features.values.size()) != grid.cells())
            throw fail(lineno, "expected " + std::to_string(grid.cells()) + " feature values, got " +
                                   std::to_string(s.features.values.size()));
        samples.push_back(std::move(s));
    }
    if (samples.empty()) throw fail(lineno, "model file has no samples");

    try {
        return fit(std::move(samples), k, knn_backend_from_string(backend_name));
    } catch (const std::invalid_argument& e) {
        throw fail(1, e.what());
    }
}

}  // namespace islr
