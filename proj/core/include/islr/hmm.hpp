#pragma once

// Discrete left-to-right hidden Markov model bank for gesture
// classification: observation encoding, scaled forward scoring,
// multi-sequence Baum-Welch training, and temporal segmentation.

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "islr/hand_tracker.hpp"

namespace islr {

// Motion directions occupy symbols 0..3 (Up, Right, Left, Down);
// intermediate poses map to 4..3+P in the listed order.
struct SymbolTable {
    std::vector<std::string> poses;

    int size() const { return 4 + static_cast<int>(poses.size()); }
    int motion_symbol(Direction d) const { return static_cast<int>(d); }
    int pose_symbol(const std::string& label) const;  // throws on unknown label
    bool has_pose(const std::string& label) const;
    std::string describe(int symbol) const;
};

// Per-frame observation: exactly one of pose/motion is set.
struct FrameTuple {
    std::optional<std::string> pose;
    std::optional<Direction> motion;

    static FrameTuple still(std::string label) { return {std::move(label), std::nullopt}; }
    static FrameTuple moved(Direction d) { return {std::nullopt, d}; }
};

std::vector<int> encode(std::span<const FrameTuple> tuples, const SymbolTable& table);

struct HmmChain {
    std::string name;
    int states = 0;
    std::vector<double> pi;                  // fixed at [1,0,...,0]
    std::vector<std::vector<double>> a;      // upper-bidiagonal, row-stochastic
    std::vector<std::vector<double>> b;      // states x S, row-stochastic
};

// pi=[1,0,...]; A rows [0.5 self, 0.5 next] with final-row self-loop 1;
// B uniform except hinted (state,symbol) pairs are boosted to 0.5 with
// the remainder spread uniformly (at most two hints per state).
HmmChain init_chain(const std::string& name, int n_states, const SymbolTable& table,
                    const std::vector<std::pair<int, int>>& hints = {});

// log P(obs | chain) via the scaled forward recursion; -inf for an
// observation sequence impossible under the chain.
double forward_log_likelihood(const HmmChain& chain, std::span<const int> obs);

struct TrainOptions {
    int max_iter = 200;
    double tol = 1e-6;
    double floor = 1e-6;
    // Called after every re-estimation with the updated chain, the
    // training log-likelihood it was derived from, and the iteration.
    std::function<void(const HmmChain&, double, int)> observer;
};

struct TrainResult {
    HmmChain chain;
    // loglik_trace[i] is the total training log-likelihood under the
    // parameters at the start of iteration i; the last entry is the
    // final model's log-likelihood.
    std::vector<double> loglik_trace;
    int iterations = 0;
};

TrainResult baum_welch_train(HmmChain chain, const std::vector<std::vector<int>>& sequences,
                             const TrainOptions& options = {});

inline constexpr const char* kWrongGesture = "WRONG";

struct GestureDecision {
    std::string label;  // kWrongGesture when rejected
    bool rejected = false;
    double per_symbol_loglik = 0.0;  // best chain's score / sequence length
    std::vector<double> scores;      // per-chain forward log-likelihoods
};

struct GestureBank {
    std::vector<HmmChain> chains;
    SymbolTable symbols;
    double reject_threshold = -1e300;  // per-symbol average log-likelihood cutoff

    // Text format: `HMMBANK v1 S=<S> poses=<p0,p1,...>`, a
    // `reject_threshold <t>` line, then per chain: `chain <name> <n>`,
    // the pi row, n A-rows and n B-rows at 12 significant digits.
    void save(const std::filesystem::path& path) const;
    static GestureBank load(const std::filesystem::path& path);
};

GestureDecision classify_gesture(const GestureBank& bank, std::span<const int> obs);

// Minimum per-symbol training log-likelihood across all chains and their
// own training sequences, minus the margin.
double calibrate_reject_threshold(std::span<const HmmChain> chains,
                                  std::span<const std::vector<std::vector<int>>> sequences,
                                  double margin);

// Splits a per-frame stream into gesture segments.  A segment opens on
// the first hand-present frame after absence and closes once absence
// persists for `debounce` consecutive frames; absence frames are never
// part of a segment.
class SegmentAccumulator {
public:
    explicit SegmentAccumulator(int debounce = 3) : debounce_(debounce) {}

    // nullopt marks a hand-absent frame.  Returns the finished segment
    // on the frame that closes it.
    std::optional<std::vector<FrameTuple>> feed(const std::optional<FrameTuple>& tuple);

    // Closes and returns the still-open segment, if any.
    std::optional<std::vector<FrameTuple>> flush();

    bool open() const { return open_; }

private:
    int debounce_;
    int absent_run_ = 0;
    bool open_ = false;
    std::vector<FrameTuple> current_;
};

std::vector<std::vector<FrameTuple>> segment_stream(
    std::span<const std::optional<FrameTuple>> events, int debounce = 3);

// Gesture definition file: per gesture `gesture <name> states=<n>`
// followed by optional `hint <state> <symbol_label>` lines.
struct GestureDef {
    std::string name;
    int states = 0;
    std::vector<std::pair<int, std::string>> hints;  // (state, symbol label)
};

std::vector<GestureDef> load_gesture_defs(const std::filesystem::path& path);
void save_gesture_defs(const std::filesystem::path& path, std::span<const GestureDef> defs);

}  // namespace islr
