#include "islr/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace islr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_symbols(const HmmChain& chain, std::span<const int> obs) {
    const int symbols = static_cast<int>(chain.b.empty() ? 0 : chain.b[0].size());
    for (const int o : obs)
        if (o < 0 || o >= symbols)
            throw std::out_of_range("observation symbol " + std::to_string(o) +
                                    " outside 0.." + std::to_string(symbols - 1));
}

// Exact floor-constrained renormalization: deficient entries are pinned
// at the floor and the remaining mass is shared proportionally, repeated
// until every entry respects the floor.
void floor_row(std::vector<double>& row, const std::vector<int>& support, double floor) {
    if (support.size() <= 1) {
        for (const int i : support) row[i] = 1.0;
        return;
    }
    std::vector<bool> pinned(support.size(), false);
    for (;;) {
        double pinned_mass = 0.0;
        double free_mass = 0.0;
        for (std::size_t s = 0; s < support.size(); ++s) {
            if (pinned[s])
                pinned_mass += floor;
            else
                free_mass += row[support[s]];
        }
        const double scale = free_mass > 0.0 ? (1.0 - pinned_mass) / free_mass : 0.0;
        bool changed = false;
        for (std::size_t s = 0; s < support.size(); ++s) {
            if (pinned[s]) continue;
            const double v = free_mass > 0.0 ? row[support[s]] * scale
                                             : (1.0 - pinned_mass) /
                                                   static_cast<double>(
                                                       std::count(pinned.begin(), pinned.end(), false));
            if (v < floor) {
                pinned[s] = true;
                changed = true;
            }
        }
        if (!changed) {
            for (std::size_t s = 0; s < support.size(); ++s) {
                if (pinned[s]) {
                    row[support[s]] = floor;
                } else if (free_mass > 0.0) {
                    row[support[s]] *= scale;
                } else {
                    row[support[s]] = (1.0 - pinned_mass) /
                                      static_cast<double>(
                                          std::count(pinned.begin(), pinned.end(), false));
                }
            }
            return;
        }
    }
}

std::vector<int> full_support(int n) {
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) s[i] = i;
    return s;
}

// Structural support of a left-to-right transition row.
std::vector<int> row_support(int row, int n_states) {
    if (row == n_states - 1) return {row};
    return {row, row + 1};
}

struct ScaledPass {
    // alpha[t][i], beta[t][i] in the scaled convention where
    // sum_i alpha[t][i] == 1 and gamma = alpha * beta directly.
    std::vector<std::vector<double>> alpha;
    std::vector<std::vector<double>> beta;
    std::vector<double> scale;  // per-step normalizers c_t
    double loglik = kNegInf;
    bool ok = false;
};

ScaledPass forward_backward(const HmmChain& chain, std::span<const int> obs,
                            bool with_beta) {
    const int n = chain.states;
    const std::size_t t_len = obs.size();
    ScaledPass p;
    p.alpha.assign(t_len, std::vector<double>(n, 0.0));
    p.scale.assign(t_len, 0.0);

    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        p.alpha[0][i] = chain.pi[i] * chain.b[i][obs[0]];
        total += p.alpha[0][i];
    }
    if (total <= 0.0) return p;
    p.scale[0] = total;
    for (int i = 0; i < n; ++i) p.alpha[0][i] /= total;

    for (std::size_t t = 1; t < t_len; ++t) {
        total = 0.0;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += p.alpha[t - 1][i] * chain.a[i][j];
            p.alpha[t][j] = acc * chain.b[j][obs[t]];
            total += p.alpha[t][j];
        }
        if (total <= 0.0) return p;
        p.scale[t] = total;
        for (int j = 0; j < n; ++j) p.alpha[t][j] /= total;
    }

    p.loglik = 0.0;
    for (const double c : p.scale) p.loglik += std::log(c);
    p.ok = true;

    if (with_beta) {
        p.beta.assign(t_len, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) p.beta[t_len - 1][i] = 1.0;
        for (std::size_t t = t_len - 1; t-- > 0;) {
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j)
                    acc += chain.a[i][j] * chain.b[j][obs[t + 1]] * p.beta[t + 1][j];
                p.beta[t][i] = acc / p.scale[t + 1];
            }
        }
    }
    return p;
}

}  // namespace

int SymbolTable::pose_symbol(const std::string& label) const {
    for (std::size_t i = 0; i < poses.size(); ++i)
        if (poses[i] == label) return 4 + static_cast<int>(i);
    throw std::out_of_range("unknown pose label: " + label);
}

bool SymbolTable::has_pose(const std::string& label) const {
    return std::find(poses.begin(), poses.end(), label) != poses.end();
}

std::string SymbolTable::describe(int symbol) const {
    if (symbol >= 0 && symbol < 4) return to_string(static_cast<Direction>(symbol));
    if (symbol >= 4 && symbol < size()) return poses[symbol - 4];
    throw std::out_of_range("symbol " + std::to_string(symbol) + " outside table");
}

std::vector<int> encode(std::span<const FrameTuple> tuples, const SymbolTable& table) {
    std::vector<int> obs;
    obs.reserve(tuples.size());
    for (const FrameTuple& t : tuples) {
        if (t.motion.has_value() == t.pose.has_value())
            throw std::invalid_argument("frame tuple must set exactly one of pose/motion");
        if (t.motion)
            obs.push_back(table.motion_symbol(*t.motion));
        else
            obs.push_back(table.pose_symbol(*t.pose));
    }
    return obs;
}

HmmChain init_chain(const std::string& name, int n_states, const SymbolTable& table,
                    const std::vector<std::pair<int, int>>& hints) {
    if (n_states < 1) throw std::invalid_argument("chain needs at least one state");
    const int s = table.size();

    HmmChain c;
    c.name = name;
    c.states = n_states;
    c.pi.assign(n_states, 0.0);
    c.pi[0] = 1.0;

    c.a.assign(n_states, std::vector<double>(n_states, 0.0));
    for (int i = 0; i < n_states - 1; ++i) {
        c.a[i][i] = 0.5;
        c.a[i][i + 1] = 0.5;
    }
    c.a[n_states - 1][n_states - 1] = 1.0;

    c.b.assign(n_states, std::vector<double>(s, 1.0 / s));
    std::vector<int> hints_per_state(n_states, 0);
    for (const auto& [state, symbol] : hints) {
        if (state < 0 || state >= n_states)
            throw std::invalid_argument("hint references unknown state " + std::to_string(state));
        if (symbol < 0 || symbol >= s)
            throw std::invalid_argument("hint references unknown symbol " + std::to_string(symbol));
        if (++hints_per_state[state] > 2)
            throw std::invalid_argument("more than two hints for state " + std::to_string(state));
    }
    for (int i = 0; i < n_states; ++i) {
        if (hints_per_state[i] == 0) continue;
        const double rest = (1.0 - 0.5 * hints_per_state[i]) / (s - hints_per_state[i]);
        for (int k = 0; k < s; ++k) c.b[i][k] = rest;
        for (const auto& [state, symbol] : hints)
            if (state == i) c.b[i][symbol] = 0.5;
        // Keep init rows inside the training floor so the first
        // re-estimation cannot lose likelihood.
        floor_row(c.b[i], full_support(s), TrainOptions{}.floor);
    }
    return c;
}

double forward_log_likelihood(const HmmChain& chain, std::span<const int> obs) {
    if (obs.empty()) throw std::invalid_argument("observation sequence is empty");
    check_symbols(chain, obs);
    return forward_backward(chain, obs, false).loglik;
}

TrainResult baum_welch_train(HmmChain chain, const std::vector<std::vector<int>>& sequences,
                             const TrainOptions& options) {
    if (sequences.empty()) throw std::invalid_argument("baum_welch: empty training set");
    for (const auto& seq : sequences) {
        if (seq.empty()) throw std::invalid_argument("baum_welch: empty training sequence");
        check_symbols(chain, seq);
    }
    const int n = chain.states;
    const int s = static_cast<int>(chain.b[0].size());

    TrainResult result;
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        std::vector<std::vector<double>> a_num(n, std::vector<double>(n, 0.0));
        std::vector<std::vector<double>> b_num(n, std::vector<double>(s, 0.0));
        std::vector<double> b_den(n, 0.0);
        double loglik = 0.0;

        for (const auto& obs : sequences) {
            const ScaledPass p = forward_backward(chain, obs, true);
            if (!p.ok)
                throw std::runtime_error("baum_welch: training sequence impossible under chain '" +
                                         chain.name + "'");
            loglik += p.loglik;
            const std::size_t t_len = obs.size();
            for (std::size_t t = 0; t < t_len; ++t) {
                for (int i = 0; i < n; ++i) {
                    const double gamma = p.alpha[t][i] * p.beta[t][i];
                    b_num[i][obs[t]] += gamma;
                    b_den[i] += gamma;
                }
                if (t + 1 < t_len) {
                    for (int i = 0; i < n; ++i) {
                        for (const int j : row_support(i, n)) {
                            a_num[i][j] += p.alpha[t][i] * chain.a[i][j] *
                                           chain.b[j][obs[t + 1]] * p.beta[t + 1][j] /
                                           p.scale[t + 1];
                        }
                    }
                }
            }
        }

        result.loglik_trace.push_back(loglik);
        if (result.loglik_trace.size() >= 2) {
            const auto& trace = result.loglik_trace;
            if (trace[trace.size() - 1] - trace[trace.size() - 2] < options.tol) break;
        }

        // M-step; rows with no expected mass keep their parameters.
        for (int i = 0; i < n; ++i) {
            const std::vector<int> support = row_support(i, n);
            double total = 0.0;
            for (const int j : support) total += a_num[i][j];
            if (total > 0.0) {
                for (const int j : support) chain.a[i][j] = a_num[i][j] / total;
                floor_row(chain.a[i], support, options.floor);
            }
            if (b_den[i] > 0.0) {
                for (int k = 0; k < s; ++k) chain.b[i][k] = b_num[i][k] / b_den[i];
                floor_row(chain.b[i], full_support(s), options.floor);
            }
        }
        if (options.observer) options.observer(chain, loglik, iter);
    }

    // Final log-likelihood under the last parameter update.
    if (static_cast<int>(result.loglik_trace.size()) == iter && iter > 0) {
        double final_ll = 0.0;
        for (const auto& obs : sequences)
            final_ll += forward_backward(chain, obs, false).loglik;
        result.loglik_trace.push_back(final_ll);
    }

    result.chain = std::move(chain);
    result.iterations = iter;
    return result;
}

GestureDecision classify_gesture(const GestureBank& bank, std::span<const int> obs) {
    if (obs.empty()) throw std::invalid_argument("classify_gesture: empty observation sequence");
    if (bank.chains.empty()) throw std::invalid_argument("classify_gesture: empty bank");

    GestureDecision d;
    d.scores.reserve(bank.chains.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < bank.chains.size(); ++i) {
        d.scores.push_back(forward_log_likelihood(bank.chains[i], obs));
        if (d.scores[i] > d.scores[best]) best = i;
    }
    d.per_symbol_loglik = d.scores[best] / static_cast<double>(obs.size());
    if (d.per_symbol_loglik < bank.reject_threshold) {
        d.label = kWrongGesture;
        d.rejected = true;
    } else {
        d.label = bank.chains[best].name;
    }
    return d;
}

double calibrate_reject_threshold(std::span<const HmmChain> chains,
                                  std::span<const std::vector<std::vector<int>>> sequences,
                                  double margin) {
    if (chains.size() != sequences.size())
        throw std::invalid_argument("calibrate: chains/sequences size mismatch");
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < chains.size(); ++c) {
        for (const auto& obs : sequences[c]) {
            const double per_symbol =
                forward_log_likelihood(chains[c], obs) / static_cast<double>(obs.size());
            lo = std::min(lo, per_symbol);
        }
    }
    if (!std::isfinite(lo))
        throw std::invalid_argument("calibrate: no finite training scores");
    return lo - margin;
}

std::optional<std::vector<FrameTuple>> SegmentAccumulator::feed(
    const std::optional<FrameTuple>& tuple) {
    if (tuple) {
        absent_run_ = 0;
        open_ = true;
        current_.push_back(*tuple);
        return std::nullopt;
    }
    if (!open_) return std::nullopt;
    if (++absent_run_ >= debounce_) return flush();
    return std::nullopt;
}

std::optional<std::vector<FrameTuple>> SegmentAccumulator::flush() {
    if (!open_) return std::nullopt;
    open_ = false;
    absent_run_ = 0;
    std::vector<FrameTuple> seg;
    seg.swap(current_);
    return seg;
}

std::vector<std::vector<FrameTuple>> segment_stream(
    std::span<const std::optional<FrameTuple>> events, int debounce) {
    SegmentAccumulator acc(debounce);
    std::vector<std::vector<FrameTuple>> segments;
    for (const auto& e : events)
        if (auto seg = acc.feed(e)) segments.push_back(std::move(*seg));
    if (auto seg = acc.flush()) segments.push_back(std::move(*seg));
    return segments;
}

void GestureBank::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "HMMBANK v1 S=" << symbols.size() << " poses=";
    for (std::size_t i = 0; i < symbols.poses.size(); ++i) {
        if (i) out << ",";
        out << symbols.poses[i];
    }
    out << "\n";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", reject_threshold);
    out << "reject_threshold " << buf << "\n";
    for (const HmmChain& c : chains) {
        out << "chain " << c.name << " " << c.states << "\n";
        auto row = [&](const std::vector<double>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.12g", r[i]);
                out << (i ? " " : "") << buf;
            }
            out << "\n";
        };
        row(c.pi);
        for (const auto& r : c.a) row(r);
        for (const auto& r : c.b) row(r);
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

GestureBank GestureBank::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> std::runtime_error {
        return std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + msg);
    };
    auto next_line = [&](std::string& line) {
        if (!std::getline(in, line)) return false;
        ++lineno;
        return true;
    };

    std::string line;
    if (!next_line(line)) throw fail("empty bank file");
    std::istringstream hs(line);
    std::string tag, version, sf, pf;
    hs >> tag >> version >> sf >> pf;
    if (tag != "HMMBANK") throw fail("not an HMMBANK file");
    if (version != "v1") throw fail("unsupported version: " + version);
    int s = 0;
    if (std::sscanf(sf.c_str(), "S=%d", &s) != 1 || s < 4) throw fail("bad S field");

    GestureBank bank;
    if (pf.rfind("poses=", 0) != 0) throw fail("bad poses field");
    std::string pose_list = pf.substr(6);
    std::istringstream ps(pose_list);
    std::string pose;
    while (std::getline(ps, pose, ','))
        if (!pose.empty()) bank.symbols.poses.push_back(pose);
    if (bank.symbols.size() != s) throw fail("pose list inconsistent with S");

    if (!next_line(line)) throw fail("missing reject_threshold line");
    {
        std::istringstream ts(line);
        std::string key;
        if (!(ts >> key >> bank.reject_threshold) || key != "reject_threshold")
            throw fail("malformed reject_threshold line");
    }

    auto read_row = [&](int count) {
        if (!next_line(line)) throw fail("unexpected end of file in chain");
        std::istringstream rs(line);
        std::vector<double> row;
        double v = 0.0;
        while (rs >> v) row.push_back(v);
        if (static_cast<int>(row.size()) != count)
            throw fail("expected " + std::to_string(count) + " values, got " +
                       std::to_string(row.size()));
        return row;
    };

    while (next_line(line)) {
        if (line.empty()) continue;
        std::istringstream cs(line);
        std::string kw;
        HmmChain chain;
        if (!(cs >> kw >> chain.name >> chain.states) || kw != "chain" || chain.states < 1)
            throw fail("malformed chain header");
        chain.pi = read_row(chain.states);
        for (int i = 0; i < chain.states; ++i) chain.a.push_back(read_row(chain.states));
        for (int i = 0; i < chain.states; ++i) chain.b.push_back(read_row(s));
        bank.chains.push_back(std::move(chain));
    }
    if (bank.chains.empty()) throw fail("bank file has no chains");
    return bank;
}

std::vector<GestureDef> load_gesture_defs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    std::vector<GestureDef> defs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "gesture") {
            GestureDef def;
            std::string states_field;
            if (!(ls >> def.name >> states_field) ||
                std::sscanf(states_field.c_str(), "states=%d", &def.states) != 1 ||
                def.states < 1)
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": malformed gesture line");
            defs.push_back(std::move(def));
        } else if (kw == "hint") {
            if (defs.empty())
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": hint before any gesture");
            int state = 0;
            std::string symbol;
            if (!(ls >> state >> symbol))
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": malformed hint line");
            defs.back().hints.emplace_back(state, symbol);
        } else {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": unknown keyword '" + kw + "'");
        }
    }
    return defs;
}

void save_gesture_defs(const std::filesystem::path& path, std::span<const GestureDef> defs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    for (const GestureDef& d : defs) {
        out << "gesture " << d.name << " states=" << d.states << "\n";
        for (const auto& [state, symbol] : d.hints)
            out << "hint " << state << " " << symbol << "\n";
    }
}

}  // namespace islr
