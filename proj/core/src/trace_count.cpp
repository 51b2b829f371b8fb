#include "caflow/trace_count.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace caflow {

ExtCount ExtCount::from_u64(std::uint64_t v) {
    ExtCount c;
    c.value = v;
    c.exact_int = true;
    c.log_value = v == 0 ? kLogZero : std::log(static_cast<double>(v));
    return c;
}

ExtCount ExtCount::scale_pow(int k, int e) const {
    ExtCount out = *this;
    if (e == 0) return out;
    out.log_value += static_cast<double>(e) * std::log(static_cast<double>(k));
    for (int i = 0; i < e && out.exact_int; ++i) {
        if (out.value > ~std::uint64_t{0} / static_cast<std::uint64_t>(k)) {
            out.exact_int = false;
            out.value = 0;
        } else {
            out.value *= static_cast<std::uint64_t>(k);
        }
    }
    return out;
}

namespace {

// ---------------------------------------------------------------------------
// Staircase cascade.
//
// Cone cells are placed left to right. After t placed cells, level i of the
// space-time diagram is determined up to position clo + (t-1) - r*i; placing
// the next base cell extends every level by one cell in a single cascade
// (level i's new cell is the image of level i-1's trailing 2r cells plus its
// fresh cell). Trace constraints are checked the moment a level cell lands
// in [-p, p], which is what keeps the reachable frontier small.
//
// The DP state is the trailing window of each level: 2r cells per level
// 0..n-1 (level 0 keeps at least one cell so chain weights can be applied).
// ---------------------------------------------------------------------------

struct CascadeShape {
    const LocalRule* rule;
    const Trace* target;
    int p, n, r, k;
    int clo, chi;
    std::vector<int> caps; // per level 0..n-1

    CascadeShape(const LocalRule& rl, const Trace& tgt, int p_, int n_)
        : rule(&rl), target(&tgt), p(p_), n(n_), r(rl.radius), k(rl.k()),
          clo(-p_ - rl.radius * n_), chi(p_ + rl.radius * n_) {
        caps.assign(static_cast<std::size_t>(std::max(n, 1)), 2 * r);
        caps[0] = std::max(2 * r, 1);
    }

    int stored(int level, int t) const {
        int have = t - 2 * r * level;
        if (have <= 0) return 0;
        return std::min(caps[static_cast<std::size_t>(level)], have);
    }

    int state_len(int t) const {
        int len = 0;
        for (int i = 0; i < std::max(n, 1); ++i) len += stored(i, t);
        return len;
    }

    // Cascade one column. `state` holds the stored windows for t placed
    // cells; on success `next` receives the state for t+1 and new level
    // values are checked against the target trace. Returns false on a
    // constraint violation.
    bool advance(const Symbol* state, int t, Symbol a, std::string* next) const {
        int c = clo + t; // position of the new base cell
        int levels = std::max(n, 1);
        Symbol news[65];
        std::vector<Symbol> news_dyn;
        Symbol* nv = news;
        if (n + 1 > 65) {
            news_dyn.resize(static_cast<std::size_t>(n + 1));
            nv = news_dyn.data();
        }

        nv[0] = a;
        if (c >= -p && c <= p && a != target->rows[0][static_cast<std::size_t>(c + p)])
            return false;

        int reached = 0; // highest level with a new cell
        const Symbol* cursor = state;
        int off_prev = 0; // offset of level i-1's stored cells
        for (int i = 1; i <= n; ++i) {
            if (t + 1 - 2 * r * i < 1) break;
            // level i-1 stored cells start at off_prev and hold exactly 2r
            // cells here (cap reached by the time level i activates).
            std::uint64_t idx = 0;
            const Symbol* win = cursor + off_prev;
            for (int j = 0; j < 2 * r; ++j)
                idx = idx * static_cast<std::uint64_t>(k) + win[j];
            idx = idx * static_cast<std::uint64_t>(k) + nv[i - 1];
            Symbol v = rule->table[idx];
            int q = c - r * i;
            if (q >= -p && q <= p && v != target->rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(q + p)])
                return false;
            nv[i] = v;
            reached = i;
            off_prev += stored(i - 1, t);
        }
        if (n == 0) reached = 0;

        if (next != nullptr) {
            next->clear();
            next->reserve(static_cast<std::size_t>(state_len(t + 1)));
            int off = 0;
            for (int i = 0; i < levels; ++i) {
                int old_cnt = stored(i, t);
                int new_cnt = stored(i, t + 1);
                if (new_cnt == 0) { off += old_cnt; continue; }
                // keep the trailing new_cnt-1 old cells, then the new value
                int keep = new_cnt - 1;
                for (int j = old_cnt - keep; j < old_cnt; ++j)
                    next->push_back(static_cast<char>(state[off + j]));
                bool has_new = (i == 0) || (i <= reached);
                next->push_back(static_cast<char>(has_new ? nv[i] : 0));
                off += old_cnt;
            }
        }
        return true;
    }
};

struct DpAcc {
    long double count = 0.0L;
    std::uint64_t icount = 0;
    bool overflow = false;
    long double measure = 0.0L;
};

struct DpTotals {
    long double count = 0.0L;
    std::uint64_t icount = 0;
    bool overflow = false;
    long double measure = 0.0L;
};

void acc_add(DpAcc& dst, const DpAcc& src, long double weight) {
    dst.count += src.count;
    if (!src.overflow) {
        std::uint64_t room = ~std::uint64_t{0} - dst.icount;
        if (dst.overflow || src.icount > room)
            dst.overflow = true;
        else
            dst.icount += src.icount;
    } else {
        dst.overflow = true;
    }
    dst.measure += src.measure * weight;
}

DpTotals run_dp(const LocalRule& rule, const Trace& target, int p, int n,
                const MeasureModel* weights, const CountBudget& budget) {
    CascadeShape shape(rule, target, p, n);
    int k = shape.k;

    // Chain probabilities cached linearly.
    std::vector<long double> initial;
    std::vector<long double> trans;
    if (weights != nullptr) {
        initial.resize(static_cast<std::size_t>(k));
        trans.resize(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
        for (int a = 0; a < k; ++a) {
            double li = weights->chain_initial_log(a);
            initial[static_cast<std::size_t>(a)] = li == kLogZero ? 0.0L : std::exp(static_cast<long double>(li));
            for (int b = 0; b < k; ++b) {
                double lt = weights->chain_transition_log(a, b);
                trans[static_cast<std::size_t>(a * k + b)] =
                    lt == kLogZero ? 0.0L : std::exp(static_cast<long double>(lt));
            }
        }
    }

    std::unordered_map<std::string, DpAcc> frontier;
    frontier[std::string()] = DpAcc{1.0L, 1, false, 1.0L};
    std::uint64_t transitions = 0;
    std::string next_state;

    for (int t = 0; t <= shape.chi - shape.clo; ++t) {
        std::unordered_map<std::string, DpAcc> next;
        next.reserve(frontier.size() * 2);
        for (auto& [state, acc] : frontier) {
            const Symbol* cells = reinterpret_cast<const Symbol*>(state.data());
            int stored0 = shape.stored(0, t);
            for (int a = 0; a < k; ++a) {
                if (++transitions > budget.dp_transitions)
                    throw BudgetError("class DP exceeded transition budget");
                if (!shape.advance(cells, t, static_cast<Symbol>(a), &next_state)) continue;
                long double w = 1.0L;
                if (weights != nullptr) {
                    w = t == 0 ? initial[static_cast<std::size_t>(a)]
                               : trans[static_cast<std::size_t>(cells[stored0 - 1] * k + a)];
                    if (w == 0.0L) continue; // measure-zero branch contributes nothing
                }
                acc_add(next[next_state], acc, w);
                if (next.size() > budget.max_frontier)
                    throw BudgetError("class DP exceeded frontier budget");
            }
        }
        frontier = std::move(next);
    }

    DpTotals totals;
    for (auto& [state, acc] : frontier) {
        totals.count += acc.count;
        if (acc.overflow) {
            totals.overflow = true;
        } else {
            std::uint64_t room = ~std::uint64_t{0} - totals.icount;
            if (totals.overflow || acc.icount > room)
                totals.overflow = true;
            else
                totals.icount += acc.icount;
        }
        totals.measure += acc.measure;
    }
    return totals;
}

// Depth-first enumeration of class words with the same cascade pruning.
class CascadeDfs {
public:
    CascadeDfs(const LocalRule& rule, const Trace& target, int p, int n,
               const CountBudget& budget,
               const std::function<void(const std::vector<Symbol>&)>& sink)
        : shape_(rule, target, p, n), budget_(budget), sink_(sink) {
        levels_.assign(static_cast<std::size_t>(n + 1), {});
    }

    void run() {
        word_.clear();
        descend(0);
    }

private:
    // levels_[i] holds every computed cell of level i (position clo + r*i
    // onward); the DFS pushes/pops one cascade column at a time.
    void descend(int t) {
        if (shape_.clo + t > shape_.chi) {
            sink_(word_);
            return;
        }
        for (int a = 0; a < shape_.k; ++a) {
            if (++nodes_ > budget_.dfs_nodes)
                throw BudgetError("class enumeration exceeded node budget");
            int pushed = try_push(t, static_cast<Symbol>(a));
            if (pushed < 0) continue;
            word_.push_back(static_cast<Symbol>(a));
            descend(t + 1);
            word_.pop_back();
            for (int i = 0; i <= pushed; ++i) levels_[static_cast<std::size_t>(i)].pop_back();
        }
    }

    // Returns the highest level extended, or -1 on a constraint violation
    // (in which case nothing is pushed).
    int try_push(int t, Symbol a) {
        int c = shape_.clo + t;
        int r = shape_.r;
        int n = shape_.n;
        const Trace& tgt = *shape_.target;
        if (c >= -shape_.p && c <= shape_.p &&
            a != tgt.rows[0][static_cast<std::size_t>(c + shape_.p)])
            return -1;
        scratch_.clear();
        scratch_.push_back(a);
        for (int i = 1; i <= n; ++i) {
            if (t + 1 - 2 * r * i < 1) break;
            // Neighborhood of the new level-i cell: the trailing 2r cells of
            // level i-1 plus level i-1's cell from this cascade.
            auto& prev = levels_[static_cast<std::size_t>(i - 1)];
            std::size_t sz = prev.size();
            std::uint64_t idx = 0;
            for (int j = 2 * r; j >= 1; --j)
                idx = idx * static_cast<std::uint64_t>(shape_.k) + prev[sz - static_cast<std::size_t>(j)];
            idx = idx * static_cast<std::uint64_t>(shape_.k) + scratch_[static_cast<std::size_t>(i - 1)];
            Symbol v = shape_.rule->table[idx];
            int q = c - r * i;
            if (q >= -shape_.p && q <= shape_.p &&
                v != tgt.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(q + shape_.p)])
                return -1;
            scratch_.push_back(v);
        }
        int reached = static_cast<int>(scratch_.size()) - 1;
        for (int i = 0; i <= reached; ++i)
            levels_[static_cast<std::size_t>(i)].push_back(scratch_[static_cast<std::size_t>(i)]);
        return reached;
    }

    CascadeShape shape_;
    CountBudget budget_;
    const std::function<void(const std::vector<Symbol>&)>& sink_;
    std::vector<std::vector<Symbol>> levels_;
    std::vector<Symbol> word_;
    std::vector<Symbol> scratch_;
    std::uint64_t nodes_ = 0;
};

void require_cone_cover(const LocalRule& rule, const Window& x, int p, int n) {
    if (!x.covers(cone_lo(rule, p, n), cone_hi(rule, p, n)))
        throw PreconditionError("window does not cover the dependency cone");
}

void require_exact_regime(const LocalRule& rule, int n, const CountBudget& budget) {
    if (2 * rule.radius * n > budget.max_state_symbols)
        throw BudgetError("staircase state beyond the exact regime (2rn = " +
                          std::to_string(2 * rule.radius * n) + " symbols)");
}

double logsumexp(std::vector<double>& vals) {
    if (vals.empty()) return kLogZero;
    double m = *std::max_element(vals.begin(), vals.end());
    if (m == kLogZero) return kLogZero;
    double s = 0.0;
    for (double v : vals)
        if (v != kLogZero) s += std::exp(v - m);
    return m + std::log(s);
}

} // namespace

void for_each_class_word(const LocalRule& rule, const Window& x, int p, int n,
                         const CountBudget& budget,
                         const std::function<void(const std::vector<Symbol>&)>& sink) {
    require_cone_cover(rule, x, p, n);
    require_exact_regime(rule, n, budget);
    Trace target = trace_of(rule, x, p, n);
    CascadeDfs dfs(rule, target, p, n, budget, sink);
    dfs.run();
}

std::vector<std::vector<Symbol>> enumerate_class_words(const LocalRule& rule, const Window& x,
                                                       int p, int n, const CountBudget& budget) {
    std::vector<std::vector<Symbol>> words;
    for_each_class_word(rule, x, p, n, budget, [&](const std::vector<Symbol>& w) {
        if (words.size() >= budget.max_words)
            throw BudgetError("class enumeration exceeded word budget");
        words.push_back(w);
    });
    return words;
}

ExtCount class_cone_count(const LocalRule& rule, const Window& x, int p, int n,
                          const CountBudget& budget) {
    require_cone_cover(rule, x, p, n);
    require_exact_regime(rule, n, budget);
    Trace target = trace_of(rule, x, p, n);
    DpTotals totals = run_dp(rule, target, p, n, nullptr, budget);
    ExtCount out;
    out.log_value = totals.count > 0.0L ? static_cast<double>(std::log(totals.count)) : kLogZero;
    out.exact_int = !totals.overflow;
    out.value = totals.overflow ? 0 : totals.icount;
    return out;
}

double class_log_measure_exact(const LocalRule& rule, const MeasureModel& m, const Window& x,
                               int p, int n, const CountBudget& budget) {
    require_cone_cover(rule, x, p, n);
    require_exact_regime(rule, n, budget);
    if (m.k() != rule.k()) throw ConfigError("measure and rule alphabets differ");
    Trace target = trace_of(rule, x, p, n);
    if (m.chainable()) {
        DpTotals totals = run_dp(rule, target, p, n, &m, budget);
        return totals.measure > 0.0L ? static_cast<double>(std::log(totals.measure)) : kLogZero;
    }
    // Non-factorizing model: sum cylinder measures over enumerated words.
    std::vector<double> logs;
    for_each_class_word(rule, x, p, n, budget, [&](const std::vector<Symbol>& w) {
        if (logs.size() >= budget.max_words)
            throw BudgetError("class measure enumeration exceeded word budget");
        double lm = m.log_measure(w);
        if (lm != kLogZero) logs.push_back(lm);
    });
    return logsumexp(logs);
}

namespace {

// Coordinates of the observation window that lie outside the cone carry no
// constraint: they multiply counts by k^excess and are never enumerated.
struct WindowGeometry {
    int clo, chi;   // cone
    int wlo, whi;   // word window
    int core_lo, core_hi;
    int excess;
    bool covers_cone;
};

WindowGeometry window_geometry(const LocalRule& rule, int p, int n, const GWindow& g) {
    WindowGeometry geo;
    geo.clo = cone_lo(rule, p, n);
    geo.chi = cone_hi(rule, p, n);
    geo.wlo = g.word_lo(p);
    geo.whi = g.word_hi(p);
    geo.core_lo = std::max(geo.wlo, geo.clo);
    geo.core_hi = std::min(geo.whi, geo.chi);
    geo.excess = std::max(0, geo.clo - geo.wlo) + std::max(0, geo.whi - geo.chi);
    geo.covers_cone = geo.wlo <= geo.clo && geo.whi >= geo.chi;
    return geo;
}

} // namespace

WordCounts count_window_words(const LocalRule& rule, const MeasureModel& m, const Window& x,
                              int p, int n, const GWindow& g, const DeltaFilter* filter,
                              const CountBudget& budget) {
    require_cone_cover(rule, x, p, n);
    require_exact_regime(rule, n, budget);
    if (g.g_minus < 0 || g.g_plus < 0) throw PreconditionError("negative observation range");
    WindowGeometry geo = window_geometry(rule, p, n, g);
    int k = rule.k();
    WordCounts out;

    bool trivial_filter = filter == nullptr || (filter->eta == 0.0 && m.equal_weight_cylinders());

    if (trivial_filter) {
        if (geo.covers_cone) {
            out.count = class_cone_count(rule, x, p, n, budget).scale_pow(k, geo.excess);
            out.method = geo.excess > 0 ? CountMethod::free_cells : CountMethod::dp_exact;
        } else {
            std::unordered_set<std::string> proj;
            for_each_class_word(rule, x, p, n, budget, [&](const std::vector<Symbol>& w) {
                std::string key(w.begin() + (geo.core_lo - geo.clo),
                                w.begin() + (geo.core_hi - geo.clo + 1));
                proj.insert(std::move(key));
                if (proj.size() > budget.max_words)
                    throw BudgetError("projection enumeration exceeded word budget");
            });
            out.count = ExtCount::from_u64(proj.size()).scale_pow(k, geo.excess);
            out.method = CountMethod::enumeration;
        }
        out.count_filtered = out.count;
        out.filtered_valid = filter != nullptr;
        return out;
    }

    // Real filter: every distinct window word needs its cylinder measure.
    if (!x.covers(geo.wlo, geo.whi))
        throw PreconditionError("filtered count needs the base point on the whole window");

    if (geo.covers_cone) {
        // Cheap cardinality probe before committing to enumeration.
        ExtCount probe = class_cone_count(rule, x, p, n, budget);
        double total_log = probe.log_value + geo.excess * std::log(static_cast<double>(k));
        if (total_log > std::log(static_cast<double>(budget.max_words)))
            throw BudgetError("filtered enumeration exceeded word budget");
    }

    std::unordered_set<std::string> proj;
    for_each_class_word(rule, x, p, n, budget, [&](const std::vector<Symbol>& w) {
        std::string key(w.begin() + (geo.core_lo - geo.clo),
                        w.begin() + (geo.core_hi - geo.clo + 1));
        proj.insert(std::move(key));
        if (proj.size() > budget.max_words)
            throw BudgetError("projection enumeration exceeded word budget");
    });

    double excess_words = std::pow(static_cast<double>(k), geo.excess);
    double total_words = static_cast<double>(proj.size()) * excess_words;
    if (total_words > static_cast<double>(budget.max_words))
        throw BudgetError("filtered enumeration exceeded word budget");

    std::vector<Symbol> word(static_cast<std::size_t>(geo.whi - geo.wlo + 1));
    std::vector<int> excess_pos;
    for (int c = geo.wlo; c < geo.clo; ++c) excess_pos.push_back(c);
    for (int c = geo.chi + 1; c <= geo.whi; ++c) excess_pos.push_back(c);

    std::vector<Symbol> x_word(word.size());
    for (int c = geo.wlo; c <= geo.whi; ++c)
        x_word[static_cast<std::size_t>(c - geo.wlo)] = x.at(c);

    std::uint64_t total = 0;
    std::uint64_t kept = 0;
    bool x_counted = false;
    for (const auto& key : proj) {
        for (int c = geo.core_lo; c <= geo.core_hi; ++c)
            word[static_cast<std::size_t>(c - geo.wlo)] =
                static_cast<Symbol>(key[static_cast<std::size_t>(c - geo.core_lo)]);
        std::vector<int> digits(excess_pos.size(), 0);
        bool more = true;
        while (more) {
            for (std::size_t i = 0; i < excess_pos.size(); ++i)
                word[static_cast<std::size_t>(excess_pos[i] - geo.wlo)] =
                    static_cast<Symbol>(digits[i]);
            ++total;
            if (filter->passes(m.log_measure(word))) {
                ++kept;
                if (word == x_word) x_counted = true;
            }
            more = false;
            for (std::size_t i = 0; i < excess_pos.size(); ++i) {
                if (++digits[i] < k) { more = true; break; }
                digits[i] = 0;
            }
            if (excess_pos.empty()) break;
        }
    }
    // The base point's own restriction is a member by construction and is
    // always retained.
    if (!x_counted) ++kept;

    out.count = ExtCount::from_u64(total);
    out.count_filtered = ExtCount::from_u64(kept);
    out.filtered_valid = true;
    out.method = CountMethod::enumeration;
    return out;
}

McMeasure class_measure_mc(const LocalRule& rule, const MeasureModel& m, const Window& x, int p,
                           int n, int samples, Rng& rng) {
    require_cone_cover(rule, x, p, n);
    if (m.k() != rule.k()) throw ConfigError("measure and rule alphabets differ");
    Trace target = trace_of(rule, x, p, n);
    int clo = cone_lo(rule, p, n);
    int chi = cone_hi(rule, p, n);
    int hits = 0;
    for (int s = 0; s < samples; ++s) {
        Rng sub = rng.substream(0xcc, static_cast<std::uint64_t>(s));
        Window y = m.sample_window(clo, chi - clo + 1, sub);
        if (trace_matches(rule, y, target)) ++hits;
    }
    McMeasure out;
    out.hits = hits;
    out.samples = samples;
    if (hits == 0) {
        out.lower_confidence = true;
        out.log_value = std::log(3.0 / static_cast<double>(samples));
        out.log_stderr = 1.0;
        return out;
    }
    double phat = static_cast<double>(hits) / static_cast<double>(samples);
    out.log_value = std::log(phat);
    out.log_stderr = std::sqrt((1.0 - phat) / (phat * static_cast<double>(samples)));
    return out;
}

} // namespace caflow
