#include "caflow/mc_count.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace caflow {

namespace {

struct LogSum {
    std::vector<double> vals;
    void add(double v) { vals.push_back(v); }
    double log_sum() const {
        if (vals.empty()) return kLogZero;
        double m = *std::max_element(vals.begin(), vals.end());
        double s = 0.0;
        for (double v : vals) s += std::exp(v - m);
        return m + std::log(s);
    }
};

std::string window_key(const Window& y, int wlo, int whi) {
    std::string key;
    key.reserve(static_cast<std::size_t>(whi - wlo + 1));
    for (int c = wlo; c <= whi; ++c) key.push_back(static_cast<char>(y.at(c)));
    return key;
}

// Suffix proposal for the member chain. For product measures the redraw can
// target a single component: the other components keep their cells, so a
// pinned fast component no longer vetoes every exploration of a free slow
// one.
Window propose_suffix(const MeasureModel& m, const Window& y, int cut, int component, Rng& rng) {
    int lo = y.lo();
    int hi = y.hi();
    if (component < 0 || m.product_components().empty()) {
        return cut == lo ? m.sample_window(lo, hi - lo + 1, rng)
                         : m.conditional_extension(y.slice(lo, cut - 1), lo, hi, rng);
    }
    const auto& comps = m.product_components();
    std::vector<int> radix(comps.size(), 1);
    for (int i = static_cast<int>(comps.size()) - 2; i >= 0; --i)
        radix[static_cast<std::size_t>(i)] =
            radix[static_cast<std::size_t>(i + 1)] * comps[static_cast<std::size_t>(i + 1)].k();
    const auto& cm = comps[static_cast<std::size_t>(component)];
    int cr = radix[static_cast<std::size_t>(component)];
    int ck = cm.k();

    Window comp_cells(lo, std::vector<Symbol>(static_cast<std::size_t>(hi - lo + 1)));
    for (int c = lo; c <= hi; ++c)
        comp_cells.at(c) = static_cast<Symbol>((y.at(c) / cr) % ck);
    Window redrawn = cut == lo
                         ? cm.sample_window(lo, hi - lo + 1, rng)
                         : cm.conditional_extension(comp_cells.slice(lo, cut - 1), lo, hi, rng);
    Window out = y;
    for (int c = cut; c <= hi; ++c) {
        int others = y.at(c) - comp_cells.at(c) * cr;
        out.at(c) = static_cast<Symbol>(others + redrawn.at(c) * cr);
    }
    return out;
}

} // namespace

McWordCounts count_window_words_mc(const LocalRule& rule, const MeasureModel& m, const Window& x,
                                   int p, int n, const GWindow& g, const DeltaFilter* filter,
                                   const McCountOptions& opts, Rng& rng) {
    if (m.k() != rule.k()) throw ConfigError("measure and rule alphabets differ");
    int clo = cone_lo(rule, p, n);
    int chi = cone_hi(rule, p, n);
    int wlo = g.word_lo(p);
    int whi = g.word_hi(p);
    int lo = std::min(wlo, clo);
    int hi = std::max(whi, chi);
    if (!x.covers(lo, hi))
        throw PreconditionError("mc count needs the base point on cone and window");
    bool covers_cone = wlo <= clo && whi >= chi;
    Trace target = trace_of(rule, x, p, n);

    McWordCounts out;
    out.counts.exact = false;
    WordCounts starved; // importance result kept for the degenerate fallback
    bool have_starved = false;

    // Importance route: N = E_w[ 1{member} / mu(w) ] over w ~ marginal on
    // the window. Counts positive-measure members only; membership through
    // sampled completions can miss, so those runs stay flagged lower bounds.
    {
        LogSum all, kept;
        int hits = 0;
        for (int s = 0; s < opts.importance_samples; ++s) {
            Rng sub = rng.substream(0x10c0, static_cast<std::uint64_t>(s));
            Window w = m.sample_window(wlo, whi - wlo + 1, sub);
            bool member = false;
            if (covers_cone) {
                member = trace_matches(rule, w, target);
            } else {
                for (int t = 0; t < opts.completion_tries && !member; ++t) {
                    Window y = m.conditional_extension(w, lo, hi, sub);
                    member = trace_matches(rule, y, target);
                }
            }
            if (!member) continue;
            ++hits;
            double log_mu = m.log_measure(w);
            all.add(-log_mu);
            if (filter == nullptr || filter->passes(log_mu)) kept.add(-log_mu);
        }
        out.hits = hits;
        if (hits > 0) {
            double log_m = std::log(static_cast<double>(opts.importance_samples));
            double s1 = all.log_sum();
            double s2;
            {
                LogSum sq;
                for (double v : all.vals) sq.add(2.0 * v);
                s2 = sq.log_sum();
            }
            WordCounts c;
            c.exact = false;
            c.count.log_value = std::max(s1 - log_m, 0.0);
            c.count.exact_int = false;
            double ratio = std::exp(s2 - 2.0 * s1);
            c.log_count_stderr =
                std::sqrt(std::max(0.0, ratio - 1.0 / static_cast<double>(opts.importance_samples)));
            c.count_filtered.log_value =
                filter == nullptr ? c.count.log_value
                                  : std::max(kept.log_sum() - log_m, 0.0);
            c.count_filtered.exact_int = false;
            c.log_count_filtered_stderr = c.log_count_stderr;
            c.filtered_valid = filter != nullptr;
            c.method = CountMethod::mc_importance;
            c.lower_bound = !covers_cone || m.kind() == MeasureModel::Kind::sturmian ||
                            (m.kind() == MeasureModel::Kind::product && !m.chainable());
            if (hits >= opts.min_hits) {
                out.counts = c;
                return out;
            }
            c.lower_bound = true; // hit-starved estimate, kept only as a fallback
            starved = c;
            have_starved = true;
        }
    }

    // Members route: resampling chain on class members. Proposals redraw a
    // suffix from the conditional law (per component for product measures)
    // and are accepted iff the itinerary is preserved; distinct window words
    // are a hard lower bound on the count.
    try {
        Window y = x.slice(lo, hi);
        int comp_count = static_cast<int>(m.product_components().size());
        std::unordered_map<std::string, std::uint64_t> seen;
        std::uint64_t draws = 0;
        std::uint64_t last_new = 0;
        seen[window_key(y, wlo, whi)] = 1;
        for (int it = 1; it <= opts.member_iters; ++it) {
            Rng sub = rng.substream(0x3e3b, static_cast<std::uint64_t>(it));
            int cut = lo + sub.next_int(hi - lo + 1);
            int component = comp_count > 0 && sub.next_int(2) == 0
                                ? sub.next_int(comp_count)
                                : -1;
            Window z = propose_suffix(m, y, cut, component, sub);
            if (trace_matches(rule, z, target)) y = z;
            ++draws;
            auto [itr, fresh] = seen.try_emplace(window_key(y, wlo, whi), 0);
            ++itr->second;
            if (fresh) {
                last_new = draws;
                if (seen.size() > opts.max_distinct)
                    throw BudgetError("member chain exceeded distinct-word budget");
            }
        }
        std::uint64_t singles = 0;
        for (auto& [w, cnt] : seen)
            if (cnt == 1) ++singles;
        // Good-Turing: the singleton fraction estimates the unseen mass.
        double unseen = static_cast<double>(singles) / static_cast<double>(draws);
        out.coverage = 1.0 - unseen;
        out.complete = last_new <= draws - draws / 4 && unseen <= 2e-3;

        WordCounts& c = out.counts;
        c.count = ExtCount::from_u64(seen.size());
        c.method = CountMethod::mc_members;
        c.lower_bound = !out.complete;
        if (filter != nullptr) {
            std::uint64_t kept = 0;
            std::string x_key = window_key(x, wlo, whi);
            bool x_counted = false;
            std::vector<Symbol> word(static_cast<std::size_t>(whi - wlo + 1));
            for (auto& [w, cnt] : seen) {
                for (std::size_t i = 0; i < w.size(); ++i)
                    word[i] = static_cast<Symbol>(w[i]);
                if (filter->passes(m.log_measure(word))) {
                    ++kept;
                    if (w == x_key) x_counted = true;
                }
            }
            if (!x_counted) ++kept;
            c.count_filtered = ExtCount::from_u64(kept);
            c.filtered_valid = true;
        } else {
            c.count_filtered = c.count;
        }
        return out;
    } catch (const BudgetError&) {
        // Too many distinct words for the chain; the starved importance
        // estimate (if any) is still an honest flagged value.
        if (have_starved) {
            out.counts = starved;
            return out;
        }
        throw;
    }
}

WordCounts count_window_words_auto(const LocalRule& rule, const MeasureModel& m, const Window& x,
                                   int p, int n, const GWindow& g, const DeltaFilter* filter,
                                   const CountBudget& budget, const McCountOptions& opts,
                                   bool exact_first, bool mc_allowed, Rng& rng) {
    if (exact_first) {
        try {
            return count_window_words(rule, m, x, p, n, g, filter, budget);
        } catch (const BudgetError&) {
            if (!mc_allowed) throw;
        }
    } else if (!mc_allowed) {
        throw ConfigError("both exact and Monte Carlo routes disabled");
    }
    return count_window_words_mc(rule, m, x, p, n, g, filter, opts, rng).counts;
}

} // namespace caflow
