#include "caflow/lyapunov.hpp"

#include <algorithm>
#include <cmath>

#include "caflow/trace_count.hpp"

namespace caflow {

namespace {

// Evolved rows of x cached once; comparisons run against these.
std::vector<Window> evolve_rows(const LocalRule& rule, const Window& x, int n) {
    std::vector<Window> rows;
    rows.reserve(static_cast<std::size_t>(n) + 1);
    rows.push_back(x);
    for (int i = 1; i <= n; ++i) rows.push_back(step(rule, rows.back()));
    return rows;
}

// Does some perturbation of `base` on `cells` (all assignments enumerated)
// change any evolved row i in 1..n at a coordinate <= 0 (side = -1) or
// >= 0 (side = +1)?
bool perturbation_reaches_center(const LocalRule& rule, const std::vector<Window>& x_rows,
                                 const Window& base, const std::vector<int>& cells, int n,
                                 int side, std::uint64_t budget) {
    int k = rule.k();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (total > budget / static_cast<std::uint64_t>(k))
            throw BudgetError("perturbation cone enumeration exceeds budget");
        total *= static_cast<std::uint64_t>(k);
    }
    if (total > budget) throw BudgetError("perturbation cone enumeration exceeds budget");

    Window y = base;
    std::vector<int> digits(cells.size(), 0);
    for (std::uint64_t it = 0; it < total; ++it) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            y.at(cells[i]) = static_cast<Symbol>(digits[i]);

        Window cur = y;
        for (int i = 1; i <= n; ++i) {
            cur = step(rule, cur);
            const Window& xr = x_rows[static_cast<std::size_t>(i)];
            int lo = side < 0 ? cur.lo() : 0;
            int hi = side < 0 ? 0 : cur.hi();
            bool differs = false;
            for (int c = lo; c <= hi && !differs; ++c)
                differs = cur.at(c) != xr.at(c);
            if (differs) return true;
        }

        // Odometer over the assignment digits.
        std::size_t pos = 0;
        while (pos < digits.size()) {
            if (++digits[pos] < k) break;
            digits[pos] = 0;
            ++pos;
        }
    }
    return false;
}

// valid(s) for one side: no perturbation beyond insulation s reaches the
// protected half-line within n steps. Monotone in s, and always true at rn.
bool insulation_valid(const LocalRule& rule, const std::vector<Window>& x_rows, const Window& x,
                      int n, int side, int s, std::uint64_t budget) {
    int rn = rule.radius * n;
    std::vector<int> cells;
    if (side < 0) {
        for (int c = s + 1; c <= rn; ++c) cells.push_back(c);
    } else {
        for (int c = -rn; c <= -s - 1; ++c) cells.push_back(c);
    }
    if (cells.empty()) return true;
    return !perturbation_reaches_center(rule, x_rows, x, cells, n, side, budget);
}

int minimal_insulation(const LocalRule& rule, const std::vector<Window>& x_rows, const Window& x,
                       int n, int side, std::uint64_t budget) {
    int lo = 0;
    int hi = rule.radius * n;
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        if (insulation_valid(rule, x_rows, x, n, side, mid, budget))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

void require_lyapunov_window(const LocalRule& rule, const Window& x, int n) {
    int span = 2 * rule.radius * n;
    if (n < 0) throw PreconditionError("lyapunov: n must be >= 0");
    if (!x.covers(-span, span))
        throw PreconditionError("lyapunov: window must cover [-2rn, 2rn]");
}

} // namespace

LyapunovRecord lyapunov_exact(const LocalRule& rule, const Window& x, int n,
                              std::uint64_t budget) {
    require_lyapunov_window(rule, x, n);
    LyapunovRecord rec;
    rec.n = n;
    rec.mode = LyapunovRecord::Mode::exact;
    if (n == 0 || rule.radius == 0) return rec;
    auto x_rows = evolve_rows(rule, x, n);
    rec.i_minus = minimal_insulation(rule, x_rows, x, n, -1, budget);
    rec.i_plus = minimal_insulation(rule, x_rows, x, n, +1, budget);
    return rec;
}

LyapunovRecord lyapunov_sampled(const LocalRule& rule, const Window& x, int n, int samples,
                                Rng& rng) {
    require_lyapunov_window(rule, x, n);
    LyapunovRecord rec;
    rec.n = n;
    rec.mode = LyapunovRecord::Mode::sampled_lower_bound;
    rec.samples = static_cast<std::uint64_t>(samples);
    if (n == 0 || rule.radius == 0) return rec;
    int rn = rule.radius * n;
    int k = rule.k();
    auto x_rows = evolve_rows(rule, x, n);

    for (int side : {-1, +1}) {
        int bound = 0;
        for (int s = 0; s < samples; ++s) {
            Rng sub = rng.substream(side < 0 ? 0x01 : 0x02, static_cast<std::uint64_t>(s));
            // Random re-fill of cells at distance >= d on the probed side.
            int d = 1 + sub.next_int(rn);
            Window y = x;
            int first_diff = 0;
            for (int c = d; c <= rn; ++c) {
                int coord = side < 0 ? c : -c;
                Symbol v = static_cast<Symbol>(sub.next_int(k));
                if (v != x.at(coord) && first_diff == 0) first_diff = c;
                y.at(coord) = v;
            }
            if (first_diff == 0) continue;

            Window cur = y;
            bool violated = false;
            for (int i = 1; i <= n && !violated; ++i) {
                cur = step(rule, cur);
                const Window& xr = x_rows[static_cast<std::size_t>(i)];
                int lo = side < 0 ? cur.lo() : 0;
                int hi = side < 0 ? 0 : cur.hi();
                for (int c = lo; c <= hi && !violated; ++c)
                    violated = cur.at(c) != xr.at(c);
            }
            // A violating witness first differing at distance f rules out
            // every insulation < f.
            if (violated) bound = std::max(bound, first_diff);
        }
        if (side < 0)
            rec.i_minus = bound;
        else
            rec.i_plus = bound;
    }
    return rec;
}

LyapunovRecord lyapunov_star(const LocalRule& rule, const Window& x, int p, int n,
                             std::uint64_t budget, Rng& rng) {
    require_lyapunov_window(rule, x, n);
    int clo = cone_lo(rule, p, n);
    int chi = cone_hi(rule, p, n);
    if (!x.covers(clo, chi)) throw PreconditionError("lyapunov star: cone not covered");

    LyapunovRecord best;
    best.n = n;
    best.mode = LyapunovRecord::Mode::exact;

    auto eval_member = [&](const Window& cone_word, std::uint64_t member_budget) {
        Window y = x;
        for (int c = clo; c <= chi; ++c) y.at(c) = cone_word.at(c);
        LyapunovRecord r = lyapunov_exact(rule, y, n, member_budget);
        best.i_plus = std::max(best.i_plus, r.i_plus);
        best.i_minus = std::max(best.i_minus, r.i_minus);
    };

    try {
        CountBudget enum_budget;
        enum_budget.dfs_nodes = budget;
        enum_budget.max_words = budget;
        auto members = enumerate_class_words(rule, x, p, n, enum_budget);
        for (const auto& w : members) eval_member(Window(clo, w), budget);
        return best;
    } catch (const BudgetError&) {
        // Fall through to the sampled path below.
    }

    // Resampling search over class members: uniform suffix proposals accepted
    // iff the itinerary is preserved. Exponents themselves drop to the
    // sampled mode so the result stays a lower bound.
    best.mode = LyapunovRecord::Mode::sampled_lower_bound;
    Trace target = trace_of(rule, x, p, n);
    Window member = x.slice(clo, chi);
    int k = rule.k();
    int iters = 256;
    int inner_samples = 64;
    best.samples = static_cast<std::uint64_t>(iters);
    auto eval_sampled = [&](const Window& cone_word, Rng& sub) {
        Window y = x;
        for (int c = clo; c <= chi; ++c) y.at(c) = cone_word.at(c);
        LyapunovRecord r = lyapunov_sampled(rule, y, n, inner_samples, sub);
        best.i_plus = std::max(best.i_plus, r.i_plus);
        best.i_minus = std::max(best.i_minus, r.i_minus);
    };
    {
        Rng sub = rng.substream(0x5a, 0);
        eval_sampled(member, sub);
    }
    for (int it = 1; it <= iters; ++it) {
        Rng sub = rng.substream(0x5a, static_cast<std::uint64_t>(it));
        Window proposal = member;
        int cut = clo + sub.next_int(chi - clo + 1);
        for (int c = cut; c <= chi; ++c) proposal.at(c) = static_cast<Symbol>(sub.next_int(k));
        Window y = x;
        for (int c = clo; c <= chi; ++c) y.at(c) = proposal.at(c);
        if (trace_matches(rule, y, target)) {
            member = proposal;
            eval_sampled(member, sub);
        }
    }
    return best;
}

AverageExponents average_exponents(const LocalRule& rule, const MeasureModel& m, int n,
                                   int samples, Rng& rng, std::uint64_t budget) {
    if (n < 1) throw PreconditionError("average exponents need n >= 1");
    if (m.k() != rule.k()) throw ConfigError("measure and rule alphabets differ");
    AverageExponents out;
    out.n = n;
    out.samples = samples;
    int span = 2 * rule.radius * n;
    double sp = 0.0, sp2 = 0.0, sm = 0.0, sm2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        Rng sub = rng.substream(0xae, static_cast<std::uint64_t>(s));
        Window x = m.sample_window(-span, 2 * span + 1, sub);
        LyapunovRecord rec;
        try {
            rec = lyapunov_exact(rule, x, n, budget);
        } catch (const BudgetError&) {
            rec = lyapunov_sampled(rule, x, n, 128, sub);
            out.all_exact = false;
        }
        double vp = static_cast<double>(rec.i_plus) / n;
        double vm = static_cast<double>(rec.i_minus) / n;
        sp += vp;
        sp2 += vp * vp;
        sm += vm;
        sm2 += vm * vm;
    }
    double inv = 1.0 / samples;
    out.plus = sp * inv;
    out.minus = sm * inv;
    if (samples > 1) {
        out.plus_stderr = std::sqrt(std::max(0.0, (sp2 * inv - out.plus * out.plus) / (samples - 1)));
        out.minus_stderr = std::sqrt(std::max(0.0, (sm2 * inv - out.minus * out.minus) / (samples - 1)));
    }
    return out;
}

} // namespace caflow
