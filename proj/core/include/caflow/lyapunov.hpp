#pragma once

#include <cstdint>

#include "caflow/measure.hpp"
#include "caflow/rule.hpp"
#include "caflow/trace.hpp"

namespace caflow {

// Insulation distances of the n-step dynamics at a point x:
//   i_minus = least s such that any modification of x confined to
//             coordinates > s leaves F^i(x) unchanged on coordinates <= 0
//             for every 1 <= i <= n;
//   i_plus  = symmetric for modifications confined to coordinates < -s,
//             protecting coordinates >= 0.
// Both are bounded by rn. Exact values quantify over every assignment in
// the finite influence cone; sampled records are witness-based lower bounds.
struct LyapunovRecord {
    int n = 0;
    int i_plus = 0;
    int i_minus = 0;
    enum class Mode { exact, sampled_lower_bound } mode = Mode::exact;
    std::uint64_t samples = 0;
};

// Default cap on enumerated cone assignments for one exact computation.
inline constexpr std::uint64_t kDefaultLyapunovBudget = 1ull << 24;

// Exact exponents. Requires x to cover [-2rn, 2rn]. Throws BudgetError when
// the per-candidate enumeration k^(rn-s) would exceed `budget`.
LyapunovRecord lyapunov_exact(const LocalRule& rule, const Window& x, int n,
                              std::uint64_t budget = kDefaultLyapunovBudget);

// Witness-tracking lower bound: random cone perturbations, difference fronts
// recorded. Never exceeds the exact record on the same input.
LyapunovRecord lyapunov_sampled(const LocalRule& rule, const Window& x, int n, int samples,
                                Rng& rng);

// Maximum of the exponents over representatives of x's trace class: cone
// words reproducing trace(x), embedded in x's own outer context. Exact when
// the class enumeration fits the budget, otherwise a sampled lower bound
// over class members found by resampling search.
LyapunovRecord lyapunov_star(const LocalRule& rule, const Window& x, int p, int n,
                             std::uint64_t budget, Rng& rng);

// Monte Carlo averages of I_n^{+-}/n over base points sampled from m.
struct AverageExponents {
    int n = 0;
    int samples = 0;
    double plus = 0.0;
    double minus = 0.0;
    double plus_stderr = 0.0;
    double minus_stderr = 0.0;
    bool all_exact = true; // false if any point fell back to the sampled mode
};

AverageExponents average_exponents(const LocalRule& rule, const MeasureModel& m, int n,
                                   int samples, Rng& rng,
                                   std::uint64_t budget = kDefaultLyapunovBudget);

} // namespace caflow
