#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "caflow/delta_filter.hpp"
#include "caflow/measure.hpp"
#include "caflow/trace.hpp"
#include "caflow/velocity.hpp"

namespace caflow {

// Caps for the exact machinery. The dynamic-programming pass and the
// backtracking enumerator count their own work and abort with BudgetError
// when a cap is hit, so hopeless instances fail fast instead of thrashing.
struct CountBudget {
    std::uint64_t dp_transitions = 1ull << 26;
    std::uint64_t max_frontier = 1ull << 17;
    std::uint64_t dfs_nodes = 1ull << 26;
    std::uint64_t max_words = 1ull << 21;
    // Staircase states beyond this many symbols never fit any realistic
    // frontier; the exact machinery refuses them outright instead of
    // thrashing toward the dynamic caps.
    int max_state_symbols = 48;
};

// Cardinality that may exceed 64 bits: the natural log is always valid, the
// integer value only when exact_int is set.
struct ExtCount {
    double log_value = kLogZero;
    std::uint64_t value = 0;
    bool exact_int = false;

    static ExtCount from_u64(std::uint64_t v);
    // this * k^e
    ExtCount scale_pow(int k, int e) const;
};

// How a count/measure was obtained.
enum class CountMethod { dp_exact, enumeration, free_cells, mc_importance, mc_members };

// Exact count of cone words reproducing trace(x) (the class restricted to
// [-p-rn, p+rn]), by a column DP whose state is the trailing staircase of
// the space-time diagram. Requires x to cover the cone.
ExtCount class_cone_count(const LocalRule& rule, const Window& x, int p, int n,
                          const CountBudget& budget = {});

// Exact log mu(class): the DP accumulates chain weights when the model
// factorizes, otherwise every class word is enumerated and its cylinder
// measure summed. Throws BudgetError when neither path fits.
double class_log_measure_exact(const LocalRule& rule, const MeasureModel& m, const Window& x,
                               int p, int n, const CountBudget& budget = {});

// All distinct cone words of the class, in lexicographic order.
std::vector<std::vector<Symbol>> enumerate_class_words(const LocalRule& rule, const Window& x,
                                                       int p, int n,
                                                       const CountBudget& budget = {});
// Same, streamed.
void for_each_class_word(const LocalRule& rule, const Window& x, int p, int n,
                         const CountBudget& budget,
                         const std::function<void(const std::vector<Symbol>&)>& sink);

// Exact word-set cardinalities over the observation window.
struct WordCounts {
    ExtCount count;          // #<T^G_{n,p}(x)>
    ExtCount count_filtered; // after the typical-set filter; == count when no filter
    bool filtered_valid = false;
    CountMethod method = CountMethod::dp_exact;
    bool exact = true;
    bool lower_bound = false;
    double log_count_stderr = 0.0;
    double log_count_filtered_stderr = 0.0;
    std::uint64_t work = 0;
};

// Exact route. `filter` may be null. Throws BudgetError when the instance
// does not fit the exact machinery; callers fall back to the Monte Carlo
// estimators in mc_count.hpp.
WordCounts count_window_words(const LocalRule& rule, const MeasureModel& m, const Window& x,
                              int p, int n, const GWindow& g,
                              const DeltaFilter* filter = nullptr,
                              const CountBudget& budget = {});

// Monte Carlo estimate of mu(class): the probability that a window freshly
// sampled from m reproduces trace(x).
struct McMeasure {
    double log_value = kLogZero;
    double log_stderr = 0.0;
    int hits = 0;
    int samples = 0;
    bool lower_confidence = false; // zero hits: value is the Clopper upper bound's log
};

McMeasure class_measure_mc(const LocalRule& rule, const MeasureModel& m, const Window& x, int p,
                           int n, int samples, Rng& rng);

} // namespace caflow
