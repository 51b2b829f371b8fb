#pragma once

#include "caflow/trace_count.hpp"

namespace caflow {

struct McCountOptions {
    int importance_samples = 20000;
    int min_hits = 8;            // below this the importance estimate is starved
    int completion_tries = 4;    // membership checks when the window misses cone cells
    int member_iters = 4000;     // resampling-chain proposals for the distinct-word route
    std::uint64_t max_distinct = 1u << 16;
};

// Monte Carlo word-set cardinalities over the observation window.
//
// Two estimators, selected by what the instance allows:
//  - importance: sample window words from the measure marginal and average
//    1/mu(word) over class members (exact membership when the window covers
//    the cone, completion-sampled otherwise). Unbiased for the number of
//    positive-measure members; the typical-set filter keeps the weights
//    flat, which is what controls the variance.
//  - members: a resampling chain over class members (suffix redraws from the
//    conditional law, accepted iff the itinerary is preserved) counting
//    distinct window words, with a Good-Turing coverage diagnostic. A hard
//    lower bound that converges on small classes.
struct McWordCounts {
    WordCounts counts;
    // members-route diagnostics
    double coverage = 0.0;        // 1 - singletons/draws
    bool complete = false;        // chain saw no new word over its last stretch
    int hits = 0;                 // importance-route member hits
};

McWordCounts count_window_words_mc(const LocalRule& rule, const MeasureModel& m, const Window& x,
                                   int p, int n, const GWindow& g, const DeltaFilter* filter,
                                   const McCountOptions& opts, Rng& rng);

// Exact-first policy: DP/enumeration inside the budget, Monte Carlo
// otherwise (unless mc_allowed is false, in which case BudgetError
// propagates).
WordCounts count_window_words_auto(const LocalRule& rule, const MeasureModel& m, const Window& x,
                                   int p, int n, const GWindow& g, const DeltaFilter* filter,
                                   const CountBudget& budget, const McCountOptions& opts,
                                   bool exact_first, bool mc_allowed, Rng& rng);

} // namespace caflow
