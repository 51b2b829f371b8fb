#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caflow/delta_filter.hpp"
#include "caflow/measure.hpp"
#include "caflow/trace.hpp"
#include "caflow/velocity.hpp"

namespace caflow {

// Definition-level ground truth for tiny instances: every cone word is
// enumerated, evolved with the plain stepper, and kept iff it reproduces
// trace(x). Shares no counting machinery with the DP on purpose.
struct OracleResult {
    int p = 0, n = 0;
    GWindow g;
    std::vector<std::vector<Symbol>> cone_words;   // class members on the cone
    std::vector<std::vector<Symbol>> window_words; // distinct restrictions (cone part)
    int excess = 0;                                // free window cells beyond the cone
    double log_count = 0.0;                        // #<T>, excess included
    std::uint64_t count = 0;
    bool count_exact_int = true;
    double class_log_measure = 0.0;
    double log_count_filtered = 0.0; // only when a filter was supplied
    std::uint64_t count_filtered = 0;
    bool filtered_valid = false;
    double integrand = 0.0; // 1 - log#<T_filtered> / (-log mu(x window))
};

inline constexpr std::uint64_t kOracleCap = 1ull << 26;

OracleResult enumerate_class(const LocalRule& rule, const MeasureModel& m, const Window& x,
                             int p, int n, const GWindow& g, const DeltaFilter* filter = nullptr,
                             std::uint64_t cap = kOracleCap);

// Randomized differential suite: small random instances compared across
// oracle enumeration, the exact DP, and the Monte Carlo estimators.
struct DifferentialReport {
    int instances = 0;
    int exact_mismatches = 0;
    int mc_cells = 0;
    int mc_within_4sigma = 0;
    std::vector<std::string> failures;
    bool pass() const {
        return exact_mismatches == 0 &&
               (mc_cells == 0 || mc_within_4sigma * 20 >= mc_cells * 19); // >= 95%
    }
};

DifferentialReport differential_suite(int instances, Rng& rng);

} // namespace caflow
