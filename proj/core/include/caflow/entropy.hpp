#pragma once

#include <vector>

#include "caflow/fit.hpp"
#include "caflow/measure.hpp"
#include "caflow/trace_count.hpp"

namespace caflow {

// Per-n entropy data for the automaton with respect to the (2p+1)-block
// partition: averages of -(1/n) log mu(class(x, p, n)) over sampled base
// points. The reported headline is the a + b/n extrapolation; each finite-n
// value carries its method (exact class measure vs Monte Carlo).
struct EntropySeries {
    int p = 0;
    std::vector<int> n_values;
    std::vector<double> values;
    std::vector<double> stderrs;
    std::vector<bool> exact;
    FitResult fit;       // a + b/n; fit.a is the reported h(F, alpha_p)
    InvarianceReport invariance;
    bool invariance_warned = false;
};

struct EntropyOptions {
    int base_points = 48;
    int mc_samples = 20000;
    CountBudget budget;
    int invariance_samples = 20000;
    double invariance_tol = 0.02;
};

EntropySeries entropy_F_estimate(const LocalRule& rule, const MeasureModel& m, int p,
                                 const std::vector<int>& n_values, const EntropyOptions& opts,
                                 Rng& rng);

// Empirical per-symbol log-measure of long sampled blocks: converges to the
// shift entropy and cross-checks the closed forms.
struct SmbEstimate {
    int len = 0;
    int samples = 0;
    double value = 0.0;
    double stderr_est = 0.0;
    int excluded_zero_measure = 0;
};

SmbEstimate smb_entropy_estimate(const MeasureModel& m, int len, int samples, Rng& rng);

} // namespace caflow
