#pragma once

#include <cmath>

#include "caflow/measure.hpp"
#include "caflow/velocity.hpp"

namespace caflow {

// Typical-set filter: a word of length `word_len` passes when its per-symbol
// log-measure deviates from h(sigma) by at most eta. eta is the empirical
// (1-delta)-quantile of that deviation over windows sampled from the model,
// so the retained words carry empirical mass >= 1-delta. Measure-zero words
// never pass.
struct DeltaFilter {
    double delta = 0.0;
    int p = 0;
    GWindow g;
    int word_len = 1;
    double eta = 0.0;
    double h_ref = 0.0;
    bool analytic = false; // equal-weight models: eta = 0 without sampling

    double deviation(double log_mu) const {
        if (log_mu == kLogZero) return std::numeric_limits<double>::infinity();
        return std::abs(-log_mu / static_cast<double>(word_len) - h_ref);
    }
    bool passes(double log_mu) const { return deviation(log_mu) <= eta + 1e-12; }
};

DeltaFilter build_delta_filter(const MeasureModel& m, int p, int n, const GWindow& g,
                               double delta, int samples, Rng& rng);

} // namespace caflow
