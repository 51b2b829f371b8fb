#include "caflow/entropy.hpp"

#include <cmath>

namespace caflow {

EntropySeries entropy_F_estimate(const LocalRule& rule, const MeasureModel& m, int p,
                                 const std::vector<int>& n_values, const EntropyOptions& opts,
                                 Rng& rng) {
    if (n_values.empty()) throw PreconditionError("entropy estimate needs a non-empty n grid");
    EntropySeries series;
    series.p = p;
    series.n_values = n_values;

    {
        Rng sub = rng.substream(0x14);
        series.invariance =
            invariance_check(m, rule, 1, opts.invariance_samples, opts.invariance_tol, sub);
        series.invariance_warned = !series.invariance.pass;
    }

    for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
        int n = n_values[ni];
        int clo = cone_lo(rule, p, n);
        int chi = cone_hi(rule, p, n);
        double sum = 0.0, sum2 = 0.0;
        bool all_exact = true;
        int used = 0;
        for (int b = 0; b < opts.base_points; ++b) {
            Rng sub = rng.substream(0xe0 + static_cast<std::uint64_t>(ni),
                                    static_cast<std::uint64_t>(b));
            Window x = m.sample_window(clo, chi - clo + 1, sub);
            double log_mu;
            try {
                log_mu = class_log_measure_exact(rule, m, x, p, n, opts.budget);
            } catch (const BudgetError&) {
                McMeasure mc = class_measure_mc(rule, m, x, p, n, opts.mc_samples, sub);
                log_mu = mc.log_value;
                all_exact = false;
            }
            if (log_mu == kLogZero) continue; // excluded, tracked by `used`
            double v = -log_mu / static_cast<double>(n);
            sum += v;
            sum2 += v * v;
            ++used;
        }
        double mean = used > 0 ? sum / used : 0.0;
        series.values.push_back(mean);
        series.stderrs.push_back(
            used > 1 ? std::sqrt(std::max(0.0, (sum2 / used - mean * mean) / (used - 1))) : 0.0);
        series.exact.push_back(all_exact);
    }

    std::vector<double> xs;
    for (int n : n_values) xs.push_back(static_cast<double>(n));
    series.fit = fit_reciprocal(xs, series.values);
    if (!series.fit.ok) {
        series.fit.a = series.values.back();
    }
    return series;
}

SmbEstimate smb_entropy_estimate(const MeasureModel& m, int len, int samples, Rng& rng) {
    if (len < 1) throw PreconditionError("smb estimate needs len >= 1");
    SmbEstimate est;
    est.len = len;
    est.samples = samples;
    double sum = 0.0, sum2 = 0.0;
    int used = 0;
    for (int s = 0; s < samples; ++s) {
        Rng sub = rng.substream(0x53b, static_cast<std::uint64_t>(s));
        auto w = m.sample(len, sub);
        double lm = m.log_measure(w);
        if (lm == kLogZero) {
            ++est.excluded_zero_measure;
            continue;
        }
        double v = -lm / static_cast<double>(len);
        sum += v;
        sum2 += v * v;
        ++used;
    }
    if (used > 0) {
        est.value = sum / used;
        if (used > 1)
            est.stderr_est =
                std::sqrt(std::max(0.0, (sum2 / used - est.value * est.value) / (used - 1)));
    }
    return est;
}

} // namespace caflow
