#include "caflow/stability.hpp"

#include <cmath>

#include "caflow/trace.hpp"

namespace caflow {

StabilityEstimate bn_measure_estimate(const LocalRule& rule, const MeasureModel& m,
                                      const Window& x, int n, int horizon, int samples,
                                      Rng& rng) {
    if (n < 0 || horizon < 0) throw PreconditionError("bn estimate: n and horizon must be >= 0");
    int r = rule.radius;
    int lo = -n - r * horizon;
    int hi = n + r * horizon;
    if (!x.covers(lo, hi))
        throw PreconditionError("bn estimate: window must cover [-n-rh, n+rh]");

    // Reference rows of x on [-n, n].
    std::vector<std::vector<Symbol>> ref;
    {
        Window cur = x.slice(lo, hi);
        for (int i = 0; i <= horizon; ++i) {
            if (i > 0) cur = step(rule, cur);
            std::vector<Symbol> row;
            for (int c = -n; c <= n; ++c) row.push_back(cur.at(c));
            ref.push_back(std::move(row));
        }
    }

    Window center = x.slice(-n, n);
    double log_c = m.log_measure(center);
    double mu_c = std::exp(log_c);

    int hits = 0;
    for (int s = 0; s < samples; ++s) {
        Rng sub = rng.substream(0xb11, static_cast<std::uint64_t>(s));
        Window y = m.conditional_extension(center, lo, hi, sub);
        Window cur = y;
        bool ok = true;
        for (int i = 1; i <= horizon && ok; ++i) {
            cur = step(rule, cur);
            for (int c = -n; c <= n && ok; ++c)
                ok = cur.at(c) == ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(c + n)];
        }
        if (ok) ++hits;
    }

    StabilityEstimate est;
    est.n = n;
    est.horizon = horizon;
    est.samples = samples;
    est.hits = hits;
    double phat = static_cast<double>(hits) / static_cast<double>(samples);
    est.estimate = mu_c * phat;
    est.stderr_est = mu_c * std::sqrt(std::max(phat * (1.0 - phat), 1.0 / samples) /
                                      static_cast<double>(samples));
    return est;
}

ClassificationReport classify(const LocalRule& rule, const MeasureModel& m,
                              const ClassifyParams& params, Rng& rng) {
    ClassificationReport rep;
    rep.rule_label = rule.label;
    rep.measure_label = m.label();
    rep.params = params;
    rep.seed = rng.root_seed();

    int max_horizon = params.first_horizon << (params.horizons - 1);
    int lo = -params.n - rule.radius * max_horizon;
    int hi = params.n + rule.radius * max_horizon;

    bool any_stable = false;
    bool all_decayed = true;

    for (int b = 0; b < params.base_points; ++b) {
        Rng sub = rng.substream(0xc1a, static_cast<std::uint64_t>(b));
        ClassificationReport::PointCurve pc;
        pc.x = m.sample_window(lo, hi - lo + 1, sub);
        pc.cylinder_log_measure = m.log_measure(pc.x.slice(-params.n, params.n));
        for (int j = 0; j < params.horizons; ++j) {
            int h = params.first_horizon << j;
            Rng hs = sub.substream(0x40 + static_cast<std::uint64_t>(j));
            pc.curve.push_back(bn_measure_estimate(rule, m, pc.x, params.n, h, params.samples, hs));
        }

        // Stability: the last three horizon doublings keep the estimate
        // significant and essentially flat.
        std::size_t c = pc.curve.size();
        bool stable = c >= 3;
        for (std::size_t j = c - 3; j < c && stable; ++j) {
            const auto& e = pc.curve[j];
            stable = e.estimate >= 10.0 * e.stderr_est && e.estimate > 0.0;
        }
        if (stable)
            stable = pc.curve[c - 1].estimate >= 0.5 * pc.curve[c - 3].estimate;
        any_stable = any_stable || stable;

        double mu_c = std::exp(pc.cylinder_log_measure);
        bool decayed = pc.curve[c - 1].estimate <= params.attenuation * mu_c;
        all_decayed = all_decayed && decayed;

        rep.points.push_back(std::move(pc));
    }

    if (any_stable)
        rep.label = "equicontinuous-evidence";
    else if (all_decayed)
        rep.label = "expansive-evidence";
    else
        rep.label = "inconclusive";
    return rep;
}

} // namespace caflow
