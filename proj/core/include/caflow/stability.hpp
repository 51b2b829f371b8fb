#pragma once

#include <string>
#include <vector>

#include "caflow/measure.hpp"
#include "caflow/rule.hpp"

namespace caflow {

// Upper-bound estimate of mu{ y : y agrees with x on [-n, n] and F^i(y)
// agrees with F^i(x) there for all i <= horizon }. Monotone non-increasing
// in the horizon; converges to the measure of the orbit-stability ball at
// resolution n. The central-cylinder factor is included.
struct StabilityEstimate {
    int n = 0;
    int horizon = 0;
    double estimate = 0.0;
    double stderr_est = 0.0;
    int samples = 0;
    int hits = 0;
};

StabilityEstimate bn_measure_estimate(const LocalRule& rule, const MeasureModel& m,
                                      const Window& x, int n, int horizon, int samples,
                                      Rng& rng);

// Evidence-based classification. Labels are evidence, never proofs:
//  - equicontinuous_evidence: some sampled point keeps its stability
//    estimates >= 10 sampling stderrs and stable across the last three
//    horizon doublings;
//  - expansive_evidence: every sampled point's estimate decays below the
//    attenuation threshold;
//  - inconclusive otherwise.
struct ClassifyParams {
    int n = 1;
    int base_points = 6;
    int horizons = 5;       // horizons h0 * 2^j, j = 0..horizons-1
    int first_horizon = 2;
    int samples = 4000;
    double attenuation = 1e-2; // expansive evidence: estimate <= attenuation * cylinder mass
};

struct ClassificationReport {
    std::string rule_label;
    std::string measure_label;
    std::string label; // "equicontinuous-evidence" | "expansive-evidence" | "inconclusive"
    ClassifyParams params;
    std::uint64_t seed = 0;
    struct PointCurve {
        Window x;
        double cylinder_log_measure = 0.0;
        std::vector<StabilityEstimate> curve;
    };
    std::vector<PointCurve> points;
};

ClassificationReport classify(const LocalRule& rule, const MeasureModel& m,
                              const ClassifyParams& params, Rng& rng);

} // namespace caflow
