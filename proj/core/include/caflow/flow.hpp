#pragma once

#include <optional>
#include <vector>

#include "caflow/entropy.hpp"
#include "caflow/fit.hpp"
#include "caflow/lyapunov.hpp"
#include "caflow/mc_count.hpp"

namespace caflow {

struct FlowOptions {
    int base_points = 48;
    int filter_samples = 20000;
    CountBudget budget;
    McCountOptions mc;
    bool exact_first = true;
    bool mc_allowed = true;
    std::uint64_t star_budget = 1ull << 22; // pointwise velocity: starred-exponent budget
    int jobs = 0;                           // 0 = hardware concurrency
};

// One base point of one grid cell.
struct FlowPoint {
    double integrand = 0.0;
    bool clamped = false;
    double log_count = 0.0;
    double log_count_filtered = 0.0;
    double window_log_measure = 0.0; // log mu of x's window cylinder
    CountMethod method = CountMethod::dp_exact;
    bool exact = true;
    bool lower_bound = false;
    int g_minus = 0, g_plus = 0; // per-point for the pointwise velocity
    double star_ratio = 1.0;     // (i+* + i-*)/n multiplier in pointwise mode
};

// Monte Carlo average of the clamped integrand
//   1 - log #<T^G_{n,delta,p}(x)> / (-log mu(window cylinder of x))
// over base points x, for one (p, n, delta) and a resolved window.
struct FlowCell {
    int p = 0, n = 0;
    double delta = 0.0;
    GWindow g;
    double eta = 0.0;
    double M = 0.0;
    double stderr_est = 0.0;
    int samples = 0;
    int clamp_events = 0;
    int excluded_zero_measure = 0;
    bool exact = true;       // every point used an exact count
    bool lower_bound = false;
    bool pointwise = false;
    std::vector<FlowPoint> points;
};

FlowCell flow_at(const LocalRule& rule, const MeasureModel& m, int p, int n, double delta,
                 const GWindow& g, const FlowOptions& opts, Rng& rng);

// Pointwise window per base point: (g-, g+) = (i+*, i-*) with the integrand
// multiplied by (i+* + i-*)/n. A point with both starred exponents zero
// contributes zero rather than a degenerate window.
FlowCell flow_at_pointwise(const LocalRule& rule, const MeasureModel& m, int p, int n,
                           double delta, const FlowOptions& opts, Rng& rng);

struct FlowCurve {
    int p = 0;
    double delta = 0.0;
    std::vector<FlowCell> cells; // along the n grid
    FitResult fit;               // a + b/(n+c) through the curve, an extrapolation
};

// Grid sweep and aggregation. The reported M is the max over p of the
// smallest-delta curve's tail value; the fitted limit is reported separately.
struct FlowSummary {
    std::vector<FlowCurve> curves;
    double M_reported = 0.0;
    double M_reported_stderr = 0.0;
    double M_fit = 0.0; // max over p of the smallest-delta curve's fitted limit
    bool has_fit = false;
    int best_p = 0;
    bool exact = true;
    bool lower_bound = false;
    int clamp_events = 0;

    bool fit_valid() const { return has_fit; }
};

FlowSummary density_flow(const LocalRule& rule, const MeasureModel& m,
                         const std::vector<int>& p_list, const std::vector<int>& n_list,
                         const std::vector<double>& delta_list, const VelocitySpec& velocity,
                         const FlowOptions& opts, Rng& rng);

} // namespace caflow
