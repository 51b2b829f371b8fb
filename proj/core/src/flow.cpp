#include "caflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "caflow/parallel.hpp"

namespace caflow {

namespace {

struct PointOutcome {
    FlowPoint point;
    bool excluded = false;
};

// Integrand at one base point: counts (filtered), the window cylinder
// log-measure, and the [0,1] clamp.
PointOutcome evaluate_point(const LocalRule& rule, const MeasureModel& m, const Window& x, int p,
                            int n, const GWindow& g, const DeltaFilter* filter,
                            const FlowOptions& opts, Rng& sub) {
    PointOutcome out;
    FlowPoint& pt = out.point;
    pt.g_minus = g.g_minus;
    pt.g_plus = g.g_plus;

    Window wslice = x.slice(g.word_lo(p), g.word_hi(p));
    double log_mu = m.log_measure(wslice);
    if (log_mu == kLogZero) {
        out.excluded = true;
        return out;
    }
    pt.window_log_measure = log_mu;
    double denom = -log_mu;

    WordCounts counts = count_window_words_auto(rule, m, x, p, n, g, filter, opts.budget, opts.mc,
                                                opts.exact_first, opts.mc_allowed, sub);
    pt.log_count = counts.count.log_value;
    pt.log_count_filtered = counts.count_filtered.log_value;
    pt.method = counts.method;
    pt.exact = counts.exact;
    pt.lower_bound = counts.lower_bound;

    double raw = 1.0 - pt.log_count_filtered / denom;
    if (raw < 0.0 || raw > 1.0) {
        pt.clamped = true;
        raw = std::clamp(raw, 0.0, 1.0);
    }
    pt.integrand = raw;
    return out;
}

FlowCell reduce_points(std::vector<PointOutcome>& outcomes, int p, int n, double delta,
                       const GWindow& g, double eta) {
    FlowCell cell;
    cell.p = p;
    cell.n = n;
    cell.delta = delta;
    cell.g = g;
    cell.eta = eta;
    double sum = 0.0, sum2 = 0.0;
    int used = 0;
    for (auto& oc : outcomes) {
        if (oc.excluded) {
            ++cell.excluded_zero_measure;
            continue;
        }
        const FlowPoint& pt = oc.point;
        sum += pt.integrand;
        sum2 += pt.integrand * pt.integrand;
        ++used;
        cell.clamp_events += pt.clamped ? 1 : 0;
        cell.exact = cell.exact && pt.exact;
        cell.lower_bound = cell.lower_bound || pt.lower_bound;
        cell.points.push_back(pt);
    }
    cell.samples = used;
    if (used > 0) {
        cell.M = sum / used;
        if (used > 1)
            cell.stderr_est = std::sqrt(std::max(0.0, (sum2 / used - cell.M * cell.M) / (used - 1)));
        // Exact integrands are x-independent for the closed-form fixtures;
        // any genuine spread is already in stderr_est.
    }
    return cell;
}

} // namespace

FlowCell flow_at(const LocalRule& rule, const MeasureModel& m, int p, int n, double delta,
                 const GWindow& g, const FlowOptions& opts, Rng& rng) {
    if (n < 1 || p < 0) throw PreconditionError("flow cell needs n >= 1, p >= 0");
    if (g.g_minus == 0 && g.g_plus == 0)
        throw PreconditionError("degenerate observation window: g- = g+ = 0");
    if (m.k() != rule.k()) throw ConfigError("measure and rule alphabets differ");

    Rng filter_rng = rng.substream(0xf117e2);
    DeltaFilter filter = build_delta_filter(m, p, n, g, delta, opts.filter_samples, filter_rng);

    int lo = std::min(cone_lo(rule, p, n), g.word_lo(p));
    int hi = std::max(cone_hi(rule, p, n), g.word_hi(p));

    std::vector<PointOutcome> outcomes(static_cast<std::size_t>(opts.base_points));
    // The exact/Monte-Carlo route depends on geometry, not on the base
    // point: decide it once so an over-budget instance pays the probe a
    // single time per cell.
    FlowOptions routed = opts;
    {
        Rng sub = rng.substream(0xf10a, 0);
        Window x = m.sample_window(lo, hi - lo + 1, sub);
        outcomes[0] = evaluate_point(rule, m, x, p, n, g, &filter, routed, sub);
        if (!outcomes[0].excluded && !outcomes[0].point.exact) routed.exact_first = false;
    }
    parallel_for(static_cast<std::size_t>(opts.base_points) - 1, opts.jobs, [&](std::size_t i) {
        std::size_t b = i + 1;
        Rng sub = rng.substream(0xf10a, static_cast<std::uint64_t>(b));
        Window x = m.sample_window(lo, hi - lo + 1, sub);
        outcomes[b] = evaluate_point(rule, m, x, p, n, g, &filter, routed, sub);
    });
    return reduce_points(outcomes, p, n, delta, g, filter.eta);
}

FlowCell flow_at_pointwise(const LocalRule& rule, const MeasureModel& m, int p, int n,
                           double delta, const FlowOptions& opts, Rng& rng) {
    if (n < 1 || p < 0) throw PreconditionError("flow cell needs n >= 1, p >= 0");
    if (m.k() != rule.k()) throw ConfigError("measure and rule alphabets differ");
    int rn = rule.radius * n;
    int lo = std::min(-2 * rn, -rn - p);
    int hi = std::max(2 * rn, rn + p);

    // Filters depend on the per-point window length; built once per length.
    std::map<int, DeltaFilter> filters;
    std::mutex filters_mu;
    auto filter_for = [&](const GWindow& g) -> const DeltaFilter* {
        int len = g.word_len(p);
        std::lock_guard<std::mutex> lk(filters_mu);
        auto it = filters.find(len);
        if (it == filters.end()) {
            Rng frng = rng.substream(0xf117e2, static_cast<std::uint64_t>(len));
            it = filters.emplace(len, build_delta_filter(m, p, n, g, delta, opts.filter_samples, frng))
                     .first;
        }
        return &it->second;
    };

    std::vector<PointOutcome> outcomes(static_cast<std::size_t>(opts.base_points));
    parallel_for(static_cast<std::size_t>(opts.base_points), opts.jobs, [&](std::size_t b) {
        Rng sub = rng.substream(0xf10b, static_cast<std::uint64_t>(b));
        Window x = m.sample_window(lo, hi - lo + 1, sub);
        LyapunovRecord star = lyapunov_star(rule, x, p, n, opts.star_budget, sub);
        double ratio = static_cast<double>(star.i_plus + star.i_minus) / static_cast<double>(n);
        if (star.i_plus + star.i_minus == 0) {
            PointOutcome oc;
            oc.point.integrand = 0.0;
            oc.point.star_ratio = 0.0;
            oc.point.exact = star.mode == LyapunovRecord::Mode::exact;
            outcomes[b] = oc;
            return;
        }
        GWindow g{star.i_plus, star.i_minus};
        PointOutcome oc = evaluate_point(rule, m, x, p, n, g, filter_for(g), opts, sub);
        oc.point.star_ratio = ratio;
        oc.point.integrand *= ratio;
        oc.point.exact = oc.point.exact && star.mode == LyapunovRecord::Mode::exact;
        outcomes[b] = oc;
    });
    FlowCell cell = reduce_points(outcomes, p, n, delta, GWindow{0, 0}, 0.0);
    cell.pointwise = true;
    return cell;
}

FlowSummary density_flow(const LocalRule& rule, const MeasureModel& m,
                         const std::vector<int>& p_list, const std::vector<int>& n_list,
                         const std::vector<double>& delta_list, const VelocitySpec& velocity,
                         const FlowOptions& opts, Rng& rng) {
    if (p_list.empty() || n_list.empty() || delta_list.empty())
        throw ConfigError("density flow needs non-empty p, n and delta grids");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw ConfigError("n grid must be increasing");
    for (std::size_t i = 1; i < delta_list.size(); ++i)
        if (delta_list[i] >= delta_list[i - 1]) throw ConfigError("delta grid must be decreasing");

    FlowSummary summary;
    for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
        for (std::size_t di = 0; di < delta_list.size(); ++di) {
            FlowCurve curve;
            curve.p = p_list[pi];
            curve.delta = delta_list[di];
            for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
                Rng cell_rng = rng.substream(0xce11, (pi << 16) | (di << 8) | ni);
                int n = n_list[ni];
                FlowCell cell =
                    velocity.is_pointwise()
                        ? flow_at_pointwise(rule, m, curve.p, n, curve.delta, opts, cell_rng)
                        : flow_at(rule, m, curve.p, n, curve.delta, velocity.resolve(n), opts,
                                  cell_rng);
                summary.exact = summary.exact && cell.exact;
                summary.lower_bound = summary.lower_bound || cell.lower_bound;
                summary.clamp_events += cell.clamp_events;
                curve.cells.push_back(std::move(cell));
            }
            std::vector<double> xs, ys;
            for (auto& c : curve.cells) {
                xs.push_back(static_cast<double>(c.n));
                ys.push_back(c.M);
            }
            curve.fit = fit_shifted_reciprocal(xs, ys);
            summary.curves.push_back(std::move(curve));
        }
    }

    double best_tail = -1.0;
    double smallest_delta = delta_list.back();
    for (auto& curve : summary.curves) {
        if (curve.delta != smallest_delta) continue;
        const FlowCell& tail = curve.cells.back();
        if (tail.M > best_tail) {
            best_tail = tail.M;
            summary.M_reported = tail.M;
            summary.M_reported_stderr = tail.stderr_est;
            summary.best_p = curve.p;
        }
        if (curve.fit.ok) {
            summary.M_fit = summary.has_fit ? std::max(summary.M_fit, curve.fit.a) : curve.fit.a;
            summary.has_fit = true;
        }
    }
    return summary;
}

} // namespace caflow
