#include "caflow/delta_filter.hpp"

#include <algorithm>

namespace caflow {

DeltaFilter build_delta_filter(const MeasureModel& m, int p, int n, const GWindow& g,
                               double delta, int samples, Rng& rng) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    (void)n;
    DeltaFilter f;
    f.delta = delta;
    f.p = p;
    f.g = g;
    f.word_len = g.word_len(p);
    f.h_ref = m.shift_entropy();
    if (m.equal_weight_cylinders()) {
        f.eta = 0.0;
        f.analytic = true;
        return f;
    }
    std::vector<double> devs;
    devs.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        Rng sub = rng.substream(0xdf, static_cast<std::uint64_t>(s));
        auto w = m.sample(f.word_len, sub);
        devs.push_back(f.deviation(m.log_measure(w)));
    }
    std::sort(devs.begin(), devs.end());
    // Smallest eta whose empirical pass mass is >= 1-delta.
    std::size_t idx = static_cast<std::size_t>(
        std::ceil((1.0 - delta) * static_cast<double>(samples))) - 1;
    idx = std::min(idx, devs.size() - 1);
    f.eta = devs[idx];
    return f;
}

} // namespace caflow
