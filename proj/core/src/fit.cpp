#include "caflow/fit.hpp"

#include <cmath>
#include <limits>

namespace caflow {

namespace {

// Linear least squares for y = a + b * z.
FitResult linear_fit(const std::vector<double>& z, const std::vector<double>& y) {
    FitResult r;
    std::size_t n = z.size();
    if (n < 2) return r;
    double sz = 0, sy = 0, szz = 0, szy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sz += z[i];
        sy += y[i];
        szz += z[i] * z[i];
        szy += z[i] * y[i];
    }
    double det = static_cast<double>(n) * szz - sz * sz;
    if (std::abs(det) < 1e-15) return r;
    r.a = (szz * sy - sz * szy) / det;
    r.b = (static_cast<double>(n) * szy - sz * sy) / det;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (r.a + r.b * z[i]);
        ss += e * e;
    }
    r.rms_residual = std::sqrt(ss / static_cast<double>(n));
    r.ok = true;
    return r;
}

} // namespace

FitResult fit_reciprocal(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> z;
    z.reserve(x.size());
    for (double v : x) z.push_back(1.0 / v);
    return linear_fit(z, y);
}

FitResult fit_shifted_reciprocal(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2) return FitResult{};
    if (x.size() == 2) return fit_reciprocal(x, y);

    auto eval = [&](double c) {
        std::vector<double> z;
        z.reserve(x.size());
        for (double v : x) z.push_back(1.0 / (v + c));
        FitResult r = linear_fit(z, y);
        r.c = c;
        return r;
    };

    // Coarse grid over the shift, then golden-section refinement.
    FitResult best;
    best.rms_residual = std::numeric_limits<double>::infinity();
    for (double c = 0.0; c <= 16.0; c += 0.25) {
        FitResult r = eval(c);
        if (r.ok && r.rms_residual < best.rms_residual) best = r;
    }
    double lo = std::max(0.0, best.c - 0.25);
    double hi = best.c + 0.25;
    for (int it = 0; it < 48; ++it) {
        double m1 = lo + (hi - lo) * 0.382;
        double m2 = lo + (hi - lo) * 0.618;
        if (eval(m1).rms_residual < eval(m2).rms_residual)
            hi = m2;
        else
            lo = m1;
    }
    FitResult refined = eval(0.5 * (lo + hi));
    if (refined.ok && refined.rms_residual <= best.rms_residual) best = refined;
    return best;
}

} // namespace caflow
