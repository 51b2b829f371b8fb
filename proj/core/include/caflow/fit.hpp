#pragma once

#include <vector>

namespace caflow {

// Least-squares fits of the convergence families the exact fixtures follow.
// Labeled extrapolations wherever they are reported.
struct FitResult {
    double a = 0.0; // fitted limit
    double b = 0.0;
    double c = 0.0; // shift (a + b/(x+c) family only)
    double rms_residual = 0.0;
    bool ok = false;
};

// y = a + b/x
FitResult fit_reciprocal(const std::vector<double>& x, const std::vector<double>& y);

// y = a + b/(x + c), c searched over a positive grid then refined
FitResult fit_shifted_reciprocal(const std::vector<double>& x, const std::vector<double>& y);

} // namespace caflow
