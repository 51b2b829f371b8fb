#pragma once

#include <string>

#include "caflow/flow.hpp"

namespace caflow {

// Entropy identity / inequality checks. lhs is the extrapolated automaton
// entropy; rhs combines the closed-form shift entropy with either the
// average exponents (T1 bound) or the density flow (T2 families). Both
// sides are extrapolations and carry that flag.
struct TheoremReport {
    std::string theorem;  // "t1" | "t2i" | "t2ii" | "t2iii"
    std::string rule_label;
    std::string measure_label;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string relation; // "<=", "=", ">="
    double margin = 0.0;  // lhs - rhs
    double tolerance = 0.0;
    bool pass = false;
    bool extrapolated = true;
    double h_sigma = 0.0;
    double exponent_plus = 0.0;
    double exponent_minus = 0.0;
    double M_value = 0.0;
    std::string notes;
    std::uint64_t seed = 0;
};

struct TheoremOptions {
    std::vector<int> p_list{0, 1, 2, 3};
    std::vector<int> n_list{1, 2, 3};
    std::vector<double> delta_list{0.5, 0.25};
    int exponents_n = 2;
    int exponents_samples = 64;
    double rel_tolerance = 0.05; // equality checks: 5 percent
    EntropyOptions entropy;
    FlowOptions flow;
};

TheoremReport verify_theorem1(const LocalRule& rule, const MeasureModel& m,
                              const TheoremOptions& opts, Rng& rng);

// mode: "t2i" (equality under dominance), "t2ii" (inequality), "t2iii"
// (pointwise starred-exponent flow). For t2i the dominance of the velocity
// over the starred exponents is evidenced from sampled base points, or
// asserted from the radius bound when v >= (r, r); failing that the check
// downgrades to t2ii with a note.
TheoremReport verify_theorem2(const LocalRule& rule, const MeasureModel& m,
                              const VelocitySpec& velocity, const std::string& mode,
                              const TheoremOptions& opts, Rng& rng);

} // namespace caflow
