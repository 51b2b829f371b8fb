#include <doctest.h>

#include <cmath>

#include "caflow/catalog.hpp"
#include "caflow/flow.hpp"
#include "caflow/theorems.hpp"

using namespace caflow;

namespace {

FlowOptions quick_opts(int base_points = 16) {
    FlowOptions opts;
    opts.base_points = base_points;
    opts.filter_samples = 4000;
    return opts;
}

constexpr double kLog2 = 0.6931471805599453;

} // namespace

TEST_CASE("flow cells with closed forms") {
    auto u2 = MeasureModel::uniform(2);

    // left shift, p=0, n=6, v=(1,1): count 2^6 over a 13-cell window
    Rng r1(401);
    FlowCell shift_cell =
        flow_at(catalog_rule("shift"), u2, 0, 6, 0.25, GWindow{6, 6}, quick_opts(), r1);
    CHECK(shift_cell.exact);
    CHECK(shift_cell.M == doctest::Approx(7.0 / 13.0).epsilon(1e-12));
    CHECK(shift_cell.stderr_est < 1e-8);

    // rule 90: saturated at p=1, half flow at p=0
    Rng r2(403);
    FlowCell r90_p1 =
        flow_at(elementary_rule(90), u2, 1, 4, 0.25, GWindow{4, 4}, quick_opts(), r2);
    CHECK(r90_p1.M == doctest::Approx(1.0).epsilon(1e-12));
    Rng r3(405);
    FlowCell r90_p0 =
        flow_at(elementary_rule(90), u2, 0, 4, 0.25, GWindow{4, 4}, quick_opts(), r3);
    CHECK(r90_p0.M == doctest::Approx(1.0 - 4.0 / 9.0).epsilon(1e-12));

    // identity: integrand 1/(2g+1) at p=0
    Rng r4(407);
    FlowCell id_cell =
        flow_at(identity_rule(2), u2, 0, 3, 0.25, GWindow{5, 5}, quick_opts(), r4);
    CHECK(id_cell.M == doctest::Approx(1.0 / 11.0).epsilon(1e-12));

    // degenerate window is an error, not 0/0
    Rng r5(409);
    CHECK_THROWS_AS(
        flow_at(identity_rule(2), u2, 0, 3, 0.25, GWindow{0, 0}, quick_opts(), r5),
        PreconditionError);
}

TEST_CASE("product-of-shifts flow curves and aggregation") {
    LocalRule prod2 = catalog_rule("prod2");
    auto mm = preset_measure("uniform_x_uniform", 4);
    VelocitySpec v22 = VelocitySpec::linear(Rational(2, 1), Rational(2, 1));
    Rng rng(411);
    FlowSummary summary =
        density_flow(prod2, mm, {0, 1}, {1, 2, 3}, {0.5, 0.25}, v22, quick_opts(8), rng);

    for (const auto& curve : summary.curves) {
        for (const auto& cell : curve.cells) {
            double expect = curve.p >= 1
                                ? 1.0 - 5.0 * cell.n / (8.0 * cell.n + 4.0 * curve.p + 2.0)
                                : 1.0 - 6.0 * cell.n / (8.0 * cell.n + 2.0);
            CHECK(cell.M == doctest::Approx(expect).epsilon(1e-12));
            CHECK(cell.exact);
        }
        if (curve.p == 1) CHECK(curve.fit.a == doctest::Approx(3.0 / 8.0).epsilon(1e-6));
        if (curve.p == 0) CHECK(curve.fit.a == doctest::Approx(1.0 / 4.0).epsilon(1e-6));
    }
    // Reported tail: the p=1 curve at n=3; fitted limit 3/8.
    CHECK(summary.best_p == 1);
    CHECK(summary.M_reported == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(summary.M_fit == doctest::Approx(3.0 / 8.0).epsilon(1e-6));
}

TEST_CASE("velocity overshoot: (v+ + v-) * M agrees across dominating velocities") {
    auto u2 = MeasureModel::uniform(2);
    LocalRule shift = catalog_rule("shift");
    Rng r1(413);
    FlowSummary f11 = density_flow(shift, u2, {0}, {1, 2, 3, 4, 5, 6}, {0.25},
                                   VelocitySpec::linear(Rational(1, 1), Rational(1, 1)),
                                   quick_opts(8), r1);
    Rng r2(415);
    FlowSummary f22 = density_flow(shift, u2, {0}, {1, 2, 3, 4, 5, 6}, {0.25},
                                   VelocitySpec::linear(Rational(2, 1), Rational(2, 1)),
                                   quick_opts(8), r2);
    CHECK(2.0 * f11.M_fit == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(4.0 * f22.M_fit == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sublinear velocities resolve and decay for identity-like rules") {
    auto u2 = MeasureModel::uniform(2);
    VelocitySpec sub = VelocitySpec::sublinear_pow(2.0, 0.5);
    GWindow g36 = sub.resolve(36);
    CHECK(g36.g_minus == 12);
    CHECK(g36.g_plus == 12);

    Rng rng(417);
    FlowSummary f = density_flow(identity_rule(2), u2, {0, 1}, {16, 64, 256}, {0.25}, sub,
                                 quick_opts(8), rng);
    // p=1 tail at n=256: g=32, integrand 3/(64+3)
    CHECK(f.M_reported == doctest::Approx(3.0 / 67.0).epsilon(1e-9));
    for (const auto& curve : f.curves) {
        double prev = 1.0;
        for (const auto& cell : curve.cells) {
            CHECK(cell.M <= prev + 1e-12);
            prev = cell.M;
        }
    }
}

TEST_CASE("pointwise flow: shift saturates, identity vanishes") {
    auto u2 = MeasureModel::uniform(2);
    Rng r1(419);
    FlowOptions opts = quick_opts(8);
    FlowCell shift_cell = flow_at_pointwise(catalog_rule("shift"), u2, 1, 3, 0.25, opts, r1);
    CHECK(shift_cell.pointwise);
    CHECK(shift_cell.M == doctest::Approx(1.0).epsilon(1e-9));

    Rng r2(421);
    FlowCell id_cell = flow_at_pointwise(identity_rule(2), u2, 1, 3, 0.25, opts, r2);
    CHECK(id_cell.M == 0.0);
}

TEST_CASE("entropy series closed forms") {
    EntropyOptions opts;
    opts.base_points = 12;
    opts.invariance_samples = 4000;

    auto u2 = MeasureModel::uniform(2);
    Rng r1(423);
    EntropySeries id_series =
        entropy_F_estimate(identity_rule(2), u2, 2, {1, 2, 3, 4}, opts, r1);
    for (double v : id_series.values)
        CHECK(v > 0.0); // (2p+1) log 2 / n before extrapolation
    CHECK(id_series.fit.a == doctest::Approx(0.0).epsilon(1e-9));

    Rng r2(425);
    EntropySeries shift_series =
        entropy_F_estimate(catalog_rule("shift"), u2, 1, {1, 2, 3, 4}, opts, r2);
    // -(1/n) log mu = (n + 2p + 1)/n * log 2, an exact a + b/n family
    for (std::size_t i = 0; i < shift_series.values.size(); ++i) {
        int n = shift_series.n_values[i];
        CHECK(shift_series.values[i] ==
              doctest::Approx((n + 3.0) / n * kLog2).epsilon(1e-10));
    }
    CHECK(shift_series.fit.a == doctest::Approx(kLog2).epsilon(1e-8));

    LocalRule prod2 = catalog_rule("prod2");
    auto mm = preset_measure("uniform_x_uniform", 4);
    Rng r3(427);
    EntropySeries prod_series = entropy_F_estimate(prod2, mm, 3, {1, 2, 3}, opts, r3);
    CHECK(prod_series.fit.a == doctest::Approx(3.0 * kLog2).epsilon(1e-8));
    CHECK(prod_series.invariance.pass);
}

TEST_CASE("smb block estimates meet the closed forms") {
    Rng rng(429);
    auto u2 = MeasureModel::uniform(2);
    SmbEstimate eu = smb_entropy_estimate(u2, 512, 1500, rng);
    CHECK(std::abs(eu.value - kLog2) < 0.02 * kLog2);

    auto b = MeasureModel::bernoulli({Rational(1, 3), Rational(2, 3)});
    Rng r2 = rng.substream(1);
    SmbEstimate eb = smb_entropy_estimate(b, 512, 1500, r2);
    CHECK(std::abs(eb.value - b.shift_entropy()) < 0.02 * b.shift_entropy());

    auto mk = preset_measure("markov_9_1", 2);
    Rng r3 = rng.substream(2);
    SmbEstimate em = smb_entropy_estimate(mk, 512, 1500, r3);
    CHECK(std::abs(em.value - mk.shift_entropy()) < 0.02 * mk.shift_entropy());
}

TEST_CASE("theorem 1 on the reference fixtures") {
    TheoremOptions opts;
    opts.entropy.base_points = 12;
    opts.entropy.invariance_samples = 4000;
    opts.flow = quick_opts(8);

    LocalRule prod2 = catalog_rule("prod2");
    auto mm = preset_measure("uniform_x_uniform", 4);
    Rng r1(431);
    TheoremReport t1 = verify_theorem1(prod2, mm, opts, r1);
    CHECK(t1.pass);
    CHECK(t1.lhs == doctest::Approx(3.0 * kLog2).epsilon(1e-6));
    CHECK(t1.rhs == doctest::Approx(4.0 * kLog2).epsilon(1e-6));
    // Strict gap of log 2.
    CHECK(std::abs(-t1.margin - kLog2) < 0.1 * kLog2);

    auto u2 = MeasureModel::uniform(2);
    Rng r2(433);
    TheoremReport t1_id = verify_theorem1(identity_rule(2), u2, opts, r2);
    CHECK(t1_id.pass);
    CHECK(t1_id.lhs == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(t1_id.rhs == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("theorem 2 equality and inequality modes") {
    TheoremOptions opts;
    opts.entropy.base_points = 12;
    opts.entropy.invariance_samples = 4000;
    opts.flow = quick_opts(8);

    LocalRule prod2 = catalog_rule("prod2");
    auto mm = preset_measure("uniform_x_uniform", 4);
    Rng r1(435);
    TheoremReport t2i = verify_theorem2(
        prod2, mm, VelocitySpec::linear(Rational(2, 1), Rational(2, 1)), "t2i", opts, r1);
    CHECK(t2i.pass);
    CHECK(t2i.lhs == doctest::Approx(3.0 * kLog2).epsilon(1e-6));
    CHECK(t2i.rhs == doctest::Approx(3.0 * kLog2).epsilon(1e-5));
    CHECK(t2i.relation == "=");

    auto u2 = MeasureModel::uniform(2);
    Rng r2(437);
    opts.n_list = {1, 2, 3, 4, 5, 6};
    TheoremReport t2i_shift = verify_theorem2(
        catalog_rule("shift"), u2, VelocitySpec::linear(Rational(1, 1), Rational(1, 1)), "t2i",
        opts, r2);
    CHECK(t2i_shift.pass);
    CHECK(t2i_shift.lhs == doctest::Approx(kLog2).epsilon(1e-5));
    CHECK(t2i_shift.rhs == doctest::Approx(kLog2).epsilon(1e-4));

    // Deliberately small velocity: only the inequality direction survives.
    Rng r3(439);
    TheoremReport t2ii = verify_theorem2(
        catalog_rule("shift"), u2, VelocitySpec::linear(Rational(1, 4), Rational(1, 4)), "t2ii",
        opts, r3);
    CHECK(t2ii.pass);
    CHECK(t2ii.relation == ">=");
    CHECK(t2ii.lhs > t2ii.rhs);

    // Pointwise mode: equality through the starred-exponent windows.
    Rng r4(441);
    opts.n_list = {1, 2, 3};
    TheoremReport t2iii = verify_theorem2(catalog_rule("shift"), u2, VelocitySpec::pointwise(),
                                          "t2iii", opts, r4);
    CHECK(t2iii.pass);
    CHECK(t2iii.lhs == doctest::Approx(kLog2).epsilon(1e-5));
    CHECK(t2iii.M_value == doctest::Approx(1.0).epsilon(1e-6));

    Rng r5(443);
    TheoremReport t2iii_id = verify_theorem2(identity_rule(2), u2, VelocitySpec::pointwise(),
                                             "t2iii", opts, r5);
    CHECK(t2iii_id.pass);
    CHECK(t2iii_id.M_value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("worker count does not change results") {
    LocalRule prod2 = catalog_rule("prod2");
    auto mm = preset_measure("uniform_x_uniform", 4);
    VelocitySpec v = VelocitySpec::linear(Rational(2, 1), Rational(2, 1));

    FlowOptions serial = quick_opts(12);
    serial.jobs = 1;
    FlowOptions parallel = quick_opts(12);
    parallel.jobs = 4;

    Rng r1(445);
    FlowSummary a = density_flow(prod2, mm, {0, 1}, {1, 2}, {0.25}, v, serial, r1);
    Rng r2(445);
    FlowSummary b = density_flow(prod2, mm, {0, 1}, {1, 2}, {0.25}, v, parallel, r2);

    REQUIRE(a.curves.size() == b.curves.size());
    for (std::size_t i = 0; i < a.curves.size(); ++i) {
        REQUIRE(a.curves[i].cells.size() == b.curves[i].cells.size());
        for (std::size_t j = 0; j < a.curves[i].cells.size(); ++j) {
            CHECK(a.curves[i].cells[j].M == b.curves[i].cells[j].M);
            CHECK(a.curves[i].cells[j].stderr_est == b.curves[i].cells[j].stderr_est);
        }
    }
    CHECK(a.M_reported == b.M_reported);
}

TEST_CASE("mixed-measure flow stays in range and flags monte carlo modes") {
    LocalRule rule = catalog_rule("id_x_shift2");
    auto m = preset_measure("uniform_x_sturmian", 4);
    FlowOptions opts = quick_opts(6);
    opts.mc.importance_samples = 12000;
    Rng rng(447);
    FlowCell cell = flow_at(rule, m, 0, 2, 0.25, GWindow{4, 4}, opts, rng);
    CHECK(cell.M >= 0.0);
    CHECK(cell.M <= 1.0);
    CHECK(cell.samples > 0);
}
