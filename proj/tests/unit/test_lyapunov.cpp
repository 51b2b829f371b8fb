#include <doctest.h>

#include <cmath>

#include "caflow/catalog.hpp"
#include "caflow/lyapunov.hpp"
#include "caflow/stability.hpp"
#include "caflow/trace.hpp"

using namespace caflow;

namespace {

Window random_window(const LocalRule& rule, int n, Rng& rng, int extra = 0) {
    int span = 2 * rule.radius * n + extra;
    Window w(-span, {});
    for (int i = 0; i < 2 * span + 1; ++i)
        w.cells.push_back(static_cast<Symbol>(rng.next_int(rule.k())));
    return w;
}

// Definition-level insulation oracle: no binary search, no early pruning.
// For each candidate s from 0 upward, enumerate every assignment of the
// coordinates beyond the insulation (the full influence cone) and evolve.
int oracle_insulation(const LocalRule& rule, const Window& x, int n, int side) {
    int rn = rule.radius * n;
    std::vector<Window> xr;
    xr.push_back(x);
    for (int i = 1; i <= n; ++i) xr.push_back(step(rule, xr.back()));

    for (int s = 0; s <= rn; ++s) {
        std::vector<int> cells;
        if (side < 0) {
            for (int c = s + 1; c <= rn; ++c) cells.push_back(c);
        } else {
            for (int c = -rn; c <= -s - 1; ++c) cells.push_back(c);
        }
        bool valid = true;
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < cells.size(); ++i) total *= static_cast<std::uint64_t>(rule.k());
        for (std::uint64_t a = 0; a < total && valid; ++a) {
            Window y = x;
            std::uint64_t rest = a;
            for (int c : cells) {
                y.at(c) = static_cast<Symbol>(rest % static_cast<std::uint64_t>(rule.k()));
                rest /= static_cast<std::uint64_t>(rule.k());
            }
            Window cur = y;
            for (int i = 1; i <= n && valid; ++i) {
                cur = step(rule, cur);
                int lo = side < 0 ? cur.lo() : 0;
                int hi = side < 0 ? 0 : cur.hi();
                for (int c = lo; c <= hi && valid; ++c)
                    valid = cur.at(c) == xr[static_cast<std::size_t>(i)].at(c);
            }
        }
        if (valid) return s;
    }
    return rn;
}

} // namespace

TEST_CASE("exact exponents on the reference rules") {
    Rng rng(101);
    LocalRule id = identity_rule(2);
    LocalRule shift = catalog_rule("shift");
    LocalRule r90 = elementary_rule(90);

    for (int n = 1; n <= 8; ++n) {
        Window x = random_window(id, n, rng);
        LyapunovRecord rec = lyapunov_exact(id, x, n);
        CHECK(rec.i_plus == 0);
        CHECK(rec.i_minus == 0);
    }
    for (int n = 1; n <= 8; ++n) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(n));
        Window x = random_window(shift, n, sub);
        LyapunovRecord rec = lyapunov_exact(shift, x, n);
        CHECK(rec.i_plus == 0);
        CHECK(rec.i_minus == n);
    }
    // Mirror image: the right shift insulates on the left.
    LocalRule rshift = catalog_rule("rshift");
    for (int n = 1; n <= 6; ++n) {
        Rng sub = rng.substream(100 + static_cast<std::uint64_t>(n));
        Window x = random_window(rshift, n, sub);
        LyapunovRecord rec = lyapunov_exact(rshift, x, n);
        CHECK(rec.i_plus == n);
        CHECK(rec.i_minus == 0);
    }
    for (int n = 1; n <= 5; ++n) {
        Rng sub = rng.substream(200 + static_cast<std::uint64_t>(n));
        Window x = random_window(r90, n, sub);
        LyapunovRecord rec = lyapunov_exact(r90, x, n);
        CHECK(rec.i_plus == n);
        CHECK(rec.i_minus == n);
    }
}

TEST_CASE("exact exponents agree with the definition oracle") {
    Rng rng(103);
    for (int trial = 0; trial < 40; ++trial) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
        LocalRule rule = elementary_rule(static_cast<int>(sub.next_below(256)));
        int n = 1 + sub.next_int(3);
        Window x = random_window(rule, n, sub);
        LyapunovRecord rec = lyapunov_exact(rule, x, n);
        CHECK(rec.i_minus == oracle_insulation(rule, x, n, -1));
        CHECK(rec.i_plus == oracle_insulation(rule, x, n, +1));
        CHECK(rec.i_minus <= rule.radius * n);
        CHECK(rec.i_plus <= rule.radius * n);
    }
}

TEST_CASE("sampled records never exceed exact ones") {
    Rng rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
        LocalRule rule = elementary_rule(static_cast<int>(sub.next_below(256)));
        int n = 1 + sub.next_int(4);
        Window x = random_window(rule, n, sub);
        LyapunovRecord exact = lyapunov_exact(rule, x, n);
        Rng srng = sub.substream(9);
        LyapunovRecord sampled = lyapunov_sampled(rule, x, n, 48, srng);
        CHECK(sampled.mode == LyapunovRecord::Mode::sampled_lower_bound);
        CHECK(sampled.i_plus <= exact.i_plus);
        CHECK(sampled.i_minus <= exact.i_minus);
    }
    // A single witness touching coordinate n recovers the shift's exact value.
    LocalRule shift = catalog_rule("shift");
    Rng srng(11);
    Window x = random_window(shift, 5, srng);
    LyapunovRecord sampled = lyapunov_sampled(shift, x, 5, 256, srng);
    CHECK(sampled.i_minus == 5);
    CHECK(sampled.i_plus == 0);
}

TEST_CASE("exponents are monotone in n") {
    Rng rng(109);
    for (int trial = 0; trial < 20; ++trial) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
        LocalRule rule = elementary_rule(static_cast<int>(sub.next_below(256)));
        int n_max = 4;
        Window x = random_window(rule, n_max, sub);
        int prev_plus = 0, prev_minus = 0;
        for (int n = 1; n <= n_max; ++n) {
            LyapunovRecord rec = lyapunov_exact(rule, x, n);
            CHECK(rec.i_plus >= prev_plus);
            CHECK(rec.i_minus >= prev_minus);
            prev_plus = rec.i_plus;
            prev_minus = rec.i_minus;
        }
    }
}

TEST_CASE("cone containment: the starred insulation block forces the trace") {
    // Fixing [-i_plus_star, i_minus_star] pins the central itinerary: any
    // perturbation confined to the outside leaves every row unchanged. The
    // class-maximized exponents are required here; a left-perturbed class
    // member can be more right-sensitive than the base point itself.
    Rng rng(113);
    for (int trial = 0; trial < 25; ++trial) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
        LocalRule rule = elementary_rule(static_cast<int>(sub.next_below(256)));
        int n = 1 + sub.next_int(2);
        const int p = 0;
        Window x = random_window(rule, n, sub, 2);
        LyapunovRecord star = lyapunov_star(rule, x, p, n, 1u << 22, sub);
        REQUIRE(star.mode == LyapunovRecord::Mode::exact);
        Trace target = trace_of(rule, x, p, n);

        int lo = -star.i_plus;
        int hi = star.i_minus;
        int clo = cone_lo(rule, p, n);
        int chi = cone_hi(rule, p, n);
        std::vector<int> free_cells;
        for (int c = clo; c <= chi; ++c)
            if (c < lo || c > hi) free_cells.push_back(c);
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < free_cells.size(); ++i)
            total *= static_cast<std::uint64_t>(rule.k());
        if (total > (1u << 18)) continue;
        for (std::uint64_t a = 0; a < total; ++a) {
            Window y = x;
            std::uint64_t rest = a;
            for (int c : free_cells) {
                y.at(c) = static_cast<Symbol>(rest % static_cast<std::uint64_t>(rule.k()));
                rest /= static_cast<std::uint64_t>(rule.k());
            }
            CHECK(trace_matches(rule, y, target));
        }
    }
}

TEST_CASE("starred exponents") {
    Rng rng(127);
    LocalRule id = identity_rule(2);
    Window xi = random_window(id, 4, rng, 4);
    LyapunovRecord ri = lyapunov_star(id, xi, 1, 4, 1u << 20, rng);
    CHECK(ri.i_plus == 0);
    CHECK(ri.i_minus == 0);
    CHECK(ri.mode == LyapunovRecord::Mode::exact);

    LocalRule shift = catalog_rule("shift");
    Rng s2 = rng.substream(2);
    Window xs = random_window(shift, 3, s2);
    LyapunovRecord rs = lyapunov_star(shift, xs, 0, 3, 1u << 20, s2);
    CHECK(rs.i_plus == 0);
    CHECK(rs.i_minus == 3);

    LocalRule prod2 = catalog_rule("prod2");
    Rng s3 = rng.substream(3);
    Window xp = random_window(prod2, 2, s3);
    LyapunovRecord rp = lyapunov_star(prod2, xp, 0, 2, 1u << 22, s3);
    CHECK(rp.i_plus == 0);
    CHECK(rp.i_minus == 4);

    // Dominance over the plain exponents on the same input.
    for (int trial = 0; trial < 10; ++trial) {
        Rng sub = rng.substream(64 + static_cast<std::uint64_t>(trial));
        LocalRule rule = elementary_rule(static_cast<int>(sub.next_below(256)));
        int n = 1 + sub.next_int(2);
        Window x = random_window(rule, n, sub, 1);
        LyapunovRecord star = lyapunov_star(rule, x, 1, n, 1u << 20, sub);
        LyapunovRecord plain = lyapunov_exact(rule, x, n);
        CHECK(star.i_plus >= plain.i_plus);
        CHECK(star.i_minus >= plain.i_minus);
    }
}

TEST_CASE("average exponents") {
    Rng rng(131);
    LocalRule prod2 = catalog_rule("prod2");
    auto mm = preset_measure("uniform_x_uniform", 4);
    AverageExponents prod = average_exponents(prod2, mm, 2, 48, rng);
    CHECK(prod.plus == 0.0);
    CHECK(prod.minus == 2.0);
    CHECK(prod.plus_stderr == 0.0);
    CHECK(prod.minus_stderr == 0.0);
    CHECK(prod.all_exact);

    LocalRule id = identity_rule(2);
    auto u2 = MeasureModel::uniform(2);
    Rng r2 = rng.substream(1);
    AverageExponents idr = average_exponents(id, u2, 4, 32, r2);
    CHECK(idr.plus == 0.0);
    CHECK(idr.minus == 0.0);

    LocalRule r90 = elementary_rule(90);
    Rng r3 = rng.substream(2);
    AverageExponents e90 = average_exponents(r90, u2, 4, 48, r3);
    CHECK(e90.plus == doctest::Approx(1.0));
    CHECK(e90.minus == doctest::Approx(1.0));
}

TEST_CASE("stability ball estimates") {
    Rng rng(137);
    LocalRule id = identity_rule(2);
    auto u2 = MeasureModel::uniform(2);
    // Identity: the ball equals the central cylinder at every horizon.
    Window x(-20, std::vector<Symbol>(41, 0));
    for (auto& c : x.cells) c = static_cast<Symbol>(rng.next_int(2));
    StabilityEstimate e = bn_measure_estimate(id, u2, x, 1, 8, 2000, rng);
    CHECK(e.estimate == doctest::Approx(1.0 / 8.0));
    CHECK(e.hits == e.samples);

    // Left shift: agreement on [-1, 1+T] is required, mass 2^-(3+T).
    LocalRule shift = catalog_rule("shift");
    int T = 3;
    Window xs(-10, {});
    Rng srng = rng.substream(7);
    for (int i = 0; i < 21; ++i) xs.cells.push_back(static_cast<Symbol>(srng.next_int(2)));
    StabilityEstimate es = bn_measure_estimate(shift, u2, xs, 1, T, 20000, srng);
    double expect = std::pow(2.0, -(3.0 + T));
    CHECK(std::abs(es.estimate - expect) <= 4 * es.stderr_est + 1e-12);

    // Additive rule: expansive behavior drives the estimate down fast.
    LocalRule r90 = elementary_rule(90);
    Window x90(-16, {});
    Rng r90rng = rng.substream(8);
    for (int i = 0; i < 33; ++i) x90.cells.push_back(static_cast<Symbol>(r90rng.next_int(2)));
    StabilityEstimate e90 = bn_measure_estimate(r90, u2, x90, 2, 12, 4000, r90rng);
    CHECK(e90.estimate < 1e-3);
}

TEST_CASE("monotone in horizon on a fixed seed set") {
    Rng rng(139);
    LocalRule shift = catalog_rule("shift");
    auto u2 = MeasureModel::uniform(2);
    Window x(-24, {});
    for (int i = 0; i < 49; ++i) x.cells.push_back(static_cast<Symbol>(rng.next_int(2)));
    double prev = 1.0;
    for (int T : {1, 2, 4, 8}) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(T));
        StabilityEstimate e = bn_measure_estimate(shift, u2, x, 1, T, 4000, sub);
        CHECK(e.estimate <= prev + 1e-12);
        prev = e.estimate;
    }
}

TEST_CASE("classification evidence labels") {
    ClassifyParams params;
    params.samples = 1500;
    params.base_points = 4;
    auto u2 = MeasureModel::uniform(2);

    Rng r1(141);
    auto rep_id = classify(identity_rule(2), u2, params, r1);
    CHECK(rep_id.label == "equicontinuous-evidence");

    Rng r2(143);
    auto rep_90 = classify(elementary_rule(90), u2, params, r2);
    CHECK(rep_90.label == "expansive-evidence");

    Rng r3(149);
    auto rep_shift = classify(catalog_rule("shift"), u2, params, r3);
    CHECK(rep_shift.label == "expansive-evidence");

    Rng r4(151);
    auto rep_204 = classify(elementary_rule(204), u2, params, r4);
    CHECK(rep_204.label == "equicontinuous-evidence");
}
