#include <doctest.h>

#include "caflow/catalog.hpp"
#include "caflow/experiment.hpp"
#include "caflow/serialize.hpp"

using namespace caflow;

TEST_CASE("rational parsing is exact") {
    CHECK(parse_rational("1/3") == Rational(1, 3));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("2") == Rational(2, 1));
    CHECK(parse_rational("-3/9") == Rational(-1, 3));
    CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
    CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
}

TEST_CASE("rule file round trip and errors") {
    LocalRule r90 = elementary_rule(90);
    std::string text = format_rule_file(r90);
    LocalRule back = parse_rule_file(text);
    CHECK(back.k() == 2);
    CHECK(back.radius == 1);
    CHECK(back.table == r90.table);
    CHECK(back.label == "rule90");

    LocalRule prod2 = catalog_rule("prod2");
    LocalRule prod_back = parse_rule_file(format_rule_file(prod2));
    CHECK(prod_back.table == prod2.table);

    CHECK_THROWS_AS(parse_rule_file("k=2 r=1\n0 1 0 1 0 1 0\n"), ConfigError); // short table
    CHECK_THROWS_AS(parse_rule_file("k=2 r=1\n0 1 0 1 0 1 0 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_rule_file("r=1\n0 0\n"), ConfigError);
}

TEST_CASE("window text format") {
    Alphabet a2(2);
    Window w(-2, {0, 1, 1, 0, 1});
    CHECK(format_window(w, a2) == "-2:01101");
    CHECK(parse_window("-2:01101", a2) == w);

    Alphabet a4 = Alphabet::product(Alphabet(2), Alphabet(2));
    Window wp(-1, {2, 1, 3});
    CHECK(format_window(wp, a4) == "-1:10,01,11");
    CHECK(parse_window("-1:10,01,11", a4) == wp);

    CHECK_THROWS_AS(parse_window("0:012", a2), ConfigError);
    CHECK_THROWS_AS(parse_window("junk", a2), ConfigError);
}

TEST_CASE("measure json parsing") {
    auto u = measure_from_json_text(R"({"type":"uniform","k":3})");
    CHECK(u.k() == 3);
    auto b = measure_from_json_text(R"({"type":"bernoulli","p":["1/3","2/3"]})");
    CHECK(b.shift_entropy() ==
          doctest::Approx(MeasureModel::bernoulli({Rational(1, 3), Rational(2, 3)}).shift_entropy()));
    auto mk = measure_from_json_text(
        R"({"type":"markov","P":[["0.9","0.1"],["0.1","0.9"]]})");
    CHECK(mk.k() == 2);
    auto prod = measure_from_json_text(
        R"({"type":"product","components":[{"type":"uniform","k":2},{"type":"sturmian"}]})");
    CHECK(prod.k() == 4);
    CHECK_FALSE(prod.chainable());
    CHECK_THROWS_AS(measure_from_json_text(R"({"type":"nope"})"), ConfigError);
    CHECK_THROWS_AS(measure_from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(measure_from_json_text(R"({"type":"bernoulli","p":["1/2","1/3"]})"),
                    ConfigError);
}

TEST_CASE("experiment config parsing and validation") {
    std::string good = R"({
        "experiment_id": "t",
        "rule": "prod2",
        "measure": "uniform_x_uniform",
        "p_grid": [0, 1],
        "n_grid": [1, 2, 3],
        "delta_grid": [0.5, 0.25],
        "velocity": {"type": "linear", "v_minus": "2", "v_plus": "2"},
        "seed": 42
    })";
    ExperimentConfig cfg = parse_experiment_config(good);
    CHECK(cfg.rule_name == "prod2");
    CHECK(cfg.seed == 42);
    CHECK(cfg.velocity.v_plus == Rational(2, 1));

    CHECK_THROWS_AS(parse_experiment_config("{}"), ConfigError);
    // seed is mandatory
    CHECK_THROWS_AS(parse_experiment_config(R"({"rule":"shift","measure":"uniform"})"),
                    ConfigError);
    // n grid must increase
    CHECK_THROWS_AS(parse_experiment_config(
                        R"({"rule":"shift","measure":"uniform","seed":1,"n_grid":[2,2]})"),
                    ConfigError);
    // measure/rule alphabet mismatch surfaces on resolve
    ExperimentConfig bad = parse_experiment_config(
        R"({"rule":"prod2","measure":"bernoulli_1_3","seed":1})");
    LocalRule rule = resolve_rule(bad);
    CHECK(rule.k() == 4);
    CHECK_THROWS_AS(resolve_measure(bad, rule.k()), ConfigError);
}

TEST_CASE("experiment runs are byte-identical for a fixed seed and any worker count") {
    std::string text = R"({
        "experiment_id": "det",
        "rule": "prod2",
        "measure": "uniform_x_uniform",
        "p_grid": [0, 1],
        "n_grid": [1, 2],
        "delta_grid": [0.25],
        "velocity": {"type": "linear", "v_minus": "2", "v_plus": "2"},
        "base_points": 8,
        "entropy_base_points": 6,
        "filter_samples": 500,
        "seed": 97,
        "reproducible": true
    })";
    ExperimentConfig cfg = parse_experiment_config(text);
    cfg.jobs = 1;
    RunArtifacts a = run_experiment(cfg);
    cfg.jobs = 4;
    RunArtifacts b = run_experiment(cfg);
    CHECK(a.results_csv == b.results_csv);
    CHECK(a.curves_csv == b.curves_csv);
    CHECK(a.summary_json == b.summary_json);
    CHECK(a.results_csv.find("dp_exact") != std::string::npos);
}

TEST_CASE("catalog listing mentions the fixtures") {
    std::string listing = catalog_listing();
    CHECK(listing.find("prod2") != std::string::npos);
    CHECK(listing.find("rule90") != std::string::npos);
    CHECK(listing.find("bipermutative") != std::string::npos);
    CHECK(listing.find("id_x_shift2") != std::string::npos);
    CHECK(listing.find("uniform_x_sturmian") != std::string::npos);
}
