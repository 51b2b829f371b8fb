// Experiment runner and catalog front-end.
//
// Subcommands:
//   catalog                 list built-in rules and measure presets
//   run <config>            flow/entropy grid sweep; writes CSV + JSON
//   verify <config> --theorem {t1,t2i,t2ii,t2iii}
//   classify <config>       equicontinuity/expansiveness evidence report
//   oracle-suite            randomized dp-vs-enumeration differential suite
//
// Exit codes: 0 ok, 2 config error, 3 budget error, 4 theorem-check failure.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "caflow/experiment.hpp"
#include "caflow/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitTheorem = 4;

struct CommonFlags {
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool reproducible = false;
    std::uint64_t budget = 0;
    int jobs = -1;
};

void apply_flags(caflow::ExperimentConfig& cfg, const CommonFlags& flags) {
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.seed_set) cfg.seed = flags.seed;
    if (flags.reproducible) cfg.reproducible = true;
    if (flags.budget > 0) {
        cfg.budget.dp_transitions = flags.budget;
        cfg.budget.dfs_nodes = flags.budget;
    }
    if (flags.jobs >= 0) cfg.jobs = flags.jobs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cellular-automaton information flow toolbox"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto add_common = [&flags](CLI::App* cmd) {
        cmd->add_option("--out", flags.out_dir, "output directory");
        cmd->add_option("--seed", flags.seed, "override the config seed")
            ->each([&flags](const std::string&) { flags.seed_set = true; });
        cmd->add_flag("--reproducible", flags.reproducible,
                      "suppress non-deterministic header fields");
        cmd->add_option("--budget", flags.budget, "exact-machinery state budget override");
        cmd->add_option("--jobs", flags.jobs, "worker threads (0 = hardware)");
    };

    auto* cmd_catalog = app.add_subcommand("catalog", "list built-in rules and measures");

    std::string run_config;
    auto* cmd_run = app.add_subcommand("run", "run a flow/entropy experiment");
    cmd_run->add_option("config", run_config, "config file (JSON)")->required();
    add_common(cmd_run);

    std::string verify_config;
    std::string theorem;
    auto* cmd_verify = app.add_subcommand("verify", "check an entropy identity or bound");
    cmd_verify->add_option("config", verify_config, "config file (JSON)")->required();
    cmd_verify->add_option("--theorem", theorem, "t1 | t2i | t2ii | t2iii")->required();
    add_common(cmd_verify);

    std::string classify_config;
    auto* cmd_classify = app.add_subcommand("classify", "stability-based classification");
    cmd_classify->add_option("config", classify_config, "config file (JSON)")->required();
    add_common(cmd_classify);

    int suite_instances = 200;
    std::uint64_t suite_seed = 2024;
    auto* cmd_suite = app.add_subcommand("oracle-suite", "randomized differential suite");
    cmd_suite->add_option("--instances", suite_instances, "instance count");
    cmd_suite->add_option("--seed", suite_seed, "suite seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_catalog->parsed()) {
            std::cout << caflow::catalog_listing();
            return kExitOk;
        }
        if (cmd_run->parsed()) {
            auto cfg = caflow::load_experiment_config(run_config);
            apply_flags(cfg, flags);
            auto artifacts = caflow::run_experiment(cfg);
            caflow::write_run_artifacts(cfg, artifacts);
            std::printf("M_reported=%.6f (p=%d)  M_fit=%.6f  exact=%d lower_bound=%d\n",
                        artifacts.flow.M_reported, artifacts.flow.best_p, artifacts.flow.M_fit,
                        artifacts.flow.exact ? 1 : 0, artifacts.flow.lower_bound ? 1 : 0);
            return kExitOk;
        }
        if (cmd_verify->parsed()) {
            auto cfg = caflow::load_experiment_config(verify_config);
            apply_flags(cfg, flags);
            cfg.theorem = theorem;
            auto artifacts = caflow::verify_experiment(cfg);
            const auto& rep = artifacts.report;
            std::printf("%s: lhs=%.6f %s rhs=%.6f  margin=%.6f tol=%.6f  %s\n",
                        rep.theorem.c_str(), rep.lhs, rep.relation.c_str(), rep.rhs, rep.margin,
                        rep.tolerance, rep.pass ? "PASS" : "FAIL");
            if (!rep.notes.empty()) std::printf("notes: %s\n", rep.notes.c_str());
            return rep.pass ? kExitOk : kExitTheorem;
        }
        if (cmd_classify->parsed()) {
            auto cfg = caflow::load_experiment_config(classify_config);
            apply_flags(cfg, flags);
            auto artifacts = caflow::classify_experiment(cfg);
            std::printf("%s / %s: %s\n", artifacts.report.rule_label.c_str(),
                        artifacts.report.measure_label.c_str(), artifacts.report.label.c_str());
            return kExitOk;
        }
        if (cmd_suite->parsed()) {
            caflow::Rng rng(suite_seed);
            auto rep = caflow::differential_suite(suite_instances, rng);
            std::printf("instances=%d exact_mismatches=%d mc_within_4sigma=%d/%d => %s\n",
                        rep.instances, rep.exact_mismatches, rep.mc_within_4sigma, rep.mc_cells,
                        rep.pass() ? "PASS" : "FAIL");
            for (const auto& f : rep.failures) std::printf("  mismatch: %s\n", f.c_str());
            return rep.pass() ? kExitOk : 1;
        }
    } catch (const caflow::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const caflow::PreconditionError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const caflow::BudgetError& e) {
        std::fprintf(stderr, "budget error: %s\n", e.what());
        return kExitBudget;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
