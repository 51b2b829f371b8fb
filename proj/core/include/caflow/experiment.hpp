#pragma once

#include <string>
#include <vector>

#include "caflow/flow.hpp"
#include "caflow/stability.hpp"
#include "caflow/theorems.hpp"

namespace caflow {

// One experiment: a rule, a measure, grids, a velocity, sample counts and a
// mandatory seed. Parsed from a JSON config file; no environment lookups,
// no wall-clock seeding.
struct ExperimentConfig {
    std::string experiment_id = "experiment";
    std::string rule_name;      // catalog name; empty if rule_file set
    std::string rule_file;      // path to a rule file
    std::string measure_preset; // preset name; empty if measure_json set
    std::string measure_json;   // inline JSON object as text
    std::vector<int> p_grid{0, 1, 2, 3};
    std::vector<int> n_grid{1, 2, 3};
    std::vector<double> delta_grid{0.5, 0.25};
    VelocitySpec velocity = VelocitySpec::linear(Rational(1, 1), Rational(1, 1));
    int base_points = 48;
    int filter_samples = 20000;
    int entropy_base_points = 48;
    int mc_samples = 20000;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
    bool exact_first = true; // false = mc-only
    bool mc_allowed = true;
    CountBudget budget;
    int jobs = 0;
    bool reproducible = false; // suppress the timestamp header field
    std::string theorem;       // verify: t1 | t2i | t2ii | t2iii
    ClassifyParams classify_params;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

LocalRule resolve_rule(const ExperimentConfig& cfg);
MeasureModel resolve_measure(const ExperimentConfig& cfg, int k_hint);

// Artifacts of a run: results.csv (per grid cell and base point), curves.csv
// (n vs M per (p, delta)), and summary.json.
struct RunArtifacts {
    FlowSummary flow;
    std::vector<EntropySeries> entropy; // one series per p
    std::string results_csv;
    std::string curves_csv;
    std::string summary_json;
};

RunArtifacts run_experiment(const ExperimentConfig& cfg);
void write_run_artifacts(const ExperimentConfig& cfg, const RunArtifacts& artifacts);

struct VerifyArtifacts {
    TheoremReport report;
    std::string report_json;
};

VerifyArtifacts verify_experiment(const ExperimentConfig& cfg);

struct ClassifyArtifacts {
    ClassificationReport report;
    std::string report_json;
};

ClassifyArtifacts classify_experiment(const ExperimentConfig& cfg);

// Text listing for the catalog command.
std::string catalog_listing();

} // namespace caflow
