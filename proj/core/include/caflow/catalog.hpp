#pragma once

#include <string>
#include <vector>

#include "caflow/measure.hpp"
#include "caflow/rule.hpp"

namespace caflow {

// Built-in fixtures: named rules with documented structure and matching
// measure presets.
struct CatalogEntry {
    std::string name;
    std::string summary;
    int k = 2;
    int radius = 1;
    bool bipermutative = false;
};

std::vector<CatalogEntry> rule_catalog();

// Resolves a catalog name ("identity", "shift", "shift2", "rule90", ...,
// "prod2", "prod3", "id_x_shift2", "shift2_x_id"). Throws ConfigError for
// unknown names.
LocalRule catalog_rule(const std::string& name);

// Measure presets: "uniform", "bernoulli_1_3", "sturmian",
// "uniform_x_uniform", "uniform_x_sturmian", "bernoulli_x_bernoulli",
// "markov_9_1". `k_hint` sizes the uniform presets.
MeasureModel preset_measure(const std::string& name, int k_hint);

std::vector<std::string> measure_preset_names();

} // namespace caflow
