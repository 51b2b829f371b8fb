#pragma once

#include <string>

#include "caflow/measure.hpp"
#include "caflow/rule.hpp"
#include "caflow/window.hpp"

namespace caflow {

// Rule file, plain text:
//   line 1: k=<int> r=<int> [label=<text>]
//   line 2: k^(2r+1) whitespace-separated output symbols in lexicographic
//           neighborhood order
std::string format_rule_file(const LocalRule& rule);
LocalRule parse_rule_file(const std::string& text);

// Measure config as JSON text:
//   {"type":"uniform","k":2}
//   {"type":"bernoulli","p":["1/3","2/3"]}
//   {"type":"markov","P":[["0.9","0.1"],["0.1","0.9"]],"pi":[...](optional)}
//   {"type":"product","components":[...]}
//   {"type":"sturmian","num":...,"den":...(optional)}
// Probabilities parse exactly from rational or decimal text.
MeasureModel measure_from_json_text(const std::string& text);

// Doubles formatted so equal values always serialize identically.
std::string format_double(double v);

} // namespace caflow
