#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caflow/alphabet.hpp"

namespace caflow {

// Radius-r local rule in lookup-table form. The table is indexed by the
// neighborhood word (2r+1 cells, leftmost most significant, base k), and is
// always total: exactly k^(2r+1) entries, every output < k.
struct LocalRule {
    Alphabet alphabet;
    int radius = 0;
    std::vector<Symbol> table;
    std::string label;

    int k() const { return alphabet.size; }
    int neighborhood_size() const { return 2 * radius + 1; }
    std::size_t table_size() const { return table.size(); }

    Symbol apply(std::uint32_t neighborhood_index) const { return table[neighborhood_index]; }
};

// Validates and builds a rule from an explicit table.
LocalRule make_rule(int k, int r, std::vector<Symbol> table, std::string label = "");

// Wolfram-coded k=2, r=1 rule: table bit for neighborhood (a,b,c) is bit
// (4a+2b+c) of the code.
LocalRule elementary_rule(int code);

// Rule of radius |d| realizing x |-> (x_{i+d})_i.
LocalRule shift_rule(int k, int d);

// Identity in Curtis-Hedlund-Lyndon form with radius 0.
LocalRule identity_rule(int k);

// Product automaton on the product alphabet; components evolve independently,
// the narrower one is padded to the common radius.
LocalRule product_rule(const LocalRule& a, const LocalRule& b);

// Permutivity of the extreme coordinates. Both together force full-speed
// information transport.
bool is_left_permutive(const LocalRule& rule);
bool is_right_permutive(const LocalRule& rule);
inline bool is_bipermutative(const LocalRule& rule) {
    return is_left_permutive(rule) && is_right_permutive(rule);
}

// Number of table entries k^(2r+1), as a checked 64-bit value.
std::uint64_t table_entries(int k, int r);

} // namespace caflow
