#pragma once

#include <vector>

#include "caflow/rule.hpp"
#include "caflow/window.hpp"

namespace caflow {

// Itinerary of the central (2p+1)-block: row i holds (F^i x)(-p, p),
// for i = 0..n. Rows all have length 2p+1.
struct Trace {
    int p = 0;
    std::vector<std::vector<Symbol>> rows;

    int steps() const { return static_cast<int>(rows.size()) - 1; }
    bool operator==(const Trace& o) const { return p == o.p && rows == o.rows; }
};

// One application of the rule. Output covers [offset+r, hi-r]; nothing
// outside the light cone is ever fabricated.
Window step(const LocalRule& rule, const Window& w);

// Dependency cone of the central block over n steps: [-p-rn, p+rn].
inline int cone_lo(const LocalRule& rule, int p, int n) { return -p - rule.radius * n; }
inline int cone_hi(const LocalRule& rule, int p, int n) { return p + rule.radius * n; }

// Exact itinerary. Requires w to cover the dependency cone.
Trace trace_of(const LocalRule& rule, const Window& w, int p, int n);

// True iff w's itinerary equals `target`; stops evolving at the first
// mismatching row. Same preconditions as trace_of.
bool trace_matches(const LocalRule& rule, const Window& w, const Trace& target);

} // namespace caflow
