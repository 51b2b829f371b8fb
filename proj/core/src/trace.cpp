#include "caflow/trace.hpp"

#include <cstring>
#include <string>

namespace caflow {

Window step(const LocalRule& rule, const Window& w) {
    int r = rule.radius;
    if (w.size() <= 2 * r) throw PreconditionError("window too short for one step");
    int out_len = w.size() - 2 * r;
    Window out(w.offset + r, std::vector<Symbol>(static_cast<std::size_t>(out_len)));
    int k = rule.k();
    int width = 2 * r + 1;
    if (r == 0) {
        for (int i = 0; i < out_len; ++i)
            out.cells[static_cast<std::size_t>(i)] = rule.apply(w.cells[static_cast<std::size_t>(i)]);
        return out;
    }
    // Rolling neighborhood index: drop the leftmost digit, append the next cell.
    std::uint32_t mod = 1;
    for (int i = 0; i < width - 1; ++i) mod *= static_cast<std::uint32_t>(k);
    std::uint32_t idx = 0;
    for (int i = 0; i < width - 1; ++i)
        idx = idx * static_cast<std::uint32_t>(k) + w.cells[static_cast<std::size_t>(i)];
    for (int i = 0; i < out_len; ++i) {
        idx = (idx % mod) * static_cast<std::uint32_t>(k) +
              w.cells[static_cast<std::size_t>(i + width - 1)];
        out.cells[static_cast<std::size_t>(i)] = rule.apply(idx);
    }
    return out;
}

namespace {

void require_cone(const LocalRule& rule, const Window& w, int p, int n) {
    if (p < 0 || n < 0) throw PreconditionError("trace needs p >= 0 and n >= 0");
    if (!w.covers(cone_lo(rule, p, n), cone_hi(rule, p, n)))
        throw PreconditionError("window does not cover the dependency cone [-p-rn, p+rn]");
}

std::vector<Symbol> center_block(const Window& w, int p) {
    std::vector<Symbol> row(static_cast<std::size_t>(2 * p + 1));
    for (int j = -p; j <= p; ++j) row[static_cast<std::size_t>(j + p)] = w.at(j);
    return row;
}

} // namespace

namespace {

// In-place cone evolution: one scratch buffer, shrinking by r per step.
// visit(i, row_begin) is called with the cells of step i on
// [-p - r(n-i), p + r(n-i)]; a false return stops the evolution.
template <typename Visit>
void evolve_cone(const LocalRule& rule, const Window& w, int p, int n, Visit&& visit) {
    int r = rule.radius;
    int k = rule.k();
    int width = 2 * r + 1;
    int clo = cone_lo(rule, p, n);
    int len = cone_hi(rule, p, n) - clo + 1;
    std::vector<Symbol> buf(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
        buf[static_cast<std::size_t>(i)] = w.at(clo + i);
    if (!visit(0, buf.data() + 0, len)) return;
    for (int i = 1; i <= n; ++i) {
        int out_len = len - 2 * r;
        if (r == 0) {
            for (int j = 0; j < out_len; ++j)
                buf[static_cast<std::size_t>(j)] = rule.table[buf[static_cast<std::size_t>(j)]];
        } else {
            std::uint32_t mod = 1;
            for (int t = 0; t < width - 1; ++t) mod *= static_cast<std::uint32_t>(k);
            std::uint32_t idx = 0;
            for (int t = 0; t < width - 1; ++t)
                idx = idx * static_cast<std::uint32_t>(k) + buf[static_cast<std::size_t>(t)];
            for (int j = 0; j < out_len; ++j) {
                idx = (idx % mod) * static_cast<std::uint32_t>(k) +
                      buf[static_cast<std::size_t>(j + width - 1)];
                buf[static_cast<std::size_t>(j)] = rule.table[idx];
            }
        }
        len = out_len;
        if (!visit(i, buf.data(), len)) return;
    }
}

} // namespace

Trace trace_of(const LocalRule& rule, const Window& w, int p, int n) {
    require_cone(rule, w, p, n);
    Trace t;
    t.p = p;
    t.rows.reserve(static_cast<std::size_t>(n + 1));
    evolve_cone(rule, w, p, n, [&](int i, const Symbol* row, int len) {
        // the central block sits r*(n-i) cells in from the row edge
        int off = (len - (2 * p + 1)) / 2;
        (void)i;
        t.rows.emplace_back(row + off, row + off + 2 * p + 1);
        return true;
    });
    return t;
}

bool trace_matches(const LocalRule& rule, const Window& w, const Trace& target) {
    int p = target.p;
    int n = target.steps();
    require_cone(rule, w, p, n);
    bool match = true;
    evolve_cone(rule, w, p, n, [&](int i, const Symbol* row, int len) {
        int off = (len - (2 * p + 1)) / 2;
        const auto& want = target.rows[static_cast<std::size_t>(i)];
        for (int j = 0; j <= 2 * p; ++j) {
            if (row[off + j] != want[static_cast<std::size_t>(j)]) {
                match = false;
                return false;
            }
        }
        return true;
    });
    return match;
}

} // namespace caflow
