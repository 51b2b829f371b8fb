#include "caflow/rule.hpp"

#include <string>

namespace caflow {

std::uint64_t table_entries(int k, int r) {
    std::uint64_t n = 1;
    for (int i = 0; i < 2 * r + 1; ++i) {
        if (n > (1ull << 40) / static_cast<std::uint64_t>(k))
            throw ConfigError("rule table too large: k=" + std::to_string(k) +
                              " r=" + std::to_string(r));
        n *= static_cast<std::uint64_t>(k);
    }
    return n;
}

LocalRule make_rule(int k, int r, std::vector<Symbol> table, std::string label) {
    if (k < 2) throw ConfigError("alphabet size must be >= 2");
    if (r < 0) throw ConfigError("radius must be >= 0");
    std::uint64_t expect = table_entries(k, r);
    if (table.size() != expect)
        throw ConfigError("rule table has " + std::to_string(table.size()) +
                          " entries, expected " + std::to_string(expect));
    for (Symbol s : table)
        if (s >= k) throw ConfigError("rule table symbol out of range");
    LocalRule rule;
    rule.alphabet = Alphabet(k);
    rule.radius = r;
    rule.table = std::move(table);
    rule.label = std::move(label);
    return rule;
}

LocalRule elementary_rule(int code) {
    if (code < 0 || code > 255) throw ConfigError("elementary rule code out of [0,256)");
    std::vector<Symbol> table(8);
    for (int idx = 0; idx < 8; ++idx)
        table[static_cast<std::size_t>(idx)] = static_cast<Symbol>((code >> idx) & 1);
    return make_rule(2, 1, std::move(table), "rule" + std::to_string(code));
}

LocalRule shift_rule(int k, int d) {
    int r = d >= 0 ? d : -d;
    std::uint64_t entries = table_entries(k, r);
    std::vector<Symbol> table(entries);
    // Neighborhood index is big-endian base k; the cell at offset d from the
    // center sits at digit position r + d from the left.
    std::uint64_t radix = 1;
    for (int i = 0; i < (2 * r + 1) - (r + d) - 1; ++i) radix *= static_cast<std::uint64_t>(k);
    for (std::uint64_t idx = 0; idx < entries; ++idx)
        table[idx] = static_cast<Symbol>((idx / radix) % static_cast<std::uint64_t>(k));
    std::string label = d == 0 ? "identity" : (d == 1 ? "shift" : "shift^" + std::to_string(d));
    return make_rule(k, r, std::move(table), std::move(label));
}

LocalRule identity_rule(int k) { return shift_rule(k, 0); }

LocalRule product_rule(const LocalRule& a, const LocalRule& b) {
    int r = std::max(a.radius, b.radius);
    Alphabet alpha = Alphabet::product(a.alphabet, b.alphabet);
    int k = alpha.size;
    int ka = a.k();
    int kb = b.k();
    std::uint64_t entries = table_entries(k, r);
    std::vector<Symbol> table(entries);

    int width = 2 * r + 1;
    std::vector<int> cells(static_cast<std::size_t>(width));
    for (std::uint64_t idx = 0; idx < entries; ++idx) {
        std::uint64_t rest = idx;
        for (int i = width - 1; i >= 0; --i) {
            cells[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::uint64_t>(k));
            rest /= static_cast<std::uint64_t>(k);
        }
        // Each component reads its own central 2r_c+1 cells.
        std::uint32_t ia = 0;
        for (int i = r - a.radius; i <= r + a.radius; ++i)
            ia = ia * static_cast<std::uint32_t>(ka) +
                 static_cast<std::uint32_t>(cells[static_cast<std::size_t>(i)] / kb);
        std::uint32_t ib = 0;
        for (int i = r - b.radius; i <= r + b.radius; ++i)
            ib = ib * static_cast<std::uint32_t>(kb) +
                 static_cast<std::uint32_t>(cells[static_cast<std::size_t>(i)] % kb);
        table[idx] = static_cast<Symbol>(a.apply(ia) * kb + b.apply(ib));
    }
    LocalRule rule;
    rule.alphabet = alpha;
    rule.radius = r;
    rule.table = std::move(table);
    rule.label = (a.label.empty() ? "?" : a.label) + "x" + (b.label.empty() ? "?" : b.label);
    return rule;
}

namespace {

bool margin_permutive(const LocalRule& rule, bool left) {
    int k = rule.k();
    int width = rule.neighborhood_size();
    if (width == 1) return true;
    std::uint64_t rest_count = 1;
    for (int i = 0; i < width - 1; ++i) rest_count *= static_cast<std::uint64_t>(k);
    std::uint64_t hi_radix = rest_count; // radix of the leftmost cell
    std::vector<bool> seen(static_cast<std::size_t>(k));
    for (std::uint64_t rest = 0; rest < rest_count; ++rest) {
        std::fill(seen.begin(), seen.end(), false);
        for (int v = 0; v < k; ++v) {
            std::uint64_t idx = left
                ? static_cast<std::uint64_t>(v) * hi_radix + rest
                : rest * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(v);
            Symbol out = rule.apply(static_cast<std::uint32_t>(idx));
            if (seen[out]) return false;
            seen[out] = true;
        }
    }
    return true;
}

} // namespace

bool is_left_permutive(const LocalRule& rule) { return margin_permutive(rule, true); }
bool is_right_permutive(const LocalRule& rule) { return margin_permutive(rule, false); }

} // namespace caflow
