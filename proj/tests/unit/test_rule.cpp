#include <doctest.h>

#include "caflow/catalog.hpp"
#include "caflow/rule.hpp"
#include "caflow/trace.hpp"

using namespace caflow;

namespace {

Window win(int offset, std::initializer_list<int> syms) {
    std::vector<Symbol> cells;
    for (int s : syms) cells.push_back(static_cast<Symbol>(s));
    return Window(offset, std::move(cells));
}

// Independent expansion of a Wolfram code, written directly from the bit
// convention rather than via elementary_rule.
std::vector<Symbol> wolfram_table(int code) {
    std::vector<Symbol> t(8);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                t[static_cast<std::size_t>(a * 4 + b * 2 + c)] =
                    static_cast<Symbol>((code >> (4 * a + 2 * b + c)) & 1);
    return t;
}

} // namespace

TEST_CASE("make_rule validates the table") {
    std::vector<Symbol> tbl(8, 0);
    CHECK_NOTHROW(make_rule(2, 1, tbl));
    std::vector<Symbol> short_tbl(7, 0);
    CHECK_THROWS_AS(make_rule(2, 1, short_tbl), ConfigError);
    std::vector<Symbol> bad(8, 0);
    bad[3] = 2;
    CHECK_THROWS_AS(make_rule(2, 1, bad), ConfigError);
}

TEST_CASE("elementary rules expand their codes") {
    // 204 = identity, 170 = left shift, 90 = xor of the neighbors
    CHECK(elementary_rule(204).table == wolfram_table(204));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                CHECK(elementary_rule(204).apply(static_cast<std::uint32_t>(a * 4 + b * 2 + c)) == b);
                CHECK(elementary_rule(170).apply(static_cast<std::uint32_t>(a * 4 + b * 2 + c)) == c);
                CHECK(elementary_rule(90).apply(static_cast<std::uint32_t>(a * 4 + b * 2 + c)) ==
                      (a ^ c));
            }
    CHECK_THROWS_AS(elementary_rule(256), ConfigError);
    CHECK_THROWS_AS(elementary_rule(-1), ConfigError);
}

TEST_CASE("shift rules") {
    CHECK(shift_rule(2, 1).table == elementary_rule(170).table);
    LocalRule id0 = shift_rule(2, 0);
    CHECK(id0.radius == 0);
    CHECK(id0.table == std::vector<Symbol>{0, 1});
    LocalRule s2 = shift_rule(3, 2);
    CHECK(s2.radius == 2);
    // f(neigh) = neigh at offset +2 from the center, i.e. the last cell.
    Window w = win(0, {0, 1, 2, 1, 0});
    CHECK(step(s2, w).cells == std::vector<Symbol>{0});
}

TEST_CASE("product rule composes independent components") {
    LocalRule prod2 = product_rule(shift_rule(2, 1), shift_rule(2, 2));
    CHECK(prod2.k() == 4);
    CHECK(prod2.radius == 2);
    CHECK(prod2.alphabet.components == std::vector<int>{2, 2});

    LocalRule idid = product_rule(identity_rule(2), identity_rule(2));
    for (std::uint32_t i = 0; i < idid.table_size(); ++i) CHECK(idid.apply(i) == i);

    // Component evolutions stay independent: evolve a product window and
    // compare against the separately evolved components.
    Window w(0, {});
    Rng rng(7);
    for (int i = 0; i < 9; ++i) w.cells.push_back(static_cast<Symbol>(rng.next_int(4)));
    Window stepped = step(prod2, w);
    Window c1(0, {}), c2(0, {});
    for (Symbol s : w.cells) {
        c1.cells.push_back(static_cast<Symbol>(s >> 1));
        c2.cells.push_back(static_cast<Symbol>(s & 1));
    }
    Window c1s = step(shift_rule(2, 1), c1.slice(1, 7)); // pad radius 1 -> radius 2 window
    Window c2s = step(shift_rule(2, 2), c2);
    for (int c = stepped.lo(); c <= stepped.hi(); ++c) {
        CHECK((stepped.at(c) >> 1) == c1s.at(c));
        CHECK((stepped.at(c) & 1) == c2s.at(c));
    }
}

TEST_CASE("step semantics") {
    // left shift: sigma(x)_i = x_{i+1}, so the window 01101 at -2..2 maps to
    // x_0 x_1 x_2 = 101 at offset -1
    Window w = win(-2, {0, 1, 1, 0, 1});
    Window out = step(elementary_rule(170), w);
    CHECK(out.offset == -1);
    CHECK(out.cells == std::vector<Symbol>{1, 0, 1});

    // rule 90 on 111 collapses to a single 0 at offset t+1
    Window t3 = win(5, {1, 1, 1});
    Window r = step(elementary_rule(90), t3);
    CHECK(r.offset == 6);
    CHECK(r.cells == std::vector<Symbol>{0});

    // identity keeps interior symbols
    Window idw = win(0, {1, 0, 1, 1});
    Window ids = step(elementary_rule(204), idw);
    CHECK(ids.cells == std::vector<Symbol>{0, 1});

    CHECK_THROWS_AS(step(elementary_rule(90), win(0, {1, 1})), PreconditionError);
}

TEST_CASE("trace_of basics") {
    // left shift: rows slide right through the word
    Window w = win(-3, {0, 1, 0, 1, 0, 1, 0});
    Trace t = trace_of(elementary_rule(170), w, 1, 2);
    CHECK(t.rows.size() == 3);
    CHECK(t.rows[0] == std::vector<Symbol>{0, 1, 0});
    CHECK(t.rows[1] == std::vector<Symbol>{1, 0, 1});
    CHECK(t.rows[2] == std::vector<Symbol>{0, 1, 0});

    // identity: rows repeat
    Window wi = win(-1, {1, 0, 1});
    Trace ti = trace_of(identity_rule(2), wi, 0, 3);
    for (const auto& row : ti.rows) CHECK(row == std::vector<Symbol>{0});

    // rule 90, p=0, n=2 on 00100: brute-force evolution gives rows 1, 0, 0
    Window w90 = win(-2, {0, 0, 1, 0, 0});
    Trace t90 = trace_of(elementary_rule(90), w90, 0, 2);
    CHECK(t90.rows[0] == std::vector<Symbol>{1});
    CHECK(t90.rows[1] == std::vector<Symbol>{0});
    CHECK(t90.rows[2] == std::vector<Symbol>{0});

    CHECK_THROWS_AS(trace_of(elementary_rule(90), win(0, {1, 1, 1}), 0, 2), PreconditionError);
}

TEST_CASE("cone exactness: agreement on the cone forces equal traces") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
        LocalRule rule = elementary_rule(static_cast<int>(sub.next_below(256)));
        int p = sub.next_int(2);
        int n = 1 + sub.next_int(3);
        int clo = cone_lo(rule, p, n);
        int chi = cone_hi(rule, p, n);
        Window a(clo - 2, {}), b(clo - 2, {});
        for (int c = clo - 2; c <= chi + 2; ++c) {
            Symbol s = static_cast<Symbol>(sub.next_int(2));
            a.cells.push_back(s);
            Symbol sb = (c >= clo && c <= chi) ? s : static_cast<Symbol>(sub.next_int(2));
            b.cells.push_back(sb);
        }
        CHECK(trace_of(rule, a, p, n) == trace_of(rule, b, p, n));
    }
}

TEST_CASE("shift identity on random windows") {
    Rng rng(13);
    LocalRule shift = shift_rule(2, 1);
    for (int trial = 0; trial < 25; ++trial) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
        int len = 3 + sub.next_int(12);
        Window w(-sub.next_int(5), {});
        for (int i = 0; i < len; ++i) w.cells.push_back(static_cast<Symbol>(sub.next_int(2)));
        Window out = step(shift, w);
        CHECK(out.size() == len - 2);
        for (int c = out.lo(); c <= out.hi(); ++c) CHECK(out.at(c) == w.at(c + 1));
    }
}

TEST_CASE("product trace projects to component traces") {
    LocalRule prod2 = catalog_rule("prod2");
    LocalRule s1 = shift_rule(2, 1);
    LocalRule s2 = shift_rule(2, 2);
    Rng rng(17);
    int p = 1, n = 2;
    int clo = cone_lo(prod2, p, n);
    int chi = cone_hi(prod2, p, n);
    Window w(clo, {});
    for (int c = clo; c <= chi; ++c) {
        (void)c;
        w.cells.push_back(static_cast<Symbol>(rng.next_int(4)));
    }
    Trace t = trace_of(prod2, w, p, n);

    Window c1(clo, {}), c2(clo, {});
    for (Symbol s : w.cells) {
        c1.cells.push_back(static_cast<Symbol>(s >> 1));
        c2.cells.push_back(static_cast<Symbol>(s & 1));
    }
    Trace t1 = trace_of(s1, c1, p, n);
    Trace t2 = trace_of(s2, c2, p, n);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= 2 * p; ++j) {
            auto idx = [&](const Trace& tr) {
                return tr.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            };
            CHECK((idx(t) >> 1) == idx(t1));
            CHECK((idx(t) & 1) == idx(t2));
        }
}

TEST_CASE("radius bound: cells beyond rn never change the trace") {
    Rng rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
        LocalRule rule = elementary_rule(static_cast<int>(sub.next_below(256)));
        int p = sub.next_int(2);
        int n = 1 + sub.next_int(3);
        int clo = cone_lo(rule, p, n);
        int chi = cone_hi(rule, p, n);
        Window a(clo - 3, {});
        for (int c = clo - 3; c <= chi + 3; ++c) {
            (void)c;
            a.cells.push_back(static_cast<Symbol>(sub.next_int(2)));
        }
        Window b = a;
        for (int c = clo - 3; c < clo; ++c) b.at(c) ^= 1;
        for (int c = chi + 1; c <= chi + 3; ++c) b.at(c) ^= 1;
        CHECK(trace_of(rule, a, p, n) == trace_of(rule, b, p, n));
    }
}

TEST_CASE("bipermutativity detection") {
    CHECK(is_bipermutative(elementary_rule(90)));
    CHECK(is_bipermutative(elementary_rule(150)));
    CHECK_FALSE(is_bipermutative(elementary_rule(204)));
    CHECK_FALSE(is_bipermutative(elementary_rule(170))); // left-permutive only
    CHECK(is_right_permutive(elementary_rule(170)));
}

TEST_CASE("catalog entries") {
    auto entries = rule_catalog();
    bool found_prod2 = false, found_rule90 = false, found_idx = false;
    for (const auto& e : entries) {
        if (e.name == "prod2") {
            found_prod2 = true;
            CHECK(e.k == 4);
            CHECK(e.radius == 2);
        }
        if (e.name == "rule90") {
            found_rule90 = true;
            CHECK(e.bipermutative);
        }
        if (e.name == "id_x_shift2") found_idx = true;
    }
    CHECK(found_prod2);
    CHECK(found_rule90);
    CHECK(found_idx);
}
