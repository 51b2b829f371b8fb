#include "caflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "caflow/trace_count.hpp"

namespace caflow {

namespace {

double logsumexp_vec(const std::vector<double>& vals) {
    double m = kLogZero;
    for (double v : vals) m = std::max(m, v);
    if (m == kLogZero) return kLogZero;
    double s = 0.0;
    for (double v : vals)
        if (v != kLogZero) s += std::exp(v - m);
    return m + std::log(s);
}

} // namespace

OracleResult enumerate_class(const LocalRule& rule, const MeasureModel& m, const Window& x,
                             int p, int n, const GWindow& g, const DeltaFilter* filter,
                             std::uint64_t cap) {
    int clo = cone_lo(rule, p, n);
    int chi = cone_hi(rule, p, n);
    if (!x.covers(clo, chi)) throw PreconditionError("oracle: cone not covered");
    int len = chi - clo + 1;
    int k = rule.k();

    double words_d = std::pow(static_cast<double>(k), len);
    if (words_d > static_cast<double>(cap))
        throw BudgetError("oracle enumeration over budget");
    std::uint64_t total = static_cast<std::uint64_t>(words_d);

    Trace target = trace_of(rule, x, p, n);
    int wlo = g.word_lo(p);
    int whi = g.word_hi(p);
    int core_lo = std::max(wlo, clo);
    int core_hi = std::min(whi, chi);

    OracleResult out;
    out.p = p;
    out.n = n;
    out.g = g;
    out.excess = std::max(0, clo - wlo) + std::max(0, whi - chi);

    std::vector<double> member_logs;
    std::set<std::vector<Symbol>> restrictions;

    Window y(clo, std::vector<Symbol>(static_cast<std::size_t>(len), 0));
    for (std::uint64_t it = 0; it < total; ++it) {
        // Odometer in lexicographic order, most significant cell first.
        if (it > 0) {
            int pos = len - 1;
            while (true) {
                if (++y.cells[static_cast<std::size_t>(pos)] < k) break;
                y.cells[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
        }
        // Plain evolution, kept independent of the cascade machinery.
        Window cur = y;
        bool match = true;
        for (int i = 0; i <= n && match; ++i) {
            if (i > 0) cur = step(rule, cur);
            for (int q = -p; q <= p && match; ++q)
                match = cur.at(q) == target.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(q + p)];
        }
        if (!match) continue;
        out.cone_words.push_back(y.cells);
        member_logs.push_back(m.log_measure(y.cells));
        std::vector<Symbol> restr;
        for (int c = core_lo; c <= core_hi; ++c) restr.push_back(y.at(c));
        restrictions.insert(std::move(restr));
    }

    out.window_words.assign(restrictions.begin(), restrictions.end());
    out.class_log_measure = logsumexp_vec(member_logs);

    double excess_factor = static_cast<double>(out.excess) * std::log(static_cast<double>(k));
    out.count = static_cast<std::uint64_t>(restrictions.size());
    out.count_exact_int = true;
    for (int e = 0; e < out.excess; ++e) {
        if (out.count > ~std::uint64_t{0} / static_cast<std::uint64_t>(k)) {
            out.count_exact_int = false;
            out.count = 0;
            break;
        }
        out.count *= static_cast<std::uint64_t>(k);
    }
    out.log_count = std::log(static_cast<double>(restrictions.size())) + excess_factor;

    if (filter != nullptr) {
        if (!x.covers(wlo, whi))
            throw PreconditionError("oracle filtered count needs the base point on the window");
        // Assemble full window words: projections x free outer fills.
        std::vector<int> excess_pos;
        for (int c = wlo; c < clo; ++c) excess_pos.push_back(c);
        for (int c = chi + 1; c <= whi; ++c) excess_pos.push_back(c);
        double full_words = static_cast<double>(restrictions.size()) *
                            std::pow(static_cast<double>(k), static_cast<double>(excess_pos.size()));
        if (full_words > static_cast<double>(cap))
            throw BudgetError("oracle filtered enumeration over budget");

        std::vector<Symbol> word(static_cast<std::size_t>(whi - wlo + 1));
        std::vector<Symbol> x_word(word.size());
        for (int c = wlo; c <= whi; ++c)
            x_word[static_cast<std::size_t>(c - wlo)] = x.at(c);
        std::uint64_t kept = 0;
        bool x_counted = false;
        for (const auto& restr : restrictions) {
            for (int c = core_lo; c <= core_hi; ++c)
                word[static_cast<std::size_t>(c - wlo)] = restr[static_cast<std::size_t>(c - core_lo)];
            std::vector<int> digits(excess_pos.size(), 0);
            bool more = true;
            while (more) {
                for (std::size_t i = 0; i < excess_pos.size(); ++i)
                    word[static_cast<std::size_t>(excess_pos[i] - wlo)] = static_cast<Symbol>(digits[i]);
                if (filter->passes(m.log_measure(word))) {
                    ++kept;
                    if (word == x_word) x_counted = true;
                }
                more = false;
                for (std::size_t i = 0; i < excess_pos.size(); ++i) {
                    if (++digits[i] < k) { more = true; break; }
                    digits[i] = 0;
                }
                if (excess_pos.empty()) break;
            }
        }
        if (!x_counted) ++kept;
        out.count_filtered = kept;
        out.log_count_filtered = std::log(static_cast<double>(kept));
        out.filtered_valid = true;
        double denom = -m.log_measure(x.slice(wlo, whi));
        out.integrand = 1.0 - out.log_count_filtered / denom;
    } else if (x.covers(wlo, whi)) {
        double denom = -m.log_measure(x.slice(wlo, whi));
        out.integrand = 1.0 - out.log_count / denom;
    }
    return out;
}

DifferentialReport differential_suite(int instances, Rng& rng) {
    DifferentialReport rep;
    CountBudget budget;

    int attempt = 0;
    while (rep.instances < instances && attempt < instances * 10) {
        int inst = attempt++;
        Rng sub = rng.substream(0xd1ff, static_cast<std::uint64_t>(inst));

        // Draw (k, r, n, p) under the oracle's enumeration cap.
        static const int ks[] = {2, 3, 4};
        int k = ks[sub.next_int(3)];
        int r = 1 + sub.next_int(2);
        int n = 1 + sub.next_int(4);
        int p = sub.next_int(3);
        auto cone_cells = [&](int pp, int nn) { return 2 * (pp + r * nn) + 1; };
        while (std::pow(static_cast<double>(k), cone_cells(p, n)) > double(1 << 22)) {
            if (p > 0) { --p; continue; }
            if (n > 1) { --n; continue; }
            r = 1;
            k = 2;
        }

        std::uint64_t entries = table_entries(k, r);
        std::vector<Symbol> table(entries);
        for (auto& s : table) s = static_cast<Symbol>(sub.next_int(k));
        LocalRule rule = make_rule(k, r, std::move(table), "rand");

        // Uniform or Bernoulli or Markov base measure.
        MeasureModel m = MeasureModel::uniform(k);
        int which = sub.next_int(3);
        if (which == 1) {
            std::vector<Rational> probs;
            long long total = 0;
            std::vector<long long> weights;
            for (int i = 0; i < k; ++i) {
                long long w = 1 + sub.next_int(5);
                weights.push_back(w);
                total += w;
            }
            for (int i = 0; i < k; ++i) probs.emplace_back(weights[static_cast<std::size_t>(i)], total);
            m = MeasureModel::bernoulli(probs);
        } else if (which == 2) {
            std::vector<std::vector<Rational>> P;
            for (int i = 0; i < k; ++i) {
                long long total = 0;
                std::vector<long long> weights;
                for (int j = 0; j < k; ++j) {
                    long long w = 1 + sub.next_int(4);
                    weights.push_back(w);
                    total += w;
                }
                std::vector<Rational> row;
                for (int j = 0; j < k; ++j) row.emplace_back(weights[static_cast<std::size_t>(j)], total);
                P.push_back(std::move(row));
            }
            m = MeasureModel::markov(P);
        }

        int clo = cone_lo(rule, p, n);
        int chi = cone_hi(rule, p, n);
        Window x = m.sample_window(clo - 1, (chi - clo + 1) + 2, sub);

        // Window variants: the cone itself, a narrower one, a wider one.
        GWindow gs[3] = {GWindow{r * n, r * n},
                         GWindow{std::max(0, r * n - 1 - sub.next_int(2)), r * n},
                         GWindow{r * n + 1, r * n + 2}};
        const GWindow& g = gs[sub.next_int(3)];

        ++rep.instances;
        try {
            OracleResult oracle = enumerate_class(rule, m, x, p, n, g, nullptr);
            WordCounts dp = count_window_words(rule, m, x, p, n, g, nullptr, budget);
            double measure_dp = class_log_measure_exact(rule, m, x, p, n, budget);

            bool ok = true;
            if (oracle.count_exact_int && dp.count.exact_int && oracle.count != dp.count.value)
                ok = false;
            if (std::abs(oracle.log_count - dp.count.log_value) > 1e-9) ok = false;
            if (std::abs(oracle.class_log_measure - measure_dp) > 1e-7) ok = false;
            if (!ok) {
                ++rep.exact_mismatches;
                rep.failures.push_back("instance " + std::to_string(inst) + ": k=" +
                                       std::to_string(k) + " r=" + std::to_string(r) +
                                       " n=" + std::to_string(n) + " p=" + std::to_string(p));
                continue;
            }

            // Monte Carlo class-measure estimate within 4 sigma.
            McMeasure mc = class_measure_mc(rule, m, x, p, n, 4000, sub);
            ++rep.mc_cells;
            if (mc.lower_confidence) {
                if (oracle.class_log_measure <= mc.log_value) ++rep.mc_within_4sigma;
            } else if (std::abs(mc.log_value - oracle.class_log_measure) <=
                       4.0 * std::max(mc.log_stderr, 1e-3)) {
                ++rep.mc_within_4sigma;
            }
        } catch (const BudgetError&) {
            // Over-budget draws don't count against the suite.
            --rep.instances;
            continue;
        }
    }
    return rep;
}

} // namespace caflow
