#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caflow/rational.hpp"
#include "caflow/rng.hpp"
#include "caflow/window.hpp"

namespace caflow {

// Natural-log cylinder measure; -infinity encodes measure zero.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

struct SturmianParams {
    // Rotation number as a continued-fraction convergent num/den. The default
    // is the convergent of 2 - golden_ratio with denominator > 10^6, which
    // makes the word "11" measure zero (handy as a crisp forbidden pattern).
    long long num = 514229;
    long long den = 1346269;
    // Cell i codes 1 iff the orbit point falls in [threshold, 1); by default
    // threshold = 1 - alpha.
    std::optional<Rational> threshold;
};

// Shift-ergodic measure on A^Z with exact cylinder log-measure, marginal
// sampling, conditional extension, and closed-form shift entropy.
//
// Models are immutable and safe to share across threads; all sampling goes
// through an explicitly passed stream.
class MeasureModel {
public:
    enum class Kind { uniform, bernoulli, markov, product, sturmian };

    static MeasureModel uniform(int k);
    static MeasureModel bernoulli(const std::vector<Rational>& probs);
    // pi optional: computed from P if absent. P rows must sum to 1 (1e-12),
    // pi must be stationary (1e-10).
    static MeasureModel markov(const std::vector<std::vector<Rational>>& P,
                               const std::vector<Rational>& pi = {});
    static MeasureModel product(std::vector<MeasureModel> components);
    static MeasureModel sturmian(const SturmianParams& params = {});

    Kind kind() const;
    int k() const;
    std::string label() const;

    // Exact natural-log measure of the cylinder [word]; offset-independent.
    double log_measure(std::span<const Symbol> word) const;
    double log_measure(const Window& w) const { return log_measure(w.span()); }

    // Marginal on `len` consecutive cells.
    std::vector<Symbol> sample(int len, Rng& rng) const;
    Window sample_window(int offset, int len, Rng& rng) const {
        return Window(offset, sample(len, rng));
    }

    // Extends `fixed` to [lo, hi] under the conditional law. Throws
    // PreconditionError if the target does not contain the fixed range, and
    // ConfigError if the fixed word has measure zero.
    Window conditional_extension(const Window& fixed, int lo, int hi, Rng& rng) const;

    // h(sigma) in nats: log k / -sum p log p / markov rate / sum / 0.
    double shift_entropy() const;

    // Order-1 chain factorization over the ambient alphabet, available for
    // uniform, bernoulli, markov and products of those. Sturmian-containing
    // models return false (their cylinder measures do not factor).
    bool chainable() const;
    double chain_initial_log(int symbol) const;
    double chain_transition_log(int prev, int next) const;

    // True when all length-L cylinders of positive measure share one value
    // (uniform and products of uniforms): the typical-set filter is then
    // trivially the identity.
    bool equal_weight_cylinders() const;

    // Component access for product models (empty otherwise).
    const std::vector<MeasureModel>& product_components() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit MeasureModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

// Push-forward invariance diagnostic: evolve sampled windows one step under
// the rule, tally central words of length word_len, and compare against the
// model's own cylinder measures.
struct InvarianceReport {
    int word_len = 1;
    int samples = 0;
    double max_abs_deviation = 0.0;
    double threshold = 0.0; // tol + 3 * worst-case sampling stderr
    bool pass = true;
};

InvarianceReport invariance_check(const MeasureModel& m, const struct LocalRule& rule,
                                  int word_len, int samples, double tol, Rng& rng);

} // namespace caflow
