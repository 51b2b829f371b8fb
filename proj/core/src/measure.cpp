#include "caflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "caflow/rule.hpp"
#include "caflow/sturmian.hpp"
#include "caflow/trace.hpp"

namespace caflow {

namespace {

std::vector<double> to_doubles(const std::vector<Rational>& rs) {
    std::vector<double> out;
    out.reserve(rs.size());
    for (auto& r : rs) out.push_back(r.value());
    return out;
}

void check_distribution(const std::vector<double>& p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0 || v > 1.0) throw ConfigError(std::string(what) + ": probability out of [0,1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError(std::string(what) + ": probabilities sum to " + std::to_string(sum));
}

int sample_cdf(const std::vector<double>& probs, Rng& rng) {
    double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

struct UniformM {
    int k;
    double log_k;
};

struct BernoulliM {
    std::vector<double> probs;
    std::vector<double> logp;
    std::string param_label;
};

struct MarkovM {
    int k;
    std::vector<std::vector<double>> P;
    std::vector<std::vector<double>> logP;
    std::vector<double> pi;
    std::vector<double> logpi;
    std::vector<std::vector<double>> reverse; // reverse[i][j] = pi_j P_ji / pi_i
};

struct SturmianM {
    RotationCoding coding;
    std::string param_label;
};

struct ProductM {
    std::vector<MeasureModel> comps;
    int k;
    std::vector<int> radix; // radix[i]: product of component sizes right of i
};

using Variant = std::variant<UniformM, BernoulliM, MarkovM, ProductM, SturmianM>;

std::vector<double> stationary_of(const std::vector<std::vector<double>>& P) {
    // Solve pi P = pi, sum pi = 1 by Gaussian elimination on (P^T - I).
    int k = static_cast<int>(P.size());
    int n = k + 1;
    std::vector<std::vector<double>> A(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(k + 1), 0.0));
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i)
            A[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        A[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] -= 1.0;
    }
    for (int i = 0; i < k; ++i) A[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = 1.0;
    A[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1.0;

    // Least-squares-free elimination with partial pivoting over the k+1 rows.
    std::vector<double> x(static_cast<std::size_t>(k), 0.0);
    int row = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < k && row < n; ++col) {
        int best = row;
        for (int r2 = row; r2 < n; ++r2)
            if (std::abs(A[static_cast<std::size_t>(r2)][static_cast<std::size_t>(col)]) >
                std::abs(A[static_cast<std::size_t>(best)][static_cast<std::size_t>(col)]))
                best = r2;
        if (std::abs(A[static_cast<std::size_t>(best)][static_cast<std::size_t>(col)]) < 1e-14) continue;
        std::swap(A[static_cast<std::size_t>(row)], A[static_cast<std::size_t>(best)]);
        for (int r2 = 0; r2 < n; ++r2) {
            if (r2 == row) continue;
            double f = A[static_cast<std::size_t>(r2)][static_cast<std::size_t>(col)] /
                       A[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
            if (f == 0.0) continue;
            for (int c2 = col; c2 <= k; ++c2)
                A[static_cast<std::size_t>(r2)][static_cast<std::size_t>(c2)] -=
                    f * A[static_cast<std::size_t>(row)][static_cast<std::size_t>(c2)];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (int i = 0; i < row; ++i) {
        int col = pivot_col[static_cast<std::size_t>(i)];
        x[static_cast<std::size_t>(col)] =
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] /
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
    }
    double sum = 0.0;
    for (double v : x) sum += v;
    if (std::abs(sum) < 1e-12) throw ConfigError("markov: could not compute a stationary distribution");
    for (double& v : x) v /= sum;
    return x;
}

} // namespace

struct MeasureModel::Impl {
    Variant v;
    int k = 2;
    std::string label;
    bool chainable = false;
    bool equal_weights = false;
    double entropy = 0.0;
    std::vector<MeasureModel> empty_components;
};

namespace {

double safe_log(double x) { return x > 0.0 ? std::log(x) : kLogZero; }

const ProductM* as_product(const Variant& v) { return std::get_if<ProductM>(&v); }

// Per-component digits of an ambient symbol, big-endian.
int component_digit(const ProductM& pm, int symbol, int idx) {
    return (symbol / pm.radix[static_cast<std::size_t>(idx)]) %
           pm.comps[static_cast<std::size_t>(idx)].k();
}

} // namespace

MeasureModel MeasureModel::uniform(int k) {
    if (k < 2) throw ConfigError("uniform: alphabet size must be >= 2");
    auto impl = std::make_shared<Impl>();
    impl->v = UniformM{k, std::log(static_cast<double>(k))};
    impl->k = k;
    impl->label = "uniform(" + std::to_string(k) + ")";
    impl->chainable = true;
    impl->equal_weights = true;
    impl->entropy = std::log(static_cast<double>(k));
    return MeasureModel(std::move(impl));
}

MeasureModel MeasureModel::bernoulli(const std::vector<Rational>& probs) {
    if (probs.size() < 2) throw ConfigError("bernoulli: need at least two symbols");
    BernoulliM b;
    b.probs = to_doubles(probs);
    check_distribution(b.probs, "bernoulli");
    for (double p : b.probs) b.logp.push_back(safe_log(p));
    std::string lbl = "bernoulli(";
    for (std::size_t i = 0; i < probs.size(); ++i)
        lbl += (i ? "," : "") + probs[i].str();
    lbl += ")";
    b.param_label = lbl;

    auto impl = std::make_shared<Impl>();
    impl->k = static_cast<int>(probs.size());
    impl->label = lbl;
    impl->chainable = true;
    bool equal = true;
    for (double p : b.probs) equal = equal && std::abs(p - b.probs[0]) < 1e-15;
    impl->equal_weights = equal;
    double h = 0.0;
    for (double p : b.probs)
        if (p > 0.0) h -= p * std::log(p);
    impl->entropy = h;
    impl->v = std::move(b);
    return MeasureModel(std::move(impl));
}

MeasureModel MeasureModel::markov(const std::vector<std::vector<Rational>>& Pr,
                                  const std::vector<Rational>& pir) {
    int k = static_cast<int>(Pr.size());
    if (k < 2) throw ConfigError("markov: need at least two states");
    MarkovM m;
    m.k = k;
    for (auto& row : Pr) {
        if (static_cast<int>(row.size()) != k) throw ConfigError("markov: transition matrix not square");
        m.P.push_back(to_doubles(row));
        check_distribution(m.P.back(), "markov row");
    }
    if (!pir.empty()) {
        if (static_cast<int>(pir.size()) != k) throw ConfigError("markov: pi has wrong size");
        m.pi = to_doubles(pir);
        check_distribution(m.pi, "markov pi");
    } else {
        m.pi = stationary_of(m.P);
    }
    // Stationarity check.
    for (int j = 0; j < k; ++j) {
        double s = 0.0;
        for (int i = 0; i < k; ++i)
            s += m.pi[static_cast<std::size_t>(i)] * m.P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (std::abs(s - m.pi[static_cast<std::size_t>(j)]) > 1e-10)
            throw ConfigError("markov: pi is not stationary for P");
    }
    for (auto& row : m.P) {
        std::vector<double> lg;
        for (double p : row) lg.push_back(safe_log(p));
        m.logP.push_back(std::move(lg));
    }
    for (double p : m.pi) m.logpi.push_back(safe_log(p));
    m.reverse.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double denom = m.pi[static_cast<std::size_t>(i)];
            m.reverse[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                denom > 0.0 ? m.pi[static_cast<std::size_t>(j)] *
                                  m.P[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] / denom
                            : 0.0;
        }

    auto impl = std::make_shared<Impl>();
    impl->k = k;
    impl->label = "markov(" + std::to_string(k) + ")";
    impl->chainable = true;
    impl->equal_weights = false;
    double h = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double pij = m.P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (pij > 0.0) h -= m.pi[static_cast<std::size_t>(i)] * pij * std::log(pij);
        }
    impl->entropy = h;
    impl->v = std::move(m);
    return MeasureModel(std::move(impl));
}

MeasureModel MeasureModel::product(std::vector<MeasureModel> components) {
    if (components.size() < 2) throw ConfigError("product: need at least two components");
    ProductM pm;
    pm.k = 1;
    for (auto& c : components) pm.k *= c.k();
    pm.comps = std::move(components);
    pm.radix.assign(pm.comps.size(), 1);
    for (int i = static_cast<int>(pm.comps.size()) - 2; i >= 0; --i)
        pm.radix[static_cast<std::size_t>(i)] =
            pm.radix[static_cast<std::size_t>(i + 1)] * pm.comps[static_cast<std::size_t>(i + 1)].k();

    auto impl = std::make_shared<Impl>();
    impl->k = pm.k;
    std::string lbl = "product(";
    bool chain = true;
    bool equal = true;
    double h = 0.0;
    for (std::size_t i = 0; i < pm.comps.size(); ++i) {
        lbl += (i ? "x" : "") + pm.comps[i].label();
        chain = chain && pm.comps[i].chainable();
        equal = equal && pm.comps[i].equal_weight_cylinders();
        h += pm.comps[i].shift_entropy();
    }
    lbl += ")";
    impl->label = lbl;
    impl->chainable = chain;
    impl->equal_weights = equal;
    impl->entropy = h;
    impl->v = std::move(pm);
    return MeasureModel(std::move(impl));
}

MeasureModel MeasureModel::sturmian(const SturmianParams& params) {
    long long t = params.threshold ? (params.threshold->num * params.den) / params.threshold->den
                                   : params.den - params.num;
    SturmianM s{RotationCoding(params.num, params.den, t),
                "sturmian(" + std::to_string(params.num) + "/" + std::to_string(params.den) + ")"};
    auto impl = std::make_shared<Impl>();
    impl->k = 2;
    impl->label = s.param_label;
    impl->chainable = false;
    impl->equal_weights = false;
    impl->entropy = 0.0; // zero-complexity growth: the coding has L+1 factors of length L
    impl->v = std::move(s);
    return MeasureModel(std::move(impl));
}

MeasureModel::Kind MeasureModel::kind() const {
    switch (impl_->v.index()) {
        case 0: return Kind::uniform;
        case 1: return Kind::bernoulli;
        case 2: return Kind::markov;
        case 3: return Kind::product;
        default: return Kind::sturmian;
    }
}

int MeasureModel::k() const { return impl_->k; }
std::string MeasureModel::label() const { return impl_->label; }
double MeasureModel::shift_entropy() const { return impl_->entropy; }
bool MeasureModel::chainable() const { return impl_->chainable; }
bool MeasureModel::equal_weight_cylinders() const { return impl_->equal_weights; }

const std::vector<MeasureModel>& MeasureModel::product_components() const {
    if (auto* pm = as_product(impl_->v)) return pm->comps;
    return impl_->empty_components;
}

double MeasureModel::log_measure(std::span<const Symbol> word) const {
    if (word.empty()) return 0.0;
    const Variant& v = impl_->v;
    if (auto* u = std::get_if<UniformM>(&v)) {
        return -static_cast<double>(word.size()) * u->log_k;
    }
    if (auto* b = std::get_if<BernoulliM>(&v)) {
        double s = 0.0;
        for (Symbol c : word) {
            double lp = b->logp[c];
            if (lp == kLogZero) return kLogZero;
            s += lp;
        }
        return s;
    }
    if (auto* m = std::get_if<MarkovM>(&v)) {
        double s = m->logpi[word[0]];
        if (s == kLogZero) return kLogZero;
        for (std::size_t i = 1; i < word.size(); ++i) {
            double lp = m->logP[word[i - 1]][word[i]];
            if (lp == kLogZero) return kLogZero;
            s += lp;
        }
        return s;
    }
    if (auto* pm = std::get_if<ProductM>(&v)) {
        double s = 0.0;
        std::vector<Symbol> comp(word.size());
        for (std::size_t ci = 0; ci < pm->comps.size(); ++ci) {
            for (std::size_t i = 0; i < word.size(); ++i)
                comp[i] = static_cast<Symbol>(component_digit(*pm, word[i], static_cast<int>(ci)));
            double lp = pm->comps[ci].log_measure(comp);
            if (lp == kLogZero) return kLogZero;
            s += lp;
        }
        return s;
    }
    auto& st = std::get<SturmianM>(v);
    auto set = st.coding.word_preimage(word);
    if (set.empty()) return kLogZero;
    return std::log(static_cast<double>(set.total())) -
           std::log(static_cast<double>(st.coding.q()));
}

std::vector<Symbol> MeasureModel::sample(int len, Rng& rng) const {
    if (len < 1) throw PreconditionError("sample length must be >= 1");
    const Variant& v = impl_->v;
    std::vector<Symbol> out(static_cast<std::size_t>(len));
    if (auto* u = std::get_if<UniformM>(&v)) {
        for (auto& c : out) c = static_cast<Symbol>(rng.next_int(u->k));
        return out;
    }
    if (auto* b = std::get_if<BernoulliM>(&v)) {
        for (auto& c : out) c = static_cast<Symbol>(sample_cdf(b->probs, rng));
        return out;
    }
    if (auto* m = std::get_if<MarkovM>(&v)) {
        out[0] = static_cast<Symbol>(sample_cdf(m->pi, rng));
        for (int i = 1; i < len; ++i)
            out[static_cast<std::size_t>(i)] =
                static_cast<Symbol>(sample_cdf(m->P[out[static_cast<std::size_t>(i - 1)]], rng));
        return out;
    }
    if (auto* pm = std::get_if<ProductM>(&v)) {
        std::fill(out.begin(), out.end(), Symbol{0});
        for (std::size_t ci = 0; ci < pm->comps.size(); ++ci) {
            auto comp = pm->comps[ci].sample(len, rng);
            int radix = pm->radix[ci];
            for (int i = 0; i < len; ++i)
                out[static_cast<std::size_t>(i)] = static_cast<Symbol>(
                    out[static_cast<std::size_t>(i)] + comp[static_cast<std::size_t>(i)] * radix);
        }
        return out;
    }
    auto& st = std::get<SturmianM>(v);
    long long atom = st.coding.uniform_atom(rng);
    for (int i = 0; i < len; ++i)
        out[static_cast<std::size_t>(i)] = st.coding.code_at(atom, i);
    return out;
}

Window MeasureModel::conditional_extension(const Window& fixed, int lo, int hi, Rng& rng) const {
    if (lo > fixed.lo() || hi < fixed.hi())
        throw PreconditionError("conditional extension target must contain the fixed range");
    if (log_measure(fixed) == kLogZero)
        throw ConfigError("fixed word has measure zero; no admissible extension");
    const Variant& v = impl_->v;
    int len = hi - lo + 1;
    Window out(lo, std::vector<Symbol>(static_cast<std::size_t>(len)));

    if (auto* u = std::get_if<UniformM>(&v)) {
        for (int c = lo; c <= hi; ++c)
            out.at(c) = (c >= fixed.lo() && c <= fixed.hi()) ? fixed.at(c)
                                                             : static_cast<Symbol>(rng.next_int(u->k));
        return out;
    }
    if (auto* b = std::get_if<BernoulliM>(&v)) {
        for (int c = lo; c <= hi; ++c)
            out.at(c) = (c >= fixed.lo() && c <= fixed.hi())
                            ? fixed.at(c)
                            : static_cast<Symbol>(sample_cdf(b->probs, rng));
        return out;
    }
    if (auto* m = std::get_if<MarkovM>(&v)) {
        for (int c = fixed.lo(); c <= fixed.hi(); ++c) out.at(c) = fixed.at(c);
        for (int c = fixed.hi() + 1; c <= hi; ++c)
            out.at(c) = static_cast<Symbol>(sample_cdf(m->P[out.at(c - 1)], rng));
        for (int c = fixed.lo() - 1; c >= lo; --c)
            out.at(c) = static_cast<Symbol>(sample_cdf(m->reverse[out.at(c + 1)], rng));
        return out;
    }
    if (auto* pm = std::get_if<ProductM>(&v)) {
        std::fill(out.cells.begin(), out.cells.end(), Symbol{0});
        for (std::size_t ci = 0; ci < pm->comps.size(); ++ci) {
            Window comp_fixed(fixed.offset, std::vector<Symbol>(fixed.cells.size()));
            for (int c = fixed.lo(); c <= fixed.hi(); ++c)
                comp_fixed.at(c) = static_cast<Symbol>(component_digit(*pm, fixed.at(c), static_cast<int>(ci)));
            Window comp_out = pm->comps[ci].conditional_extension(comp_fixed, lo, hi, rng);
            int radix = pm->radix[ci];
            for (int c = lo; c <= hi; ++c)
                out.at(c) = static_cast<Symbol>(out.at(c) + comp_out.at(c) * radix);
        }
        return out;
    }
    auto& st = std::get<SturmianM>(v);
    auto set = st.coding.word_preimage(fixed.span());
    long long atom = st.coding.uniform_atom_in(set, rng); // phase at fixed.lo()
    for (int c = lo; c <= hi; ++c)
        out.at(c) = st.coding.code_at(atom, c - fixed.lo());
    return out;
}

double MeasureModel::chain_initial_log(int symbol) const {
    const Variant& v = impl_->v;
    if (auto* u = std::get_if<UniformM>(&v)) return -u->log_k;
    if (auto* b = std::get_if<BernoulliM>(&v)) return b->logp[static_cast<std::size_t>(symbol)];
    if (auto* m = std::get_if<MarkovM>(&v)) return m->logpi[static_cast<std::size_t>(symbol)];
    if (auto* pm = std::get_if<ProductM>(&v)) {
        double s = 0.0;
        for (std::size_t ci = 0; ci < pm->comps.size(); ++ci)
            s += pm->comps[ci].chain_initial_log(component_digit(*pm, symbol, static_cast<int>(ci)));
        return s;
    }
    throw PreconditionError("model has no chain factorization");
}

double MeasureModel::chain_transition_log(int prev, int next) const {
    const Variant& v = impl_->v;
    if (auto* u = std::get_if<UniformM>(&v)) return -u->log_k;
    if (auto* b = std::get_if<BernoulliM>(&v)) return b->logp[static_cast<std::size_t>(next)];
    if (auto* m = std::get_if<MarkovM>(&v))
        return m->logP[static_cast<std::size_t>(prev)][static_cast<std::size_t>(next)];
    if (auto* pm = std::get_if<ProductM>(&v)) {
        double s = 0.0;
        for (std::size_t ci = 0; ci < pm->comps.size(); ++ci)
            s += pm->comps[ci].chain_transition_log(component_digit(*pm, prev, static_cast<int>(ci)),
                                                    component_digit(*pm, next, static_cast<int>(ci)));
        return s;
    }
    throw PreconditionError("model has no chain factorization");
}

InvarianceReport invariance_check(const MeasureModel& m, const LocalRule& rule, int word_len,
                                  int samples, double tol, Rng& rng) {
    if (word_len < 1) throw PreconditionError("invariance check needs word_len >= 1");
    if (m.k() != rule.k()) throw ConfigError("measure and rule alphabets differ");
    double words_d = std::pow(static_cast<double>(m.k()), word_len);
    if (words_d > static_cast<double>(1 << 22))
        throw ConfigError("invariance check word space too large");
    std::size_t words = static_cast<std::size_t>(words_d);

    std::vector<std::uint64_t> tally(words, 0);
    int in_len = word_len + 2 * rule.radius;
    for (int s = 0; s < samples; ++s) {
        Rng sub = rng.substream(0x1177, static_cast<std::uint64_t>(s));
        Window w = m.sample_window(-rule.radius - word_len / 2, in_len, sub);
        Window evolved = step(rule, w);
        std::uint64_t idx = 0;
        for (int i = 0; i < word_len; ++i)
            idx = idx * static_cast<std::uint64_t>(m.k()) + evolved.cells[static_cast<std::size_t>(i)];
        ++tally[idx];
    }

    InvarianceReport rep;
    rep.word_len = word_len;
    rep.samples = samples;
    std::vector<Symbol> word(static_cast<std::size_t>(word_len));
    double max_se = 0.0;
    for (std::size_t idx = 0; idx < words; ++idx) {
        std::uint64_t rest = idx;
        for (int i = word_len - 1; i >= 0; --i) {
            word[static_cast<std::size_t>(i)] = static_cast<Symbol>(rest % static_cast<std::uint64_t>(m.k()));
            rest /= static_cast<std::uint64_t>(m.k());
        }
        double expect = std::exp(m.log_measure(word));
        double freq = static_cast<double>(tally[idx]) / static_cast<double>(samples);
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(freq - expect));
        max_se = std::max(max_se, std::sqrt(std::max(expect * (1.0 - expect), 1e-12) /
                                            static_cast<double>(samples)));
    }
    rep.threshold = tol + 3.0 * max_se;
    rep.pass = rep.max_abs_deviation <= rep.threshold;
    return rep;
}

} // namespace caflow
