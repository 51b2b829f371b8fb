#include "caflow/sturmian.hpp"

#include <algorithm>

#include "caflow/errors.hpp"

namespace caflow {

RotationCoding::RotationCoding(long long p, long long q, long long threshold)
    : p_(p), q_(q), t_(threshold) {
    if (q <= 1 || p <= 0 || p >= q) throw ConfigError("rotation convergent must satisfy 0 < p < q");
    if (threshold <= 0 || threshold >= q) throw ConfigError("coding threshold out of (0, q)");
}

RotationCoding::IntervalSet RotationCoding::restrict(const IntervalSet& set, Symbol s,
                                                     long long pos) const {
    // The preimage of symbol s at position pos is one arc shifted by -pos*p.
    // Arc for symbol 1 at position 0 is [t, q); for 0 it is [0, t).
    long long shift = static_cast<long long>((__int128(pos) * p_) % q_);
    long long lo = (s == 1 ? t_ : 0) - shift;
    long long hi = (s == 1 ? q_ : t_) - shift;
    lo %= q_;
    if (lo < 0) lo += q_;
    hi %= q_;
    if (hi < 0) hi += q_;

    // Unwrap the arc into at most two linear intervals over [0, q).
    std::vector<std::pair<long long, long long>> arc;
    if (lo < hi) {
        arc.emplace_back(lo, hi);
    } else {
        arc.emplace_back(lo, q_);
        arc.emplace_back(0, hi);
    }

    IntervalSet out;
    for (auto& [a, b] : set.parts) {
        for (auto& [c, d] : arc) {
            long long x = std::max(a, c);
            long long y = std::min(b, d);
            if (x < y) out.parts.emplace_back(x, y);
        }
    }
    std::sort(out.parts.begin(), out.parts.end());
    return out;
}

RotationCoding::IntervalSet RotationCoding::word_preimage(std::span<const Symbol> word,
                                                          long long pos0) const {
    IntervalSet set = full();
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (word[i] > 1) return IntervalSet{};
        set = restrict(set, word[i], pos0 + static_cast<long long>(i));
        if (set.empty()) return set;
    }
    return set;
}

long long RotationCoding::select(const IntervalSet& set, long long n) const {
    for (auto& [a, b] : set.parts) {
        long long len = b - a;
        if (n < len) return a + n;
        n -= len;
    }
    throw PreconditionError("interval selection index out of range");
}

} // namespace caflow
