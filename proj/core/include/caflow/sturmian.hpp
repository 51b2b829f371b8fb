#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "caflow/alphabet.hpp"
#include "caflow/rng.hpp"

namespace caflow {

// Circle-rotation coding machinery behind the Sturmian measure.
//
// The rotation number is a rational convergent p/q, so every phase interval
// endpoint is a multiple of 1/q and all set operations are exact integer
// arithmetic on "atoms" [j/q, (j+1)/q). Cell i of the coding of phase j is
// 1 iff (j + i*p) mod q lands in [t, q) where t is the integer threshold
// (default q - p, i.e. the arc of length alpha ending at 1).
class RotationCoding {
public:
    RotationCoding(long long p, long long q, long long threshold);

    long long q() const { return q_; }
    long long p() const { return p_; }

    Symbol code_atom(long long atom) const { return atom >= t_ ? 1 : 0; }

    // Symbol at position `pos` for the orbit whose phase atom at position 0
    // is `atom0`.
    Symbol code_at(long long atom0, long long pos) const {
        return code_atom(advance(atom0, pos));
    }

    long long advance(long long atom0, long long pos) const {
        long long shift = static_cast<long long>((__int128(pos) * p_) % q_);
        long long a = atom0 + shift;
        a %= q_;
        if (a < 0) a += q_;
        return a;
    }

    // Sorted disjoint half-open atom intervals over [0, q).
    struct IntervalSet {
        std::vector<std::pair<long long, long long>> parts;
        long long total() const {
            long long t = 0;
            for (auto& [a, b] : parts) t += b - a;
            return t;
        }
        bool empty() const { return parts.empty(); }
    };

    IntervalSet full() const { return IntervalSet{{{0, q_}}}; }

    // Atoms whose coding carries `word` starting at relative position `pos0`.
    IntervalSet word_preimage(std::span<const Symbol> word, long long pos0 = 0) const;

    // Intersect `set` with the preimage of symbol s at relative position pos.
    IntervalSet restrict(const IntervalSet& set, Symbol s, long long pos) const;

    // n-th atom of the set, 0 <= n < total().
    long long select(const IntervalSet& set, long long n) const;

    long long uniform_atom(Rng& rng) const { return static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(q_))); }

    long long uniform_atom_in(const IntervalSet& set, Rng& rng) const {
        return select(set, static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(set.total()))));
    }

private:
    long long p_;
    long long q_;
    long long t_;
};

} // namespace caflow
