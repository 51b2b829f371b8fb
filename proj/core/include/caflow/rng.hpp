#pragma once

#include <cstdint>

namespace caflow {

// Deterministic seeded stream (splitmix64). Every randomized routine takes
// one of these explicitly; nothing in the library reads the wall clock.
//
// Substreams are derived from the root seed, not the current position, so a
// computation split across workers gives the same numbers as a serial run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : root_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), bias-free via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        // bound == 0 is a caller bug; wrap keeps it defined.
        if (bound <= 1) return 0;
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v > limit);
        return v % bound;
    }

    int next_int(int bound) { return static_cast<int>(next_below(static_cast<std::uint64_t>(bound))); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Independent stream keyed by (root seed, key). Stable across runs and
    // across how many workers consume the parent.
    Rng substream(std::uint64_t key) const {
        std::uint64_t z = root_ ^ (0x6a09e667f3bcc909ull + key * 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return Rng(z ^ (z >> 31));
    }

    Rng substream(std::uint64_t key_a, std::uint64_t key_b) const {
        return substream(key_a).substream(key_b);
    }

    std::uint64_t root_seed() const { return root_; }

private:
    std::uint64_t root_;
    std::uint64_t state_;
};

} // namespace caflow
