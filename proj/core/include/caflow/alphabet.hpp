#pragma once

#include <cstdint>
#include <vector>

#include "caflow/errors.hpp"

namespace caflow {

using Symbol = std::uint8_t;

// Finite alphabet {0, ..., size-1}. A product alphabet keeps the component
// sizes so symbols can be projected back out; encoding is mixed radix with
// the first component most significant.
struct Alphabet {
    int size = 2;
    std::vector<int> components; // empty means a single component of `size`

    Alphabet() = default;
    explicit Alphabet(int k) : size(k) {
        if (k < 2) throw ConfigError("alphabet size must be >= 2");
    }

    int component_count() const { return components.empty() ? 1 : static_cast<int>(components.size()); }

    int component_size(int idx) const {
        if (components.empty()) return size;
        return components[static_cast<std::size_t>(idx)];
    }

    // Projection of a symbol onto component idx.
    int project(int symbol, int idx) const {
        if (components.empty()) return symbol;
        int rest = symbol;
        int value = 0;
        for (std::size_t i = 0; i < components.size(); ++i) {
            int radix = 1;
            for (std::size_t j = i + 1; j < components.size(); ++j) radix *= components[j];
            value = rest / radix;
            rest %= radix;
            if (static_cast<int>(i) == idx) return value;
        }
        return value;
    }

    int encode(const std::vector<int>& parts) const {
        if (components.empty()) return parts.at(0);
        int s = 0;
        for (std::size_t i = 0; i < components.size(); ++i) {
            s = s * components[i] + parts.at(i);
        }
        return s;
    }

    static Alphabet product(const Alphabet& a, const Alphabet& b) {
        Alphabet out(a.size * b.size);
        auto push = [&out](const Alphabet& x) {
            if (x.components.empty()) out.components.push_back(x.size);
            else out.components.insert(out.components.end(), x.components.begin(), x.components.end());
        };
        push(a);
        push(b);
        return out;
    }
};

} // namespace caflow
