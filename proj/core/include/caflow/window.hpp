#pragma once

#include <span>
#include <string>
#include <vector>

#include "caflow/alphabet.hpp"
#include "caflow/errors.hpp"

namespace caflow {

// Finite block of cells with an absolute offset: the cylinder carrier used
// for configurations, class restrictions and samples alike.
struct Window {
    int offset = 0;
    std::vector<Symbol> cells;

    Window() = default;
    Window(int off, std::vector<Symbol> syms) : offset(off), cells(std::move(syms)) {}

    int size() const { return static_cast<int>(cells.size()); }
    int lo() const { return offset; }
    int hi() const { return offset + size() - 1; }
    bool covers(int a, int b) const { return lo() <= a && b <= hi(); }

    Symbol at(int coord) const { return cells[static_cast<std::size_t>(coord - offset)]; }
    Symbol& at(int coord) { return cells[static_cast<std::size_t>(coord - offset)]; }

    // Copy of cells [a, b]; requires coverage.
    Window slice(int a, int b) const {
        if (!covers(a, b)) throw PreconditionError("window slice out of range");
        return Window(a, std::vector<Symbol>(cells.begin() + (a - offset),
                                             cells.begin() + (b - offset + 1)));
    }

    std::span<const Symbol> span() const { return {cells.data(), cells.size()}; }

    bool operator==(const Window& o) const { return offset == o.offset && cells == o.cells; }
};

// Text form "<offset>:<digits>"; product symbols print as comma-separated
// digit groups ("-3:10,01,11").
std::string format_window(const Window& w, const Alphabet& alphabet);
Window parse_window(const std::string& text, const Alphabet& alphabet);

} // namespace caflow
