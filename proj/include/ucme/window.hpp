#pragma once

#include <algorithm>
#include <limits>

#include "ucme/archive.hpp"

namespace ucme {

/// w x w block of archive cells; `origin` is the lower-left cell.
struct SelectionWindow {
    Cell origin;
    int size = 9;

    Cell center() const { return {origin.col + size / 2, origin.row + size / 2}; }
    CellRect rect() const { return {origin, {origin.col + size, origin.row + size}}; }
    bool contains(Cell c) const { return rect().contains(c); }
    /// Cell coordinates relative to the origin.
    Cell local(Cell c) const { return {c.col - origin.col, c.row - origin.row}; }
    friend bool operator==(const SelectionWindow&, const SelectionWindow&) = default;
};

inline void validate_window_size(int size, int resolution) {
    if (size < 1 || size % 2 == 0) throw Error("selection window size must be a positive odd integer");
    if (size > resolution) throw Error("selection window larger than the archive");
}

/// Centers the window on `target`, then clamps it to lie inside the grid.
inline SelectionWindow recenter(const SelectionWindow& window, Cell target, int resolution) {
    const int half = window.size / 2;
    const int hi = resolution - window.size;
    return {{std::clamp(target.col - half, 0, hi), std::clamp(target.row - half, 0, hi)}, window.size};
}

/// Places the first window on the cell holding the mean BC of all elites, or on
/// the occupied cell nearest to it (Euclidean, ties row-major) when that cell is empty.
template <typename Genome>
SelectionWindow initial_window(const EliteArchive<Genome>& feasible, int size) {
    if (feasible.empty()) throw InitializationError("initial_window: feasible archive is empty");
    validate_window_size(size, feasible.resolution());
    double sx = 0.0;
    double sy = 0.0;
    feasible.for_each([&](const auto& e) {
        sx += e.evaluation.bc.x;
        sy += e.evaluation.bc.y;
    });
    const double n = static_cast<double>(feasible.size());
    const Cell mean_cell = cell_of({sx / n, sy / n}, feasible.config());
    Cell center = mean_cell;
    if (!feasible.occupied(mean_cell)) {
        long best = std::numeric_limits<long>::max();
        for (const auto* e : feasible.elites()) {
            const long dc = e->cell.col - mean_cell.col;
            const long dr = e->cell.row - mean_cell.row;
            const long d2 = dc * dc + dr * dr;
            if (d2 < best) {
                best = d2;
                center = e->cell;
            }
        }
    }
    return recenter({{0, 0}, size}, center, feasible.resolution());
}

} // namespace ucme
