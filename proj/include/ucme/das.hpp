#pragma once

// Design-alternatives sampling: which occupied window cells are shown to the user.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ucme/kmedoids.hpp"
#include "ucme/window.hpp"

namespace ucme {

using Rng = std::mt19937_64;

enum class DasMethod { Random, Quadrants, Squares, Edges, Corners, Medoids };

inline constexpr std::array<DasMethod, 6> kAllDasMethods{DasMethod::Random,  DasMethod::Quadrants,
                                                         DasMethod::Squares, DasMethod::Edges,
                                                         DasMethod::Corners, DasMethod::Medoids};

inline std::string_view to_string(DasMethod m) {
    switch (m) {
    case DasMethod::Random: return "random";
    case DasMethod::Quadrants: return "quadrants";
    case DasMethod::Squares: return "squares";
    case DasMethod::Edges: return "edges";
    case DasMethod::Corners: return "corners";
    case DasMethod::Medoids: return "medoids";
    }
    return "?";
}

inline std::optional<DasMethod> parse_das_method(std::string_view name) {
    for (DasMethod m : kAllDasMethods) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

namespace detail {

inline std::size_t uniform_index(std::size_t n, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool taken(const std::vector<Cell>& chosen, Cell c) {
    return std::find(chosen.begin(), chosen.end(), c) != chosen.end();
}

inline std::vector<Cell> available(const std::vector<Cell>& pool, const std::vector<Cell>& chosen) {
    std::vector<Cell> out;
    for (const Cell& c : pool) {
        if (!taken(chosen, c)) out.push_back(c);
    }
    return out;
}

inline void draw_one(const std::vector<Cell>& pool, std::vector<Cell>& chosen, Rng& rng) {
    const auto avail = available(pool, chosen);
    if (!avail.empty()) chosen.push_back(avail[uniform_index(avail.size(), rng)]);
}

// Sector of a local cell split by the window diagonals: 0=E, 1=N, 2=W, 3=S.
// A cell on a diagonal joins the sector counterclockwise of it; the center joins E.
inline int diagonal_sector(Cell local, int size) {
    const int h = size / 2;
    const int dx = local.col - h;
    const int dy = local.row - h;
    if (dx == 0 && dy == 0) return 0;
    if (dy >= 0 && dx > -dy && dx <= dy) return 1; // NE diagonal included
    if (dx <= 0 && dy > dx && dy <= -dx) return 2; // NW diagonal included
    if (dy <= 0 && dx < -dy && dx >= dy) return 3; // SW diagonal included
    return 0;                                      // SE diagonal included
}

// Sub-square split by the center row and column; center lines go left/bottom.
// 0 = lower-left, 1 = lower-right, 2 = upper-right, 3 = upper-left.
inline int axis_square(Cell local, int size) {
    const int h = size / 2;
    const bool right = local.col > h;
    const bool top = local.row > h;
    if (!top) return right ? 1 : 0;
    return right ? 2 : 3;
}

inline std::vector<Cell> sample_sectioned(const std::vector<Cell>& occupied, const SelectionWindow& window,
                                          bool diagonals, Rng& rng) {
    std::array<std::vector<Cell>, 4> sections;
    for (const Cell& c : occupied) {
        const Cell l = window.local(c);
        const int s = diagonals ? diagonal_sector(l, window.size) : axis_square(l, window.size);
        sections[static_cast<std::size_t>(s)].push_back(c);
    }
    std::vector<Cell> chosen;
    for (const auto& section : sections) {
        if (!section.empty()) {
            draw_one(section, chosen, rng);
        } else {
            draw_one(occupied, chosen, rng);
        }
    }
    return chosen;
}

// Picks, for each anchor in order, a uniformly random cell among the still-free
// occupied cells at minimum distance to that anchor.
template <typename Dist>
std::vector<Cell> sample_nearest(const std::vector<Cell>& occupied, std::size_t anchors, Dist&& dist,
                                 Rng& rng) {
    std::vector<Cell> chosen;
    for (std::size_t a = 0; a < anchors; ++a) {
        const auto avail = available(occupied, chosen);
        if (avail.empty()) break;
        long best = std::numeric_limits<long>::max();
        std::vector<Cell> ties;
        for (const Cell& c : avail) {
            const long d = dist(a, c);
            if (d < best) {
                best = d;
                ties.clear();
            }
            if (d == best) ties.push_back(c);
        }
        chosen.push_back(ties[uniform_index(ties.size(), rng)]);
    }
    return chosen;
}

} // namespace detail

/// Window edges in the order they are sampled.
enum class WindowEdge { Bottom = 0, Right = 1, Top = 2, Left = 3 };

/// Chebyshev distance from a local cell to the cell band along a window edge.
inline long edge_distance(Cell local, WindowEdge edge, int size) {
    switch (edge) {
    case WindowEdge::Bottom: return local.row;
    case WindowEdge::Right: return size - 1 - local.col;
    case WindowEdge::Top: return size - 1 - local.row;
    case WindowEdge::Left: return local.col;
    }
    return 0;
}

/// Window corners in the order they are sampled: lower-left, lower-right, upper-right, upper-left.
inline std::array<Cell, 4> window_corners(int size) {
    return {Cell{0, 0}, Cell{size - 1, 0}, Cell{size - 1, size - 1}, Cell{0, size - 1}};
}

/// Squared Euclidean distance (exact in integers, same ordering as the distance).
inline long corner_distance2(Cell local, Cell corner) {
    const long dx = local.col - corner.col;
    const long dy = local.row - corner.row;
    return dx * dx + dy * dy;
}

/// Chooses up to `count` distinct cells among `occupied` (all inside `window`).
/// Fewer cells come back only when fewer distinct cells exist.
inline std::vector<Cell> sample_alternative_cells(DasMethod method, const SelectionWindow& window,
                                                  const std::vector<Cell>& occupied, std::size_t count,
                                                  Rng& rng) {
    if (occupied.empty()) throw ProtocolError("sample_alternatives: no occupied cell in window");
    std::vector<Cell> chosen;
    switch (method) {
    case DasMethod::Random:
        for (std::size_t i = 0; i < count; ++i) detail::draw_one(occupied, chosen, rng);
        break;
    case DasMethod::Quadrants:
        chosen = detail::sample_sectioned(occupied, window, true, rng);
        break;
    case DasMethod::Squares:
        chosen = detail::sample_sectioned(occupied, window, false, rng);
        break;
    case DasMethod::Edges:
        chosen = detail::sample_nearest(
            occupied, 4,
            [&](std::size_t a, Cell c) {
                return edge_distance(window.local(c), static_cast<WindowEdge>(a), window.size);
            },
            rng);
        break;
    case DasMethod::Corners: {
        const auto corners = window_corners(window.size);
        chosen = detail::sample_nearest(
            occupied, 4, [&](std::size_t a, Cell c) { return corner_distance2(window.local(c), corners[a]); },
            rng);
        break;
    }
    case DasMethod::Medoids:
        chosen = kmedoids(occupied, count);
        break;
    }
    if (chosen.size() > count) chosen.resize(count);
    while (chosen.size() < count && chosen.size() < occupied.size()) detail::draw_one(occupied, chosen, rng);
    return chosen;
}

} // namespace ucme
