#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "ucme/evaluation.hpp"
#include "ucme/floorplan/layout.hpp"

namespace ucme::floorplan {

/// Indices into Evaluation::constraint_scores.
enum Constraint : std::size_t {
    kSingleRegion = 0,   ///< (a) each room is one connected region
    kAdjacency = 1,      ///< (b) required neighbours share a boundary
    kAreaPrecision = 2,  ///< (c) mean area precision reaches the threshold
    kOpenings = 3,       ///< (d) prescribed doors, entrances and windows are placed
    kPathways = 4,       ///< (e) rooms stay connected through passages at least the pathway width
    kGraphConnected = 5, ///< (f) the Voronoi cell graph is connected
    kInnerCells = 6,     ///< (g) enough cells stay off the plot border
    kConstraintCount = 7,
};

/// Running sum of per-corner orthogonality scores.
struct OrthogonalitySum {
    double total = 0.0;
    std::size_t corners = 0;
};

inline OrthogonalitySum loop_orthogonality(const std::vector<Loop>& loops) {
    OrthogonalitySum sum;
    for (const Loop& loop : loops) {
        const auto& p = loop.points;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Vec2 prev = p[(i + p.size() - 1) % p.size()];
            const Vec2 next = p[(i + 1) % p.size()];
            sum.total += orthogonality(corner_angle(prev, p[i], next));
            ++sum.corners;
        }
    }
    return sum;
}

/// Compactness of a room from its boundary loops: union area over the squared
/// length of its outer loops.
inline double room_compactness(const std::vector<Loop>& loops, double area) {
    double outer = 0.0;
    for (const Loop& l : loops) {
        if (l.signed_area > 0.0) outer += l.length;
    }
    return compactness(area, outer);
}

/// Mean compactness over placed rooms and plan orthogonality over all room corners.
inline Bc bc_vector(const Tessellation& t, const RoomMap& rooms, const DesignSpec& ds) {
    const auto areas = room_areas(t, rooms, ds.units.size());
    double compact_sum = 0.0;
    std::size_t placed = 0;
    OrthogonalitySum ortho;
    for (std::size_t u = 0; u < ds.units.size(); ++u) {
        if (areas[u] <= 0.0) continue;
        const auto loops = room_loops(t, rooms, static_cast<int>(u));
        compact_sum += room_compactness(loops, areas[u]);
        ++placed;
        const auto o = loop_orthogonality(loops);
        ortho.total += o.total;
        ortho.corners += o.corners;
    }
    if (placed == 0) return {0.0, 0.0};
    return {compact_sum / static_cast<double>(placed),
            ortho.corners == 0 ? 0.0 : ortho.total / static_cast<double>(ortho.corners)};
}

inline Bc bc_vector(const LayoutGenome& g, const DesignSpec& ds) { return bc_vector(g.tess(), room_map(g, ds), ds); }

/// Mean area precision over every DS unit; missing units score 0.
inline double mean_area_precision(const Tessellation& t, const RoomMap& rooms, const DesignSpec& ds) {
    const auto areas = room_areas(t, rooms, ds.units.size());
    double total = 0.0;
    for (std::size_t u = 0; u < ds.units.size(); ++u) {
        if (areas[u] > 0.0) total += area_precision(areas[u], ds.units[u].target_area);
    }
    return total / static_cast<double>(ds.units.size());
}

inline Evaluation evaluate(const LayoutGenome& g, const DesignSpec& ds) {
    const Tessellation& t = g.tess();
    if (t.size() != g.sites.size() || g.assignment.size() != t.size()) {
        throw EvaluationError("evaluate: genome and tessellation disagree");
    }
    const RoomMap rooms = room_map(g, ds);
    const auto areas = room_areas(t, rooms, ds.units.size());

    std::array<double, kConstraintCount> score{};

    std::size_t placed = 0;
    std::size_t single = 0;
    std::size_t passable = 0;
    for (std::size_t u = 0; u < ds.units.size(); ++u) {
        if (areas[u] <= 0.0) continue;
        ++placed;
        if (room_components(t, rooms, static_cast<int>(u)).size() == 1) ++single;
        if (room_components(t, rooms, static_cast<int>(u), kPathwayWidth).size() == 1) ++passable;
    }
    score[kSingleRegion] = placed == 0 ? 0.0 : static_cast<double>(single) / static_cast<double>(placed);
    score[kPathways] = placed == 0 ? 0.0 : static_cast<double>(passable) / static_cast<double>(placed);

    std::size_t adjacent = 0;
    for (const auto& [a, b] : ds.adjacencies) {
        const int ua = ds.index_of(a);
        const int ub = ds.index_of(b);
        if (shared_boundary(t, rooms, ua, ub).total >= kDoorWidth) ++adjacent;
    }
    score[kAdjacency] =
        ds.adjacencies.empty() ? 1.0 : static_cast<double>(adjacent) / static_cast<double>(ds.adjacencies.size());

    const double precision = mean_area_precision(t, rooms, ds);
    score[kAreaPrecision] = std::clamp(precision / kMinAreaPrecision, 0.0, 1.0);

    const OpeningTally tally = tally_openings(t, rooms, ds, g.openings);
    score[kOpenings] =
        tally.prescribed == 0 ? 1.0 : static_cast<double>(tally.placed) / static_cast<double>(tally.prescribed);

    {
        RoomMap everything(t.size(), 0);
        const auto comps = room_components(t, everything, 0);
        std::size_t largest = 0;
        for (const auto& c : comps) largest = std::max(largest, c.size());
        score[kGraphConnected] = static_cast<double>(largest) / static_cast<double>(t.size());
    }

    std::size_t inner = 0;
    for (const auto& cell : t.cells) {
        if (!cell.touches_border) ++inner;
    }
    score[kInnerCells] = std::min(1.0, (static_cast<double>(inner) / static_cast<double>(t.size())) / 0.5);

    Evaluation ev;
    ev.constraint_scores.assign(score.begin(), score.end());
    double sum = 0.0;
    bool all_met = true;
    for (double s : score) {
        sum += s;
        all_met = all_met && s == 1.0;
    }
    ev.feasibility_score = sum / static_cast<double>(kConstraintCount);
    ev.fitness = precision;
    ev.feasible = all_met && precision >= kMinAreaPrecision;
    ev.bc = bc_vector(t, rooms, ds);
    return ev;
}

} // namespace ucme::floorplan
