#pragma once

// Room-level queries over a tessellation and a cell -> unit-index map.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ucme/floorplan/design_spec.hpp"
#include "ucme/floorplan/genome.hpp"

namespace ucme::floorplan {

/// Unit index (position in DesignSpec::units) per cell, or kNoRoom.
using RoomMap = std::vector<int>;

inline RoomMap room_map(const LayoutGenome& g, const DesignSpec& ds) {
    RoomMap rooms(g.assignment.size(), kNoRoom);
    for (std::size_t c = 0; c < rooms.size(); ++c) {
        if (g.assignment[c] != kNoRoom) rooms[c] = ds.index_of(g.assignment[c]);
    }
    return rooms;
}

inline std::vector<int> assignment_ids(const RoomMap& rooms, const DesignSpec& ds) {
    std::vector<int> ids(rooms.size(), kNoRoom);
    for (std::size_t c = 0; c < rooms.size(); ++c) {
        if (rooms[c] != kNoRoom) ids[c] = ds.units[static_cast<std::size_t>(rooms[c])].id;
    }
    return ids;
}

inline int room_at(const RoomMap& rooms, int cell) { return rooms[static_cast<std::size_t>(cell)]; }

inline std::vector<int> cells_of(const RoomMap& rooms, int unit) {
    std::vector<int> out;
    for (std::size_t c = 0; c < rooms.size(); ++c) {
        if (rooms[c] == unit) out.push_back(static_cast<int>(c));
    }
    return out;
}

inline std::vector<double> room_areas(const Tessellation& t, const RoomMap& rooms, std::size_t unit_count) {
    std::vector<double> areas(unit_count, 0.0);
    for (std::size_t c = 0; c < rooms.size(); ++c) {
        if (rooms[c] != kNoRoom) areas[static_cast<std::size_t>(rooms[c])] += t.cells[c].area;
    }
    return areas;
}

/// Connected components of a room's cells, joined through shared edges at least
/// `min_edge` long. Components are ordered by their smallest cell index.
inline std::vector<std::vector<int>> room_components(const Tessellation& t, const RoomMap& rooms, int unit,
                                                     double min_edge = 0.0) {
    std::vector<std::vector<int>> comps;
    std::vector<char> seen(rooms.size(), 0);
    for (std::size_t start = 0; start < rooms.size(); ++start) {
        if (rooms[start] != unit || seen[start]) continue;
        std::vector<int> comp;
        std::vector<int> stack{static_cast<int>(start)};
        seen[start] = 1;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            comp.push_back(c);
            for (const Neighbor& nb : t.neighbors[static_cast<std::size_t>(c)]) {
                const auto n = static_cast<std::size_t>(nb.cell);
                if (rooms[n] != unit || seen[n]) continue;
                if (t.edges[static_cast<std::size_t>(nb.edge)].length < min_edge) continue;
                seen[n] = 1;
                stack.push_back(nb.cell);
            }
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

inline bool is_connected_without(const Tessellation& t, const RoomMap& rooms, int unit, int removed,
                                 double min_edge = 0.0) {
    RoomMap probe = rooms;
    probe[static_cast<std::size_t>(removed)] = kNoRoom;
    return room_components(t, probe, unit, min_edge).size() <= 1;
}

struct SharedBoundary {
    double total = 0.0;
    double longest = 0.0;
};

inline SharedBoundary shared_boundary(const Tessellation& t, const RoomMap& rooms, int unit_a, int unit_b) {
    SharedBoundary sb;
    for (const VoronoiEdge& e : t.edges) {
        if (e.key.on_border()) continue;
        const int ra = room_at(rooms, e.key.a);
        const int rb = room_at(rooms, e.key.b);
        if ((ra == unit_a && rb == unit_b) || (ra == unit_b && rb == unit_a)) {
            sb.total += e.length;
            sb.longest = std::max(sb.longest, e.length);
        }
    }
    return sb;
}

/// Does `edge` host an opening of `kind` for `unit` (and `other` for doors)?
/// Entrances open onto the plot border or unassigned space; windows onto the plot border.
inline bool edge_qualifies(const Tessellation& t, const RoomMap& rooms, const DesignSpec& ds, const VoronoiEdge& e,
                           OpeningKind kind, int unit, int other = kNoRoom) {
    if (e.length < required_width(kind)) return false;
    const int ra = room_at(rooms, e.key.a);
    switch (kind) {
    case OpeningKind::Door: {
        if (e.key.on_border()) return false;
        const int rb = room_at(rooms, e.key.b);
        return (ra == unit && rb == other) || (ra == other && rb == unit);
    }
    case OpeningKind::Entrance: {
        if (e.key.on_border()) return ra == unit;
        const int rb = room_at(rooms, e.key.b);
        return (ra == unit && rb == kNoRoom) || (rb == unit && ra == kNoRoom);
    }
    case OpeningKind::Window:
        return e.key.on_border() && ra == unit &&
               ds.units[static_cast<std::size_t>(unit)].kind == UnitKind::Interior;
    }
    (void)t;
    return false;
}

/// Edges currently able to host an opening of `kind` for `unit`.
inline std::vector<int> qualifying_edges(const Tessellation& t, const RoomMap& rooms, const DesignSpec& ds,
                                         OpeningKind kind, int unit, int other = kNoRoom) {
    std::vector<int> out;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        if (edge_qualifies(t, rooms, ds, t.edges[e], kind, unit, other)) out.push_back(static_cast<int>(e));
    }
    return out;
}

inline bool opening_valid(const Tessellation& t, const RoomMap& rooms, const DesignSpec& ds, const Opening& op) {
    const VoronoiEdge* e = t.find_edge(op.edge);
    if (e == nullptr) return false;
    const int ua = ds.index_of(op.room_a);
    if (ua < 0) return false;
    int ub = kNoRoom;
    if (op.kind == OpeningKind::Door) {
        ub = ds.index_of(op.room_b);
        if (ub < 0) return false;
    }
    return edge_qualifies(t, rooms, ds, *e, op.kind, ua, ub);
}

/// One prescribed opening requirement and how many of its openings are properly placed.
struct OpeningTally {
    std::size_t prescribed = 0;
    std::size_t placed = 0;
};

/// Matches valid, distinct-edge openings against every prescription:
/// one door per adjacency, `entrances` per unit, `windows` per interior unit.
inline OpeningTally tally_openings(const Tessellation& t, const RoomMap& rooms, const DesignSpec& ds,
                                   const std::vector<Opening>& openings) {
    OpeningTally tally;
    std::unordered_set<std::uint64_t> used;
    auto count_valid = [&](OpeningKind kind, int id_a, int id_b) {
        std::size_t n = 0;
        for (const Opening& op : openings) {
            if (op.kind != kind) continue;
            const bool same = kind == OpeningKind::Door
                                  ? ((op.room_a == id_a && op.room_b == id_b) || (op.room_a == id_b && op.room_b == id_a))
                                  : op.room_a == id_a;
            if (!same || used.contains(op.edge.packed())) continue;
            if (!opening_valid(t, rooms, ds, op)) continue;
            used.insert(op.edge.packed());
            ++n;
        }
        return n;
    };
    for (const auto& [a, b] : ds.adjacencies) {
        tally.prescribed += 1;
        tally.placed += std::min<std::size_t>(1, count_valid(OpeningKind::Door, a, b));
    }
    for (const SpaceUnit& u : ds.units) {
        const auto entrances = static_cast<std::size_t>(u.entrances);
        tally.prescribed += entrances;
        tally.placed += std::min(entrances, count_valid(OpeningKind::Entrance, u.id, kNoRoom));
        if (u.kind == UnitKind::Interior) {
            const auto windows = static_cast<std::size_t>(u.windows);
            tally.prescribed += windows;
            tally.placed += std::min(windows, count_valid(OpeningKind::Window, u.id, kNoRoom));
        }
    }
    return tally;
}

/// Closed boundary polygon of a room. Outer loops run counterclockwise, holes clockwise.
struct Loop {
    std::vector<Vec2> points;
    double signed_area = 0.0;
    double length = 0.0;
};

/// Straight-through vertices (interior angle within this of pi) are not wall corners.
inline constexpr double kCollinearTolerance = 1e-9;

inline std::vector<Loop> room_loops(const Tessellation& t, const RoomMap& rooms, int unit) {
    struct Segment {
        int from;
        int to;
    };
    std::vector<Segment> segments;
    std::unordered_map<int, std::vector<std::size_t>> outgoing;
    for (std::size_t c = 0; c < rooms.size(); ++c) {
        if (rooms[c] != unit) continue;
        const VoronoiCell& cell = t.cells[c];
        const std::size_t m = cell.vertices.size();
        for (std::size_t k = 0; k < m; ++k) {
            const int label = cell.labels[k];
            if (!is_border_label(label) && rooms[static_cast<std::size_t>(label)] == unit) continue;
            const int from = cell.vertices[k];
            const int to = cell.vertices[(k + 1) % m];
            if (from == to) continue;
            outgoing[from].push_back(segments.size());
            segments.push_back({from, to});
        }
    }

    std::vector<char> used(segments.size(), 0);
    std::vector<Loop> loops;
    for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
        if (used[s0]) continue;
        std::vector<int> ids;
        std::size_t s = s0;
        const int start = segments[s0].from;
        for (;;) {
            used[s] = 1;
            ids.push_back(segments[s].from);
            const int next_vertex = segments[s].to;
            if (next_vertex == start) break;
            std::size_t next = segments.size();
            if (const auto it = outgoing.find(next_vertex); it != outgoing.end()) {
                for (std::size_t cand : it->second) {
                    if (!used[cand]) {
                        next = cand;
                        break;
                    }
                }
            }
            if (next == segments.size()) break;
            s = next;
        }
        std::vector<Vec2> pts;
        pts.reserve(ids.size());
        for (int id : ids) pts.push_back(t.vertices[static_cast<std::size_t>(id)]);

        // Drop straight-through vertices until every remaining vertex is a corner.
        bool changed = true;
        while (changed && pts.size() > 3) {
            changed = false;
            for (std::size_t i = 0; i < pts.size() && pts.size() > 3; ++i) {
                const Vec2 prev = pts[(i + pts.size() - 1) % pts.size()];
                const Vec2 next = pts[(i + 1) % pts.size()];
                if (corner_angle(prev, pts[i], next) > std::numbers::pi - kCollinearTolerance) {
                    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
                    changed = true;
                    --i;
                }
            }
        }
        if (pts.size() < 3) continue;
        Loop loop;
        loop.signed_area = signed_area(pts);
        loop.length = perimeter(pts);
        loop.points = std::move(pts);
        loops.push_back(std::move(loop));
    }
    return loops;
}

} // namespace ucme::floorplan
