#pragma once

// Initial layout generation and the destroy-then-repair mutation.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ucme/das.hpp"
#include "ucme/floorplan/layout.hpp"

namespace ucme::floorplan {

struct FloorplanParams {
    std::size_t site_count = 300;
    double move_min = 0.1; ///< m, site displacement for ShiftAll and JitterSubset
    double move_max = 1.0;
    double jitter_fraction_min = 0.01;
    double jitter_fraction_max = 0.10;
    int expand_rings_max = 3;
    double erode_fraction = 0.3;
    double opening_delete_probability = 0.3;
    int adjacency_path_limit = 20;
};

enum class DestructionOp { ShiftAll, JitterSubset, DeleteRoom, UnsafeExpand, SafeExpand, Erode, DeleteOpenings };

inline constexpr std::array<DestructionOp, 7> kAllDestructionOps{
    DestructionOp::ShiftAll,   DestructionOp::JitterSubset, DestructionOp::DeleteRoom,    DestructionOp::UnsafeExpand,
    DestructionOp::SafeExpand, DestructionOp::Erode,        DestructionOp::DeleteOpenings};

inline std::string_view to_string(DestructionOp op) {
    switch (op) {
    case DestructionOp::ShiftAll: return "shift_all";
    case DestructionOp::JitterSubset: return "jitter_subset";
    case DestructionOp::DeleteRoom: return "delete_room";
    case DestructionOp::UnsafeExpand: return "unsafe_expand";
    case DestructionOp::SafeExpand: return "safe_expand";
    case DestructionOp::Erode: return "erode";
    case DestructionOp::DeleteOpenings: return "delete_openings";
    }
    return "?";
}

namespace detail {

using ucme::detail::uniform_index;

inline double uniform(double lo, double hi, Rng& rng) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Mutable working copy of a genome with room ids resolved to unit indices.
struct Draft {
    const DesignSpec* ds = nullptr;
    std::vector<Vec2> sites;
    std::shared_ptr<const Tessellation> tess;
    RoomMap rooms;
    std::vector<Opening> openings;

    Draft(const LayoutGenome& g, const DesignSpec& spec)
        : ds(&spec), sites(g.sites), tess(g.tessellation), rooms(room_map(g, spec)), openings(g.openings) {}

    const Tessellation& t() const { return *tess; }

    LayoutGenome finish() && {
        LayoutGenome g;
        g.sites = std::move(sites);
        g.tessellation = std::move(tess);
        g.assignment = assignment_ids(rooms, *ds);
        g.openings = std::move(openings);
        return g;
    }

    double area(int unit) const {
        double a = 0.0;
        for (std::size_t c = 0; c < rooms.size(); ++c) {
            if (rooms[c] == unit) a += t().cells[c].area;
        }
        return a;
    }

    bool placed(int unit) const { return std::find(rooms.begin(), rooms.end(), unit) != rooms.end(); }

    std::vector<int> placed_units() const {
        std::vector<int> out;
        for (std::size_t u = 0; u < ds->units.size(); ++u) {
            if (placed(static_cast<int>(u))) out.push_back(static_cast<int>(u));
        }
        return out;
    }

    void drop_openings_of(int unit) {
        const int id = ds->units[static_cast<std::size_t>(unit)].id;
        std::erase_if(openings, [id](const Opening& o) { return o.room_a == id || o.room_b == id; });
    }
};

inline void reflect_into(Vec2& p, double w, double h) {
    auto fold = [](double v, double hi) {
        if (v < 0.0) v = -v;
        if (v > hi) v = 2.0 * hi - v;
        return std::clamp(v, 0.0, hi);
    };
    p.x = fold(p.x, w);
    p.y = fold(p.y, h);
}

/// Replaces the sites; on a degenerate tessellation the draft is left unchanged.
inline bool retessellate(Draft& d, std::vector<Vec2> sites) {
    try {
        auto t = std::make_shared<const Tessellation>(tessellate(sites, d.ds->width, d.ds->height));
        d.tess = std::move(t);
        d.sites = std::move(sites);
        return true;
    } catch (const EvaluationError&) {
        return false;
    }
}

/// Adds unassigned frontier cells to `unit`, uniformly at random, until its
/// area reaches `target` or no frontier is left. At most `max_cells` additions.
/// The frontier only crosses edges at least the pathway width, so growth never
/// creates a passage narrower than that.
inline void grow(Draft& d, int unit, double target, Rng& rng,
                 std::size_t max_cells = std::numeric_limits<std::size_t>::max()) {
    const Tessellation& t = d.t();
    double area = d.area(unit);
    std::vector<int> frontier;
    std::vector<char> queued(d.rooms.size(), 0);
    auto enqueue_neighbors = [&](int c) {
        for (const Neighbor& nb : t.neighbors[static_cast<std::size_t>(c)]) {
            const auto n = static_cast<std::size_t>(nb.cell);
            if (t.edges[static_cast<std::size_t>(nb.edge)].length < kPathwayWidth) continue;
            if (d.rooms[n] == kNoRoom && !queued[n]) {
                queued[n] = 1;
                frontier.push_back(nb.cell);
            }
        }
    };
    for (std::size_t c = 0; c < d.rooms.size(); ++c) {
        if (d.rooms[c] == unit) enqueue_neighbors(static_cast<int>(c));
    }
    std::size_t added = 0;
    while (area < target && !frontier.empty() && added < max_cells) {
        const std::size_t pick = uniform_index(frontier.size(), rng);
        const int c = frontier[pick];
        frontier[pick] = frontier.back();
        frontier.pop_back();
        d.rooms[static_cast<std::size_t>(c)] = unit;
        area += t.cells[static_cast<std::size_t>(c)].area;
        ++added;
        enqueue_neighbors(c);
    }
}

/// Seeds `unit` next to an already placed required neighbour when possible,
/// else on any unassigned cell, then grows it to its target area.
inline bool place_room(Draft& d, int unit, Rng& rng) {
    const Tessellation& t = d.t();
    const int id = d.ds->units[static_cast<std::size_t>(unit)].id;
    std::vector<char> partner(d.ds->units.size(), 0);
    for (const auto& [a, b] : d.ds->adjacencies) {
        if (a == id) partner[static_cast<std::size_t>(d.ds->index_of(b))] = 1;
        if (b == id) partner[static_cast<std::size_t>(d.ds->index_of(a))] = 1;
    }
    std::vector<int> near;
    std::vector<int> free;
    for (std::size_t c = 0; c < d.rooms.size(); ++c) {
        if (d.rooms[c] != kNoRoom) continue;
        free.push_back(static_cast<int>(c));
        for (const Neighbor& nb : t.neighbors[c]) {
            const int r = d.rooms[static_cast<std::size_t>(nb.cell)];
            if (r != kNoRoom && partner[static_cast<std::size_t>(r)]) {
                near.push_back(static_cast<int>(c));
                break;
            }
        }
    }
    const auto& pool = near.empty() ? free : near;
    if (pool.empty()) return false;
    const int seed = pool[uniform_index(pool.size(), rng)];
    d.rooms[static_cast<std::size_t>(seed)] = unit;
    grow(d, unit, d.ds->units[static_cast<std::size_t>(unit)].target_area, rng);
    return true;
}

/// Cells of `unit` on its exterior: touching the plot border or another room or free space.
inline std::vector<int> exterior_cells(const Draft& d, int unit) {
    const Tessellation& t = d.t();
    std::vector<int> out;
    for (std::size_t c = 0; c < d.rooms.size(); ++c) {
        if (d.rooms[c] != unit) continue;
        bool exterior = t.cells[c].touches_border;
        for (const Neighbor& nb : t.neighbors[c]) {
            if (exterior) break;
            exterior = d.rooms[static_cast<std::size_t>(nb.cell)] != unit;
        }
        if (exterior) out.push_back(static_cast<int>(c));
    }
    return out;
}

/// Keeps only valid openings that fill a prescribed slot on a distinct edge.
inline void prune_openings(Draft& d) {
    const DesignSpec& ds = *d.ds;
    std::vector<int> doors(ds.adjacencies.size(), 0);
    std::vector<int> entrances(ds.units.size(), 0);
    std::vector<int> windows(ds.units.size(), 0);
    std::unordered_set<std::uint64_t> used;
    std::vector<Opening> kept;
    for (const Opening& op : d.openings) {
        if (used.contains(op.edge.packed()) || !opening_valid(d.t(), d.rooms, ds, op)) continue;
        bool keep = false;
        const int ua = ds.index_of(op.room_a);
        switch (op.kind) {
        case OpeningKind::Door:
            for (std::size_t i = 0; i < ds.adjacencies.size(); ++i) {
                const auto [a, b] = ds.adjacencies[i];
                if (((a == op.room_a && b == op.room_b) || (a == op.room_b && b == op.room_a)) && doors[i] == 0) {
                    doors[i] = 1;
                    keep = true;
                    break;
                }
            }
            break;
        case OpeningKind::Entrance:
            if (entrances[static_cast<std::size_t>(ua)] < ds.units[static_cast<std::size_t>(ua)].entrances) {
                ++entrances[static_cast<std::size_t>(ua)];
                keep = true;
            }
            break;
        case OpeningKind::Window:
            if (windows[static_cast<std::size_t>(ua)] < ds.units[static_cast<std::size_t>(ua)].windows) {
                ++windows[static_cast<std::size_t>(ua)];
                keep = true;
            }
            break;
        }
        if (keep) {
            used.insert(op.edge.packed());
            kept.push_back(op);
        }
    }
    d.openings = std::move(kept);
}

/// Prunes, then places every missing prescribed opening on a uniformly chosen free qualifying edge.
inline void fill_openings(Draft& d, Rng& rng) {
    prune_openings(d);
    const DesignSpec& ds = *d.ds;
    const Tessellation& t = d.t();
    std::unordered_set<std::uint64_t> used;
    for (const Opening& op : d.openings) used.insert(op.edge.packed());

    auto place = [&](OpeningKind kind, int ua, int ub, int missing) {
        if (missing <= 0) return;
        auto edges = qualifying_edges(t, d.rooms, ds, kind, ua, ub);
        std::erase_if(edges, [&](int e) { return used.contains(t.edges[static_cast<std::size_t>(e)].key.packed()); });
        for (int k = 0; k < missing && !edges.empty(); ++k) {
            const std::size_t pick = uniform_index(edges.size(), rng);
            const VoronoiEdge& e = t.edges[static_cast<std::size_t>(edges[pick])];
            edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(pick));
            used.insert(e.key.packed());
            d.openings.push_back({kind, e.key, ds.units[static_cast<std::size_t>(ua)].id,
                                  ub == kNoRoom ? kNoRoom : ds.units[static_cast<std::size_t>(ub)].id});
        }
    };

    for (const auto& [a, b] : ds.adjacencies) {
        const bool has = std::any_of(d.openings.begin(), d.openings.end(), [&](const Opening& o) {
            return o.kind == OpeningKind::Door &&
                   ((o.room_a == a && o.room_b == b) || (o.room_a == b && o.room_b == a));
        });
        if (!has) place(OpeningKind::Door, ds.index_of(a), ds.index_of(b), 1);
    }
    for (std::size_t u = 0; u < ds.units.size(); ++u) {
        const SpaceUnit& su = ds.units[u];
        auto count = [&](OpeningKind kind) {
            return static_cast<int>(std::count_if(d.openings.begin(), d.openings.end(), [&](const Opening& o) {
                return o.kind == kind && o.room_a == su.id;
            }));
        };
        place(OpeningKind::Entrance, static_cast<int>(u), kNoRoom, su.entrances - count(OpeningKind::Entrance));
        if (su.kind == UnitKind::Interior) {
            place(OpeningKind::Window, static_cast<int>(u), kNoRoom, su.windows - count(OpeningKind::Window));
        }
    }
}

inline std::vector<Vec2> random_sites(const DesignSpec& ds, std::size_t n, Rng& rng) {
    std::vector<Vec2> sites;
    sites.reserve(n);
    while (sites.size() < n) {
        const Vec2 p{uniform(0.0, ds.width, rng), uniform(0.0, ds.height, rng)};
        const bool clash = std::any_of(sites.begin(), sites.end(),
                                       [&](Vec2 q) { return distance(p, q) < kMinSiteSeparation; });
        if (!clash) sites.push_back(p);
    }
    return sites;
}

inline Vec2 random_move(const FloorplanParams& params, Rng& rng) {
    const double mag = uniform(params.move_min, params.move_max, rng);
    const double dir = uniform(0.0, 2.0 * std::numbers::pi, rng);
    return {mag * std::cos(dir), mag * std::sin(dir)};
}

inline void expand(Draft& d, int unit, int rings, bool overwrite) {
    const Tessellation& t = d.t();
    for (int r = 0; r < rings; ++r) {
        std::vector<int> ring;
        for (std::size_t c = 0; c < d.rooms.size(); ++c) {
            if (d.rooms[c] != unit) continue;
            for (const Neighbor& nb : t.neighbors[c]) {
                const int other = d.rooms[static_cast<std::size_t>(nb.cell)];
                if (other == unit) continue;
                if (other != kNoRoom && !overwrite) continue;
                ring.push_back(nb.cell);
            }
        }
        if (ring.empty()) return;
        for (int c : ring) d.rooms[static_cast<std::size_t>(c)] = unit;
    }
}

inline void destroy(Draft& d, DestructionOp op, const FloorplanParams& params, Rng& rng) {
    const auto rooms = d.placed_units();
    switch (op) {
    case DestructionOp::ShiftAll: {
        const Vec2 shift = random_move(params, rng);
        auto sites = d.sites;
        for (Vec2& s : sites) {
            s = s + shift;
            reflect_into(s, d.ds->width, d.ds->height);
        }
        retessellate(d, std::move(sites));
        break;
    }
    case DestructionOp::JitterSubset: {
        const std::size_t n = d.sites.size();
        const auto lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(params.jitter_fraction_min * n)));
        const auto hi = std::max(lo, static_cast<std::size_t>(std::lround(params.jitter_fraction_max * n)));
        const std::size_t count = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        auto sites = d.sites;
        for (std::size_t k = 0; k < count && k < n; ++k) {
            Vec2& s = sites[order[k]];
            s = s + random_move(params, rng);
            reflect_into(s, d.ds->width, d.ds->height);
        }
        retessellate(d, std::move(sites));
        break;
    }
    case DestructionOp::DeleteRoom: {
        if (rooms.empty()) return;
        const int unit = rooms[uniform_index(rooms.size(), rng)];
        for (int& r : d.rooms) {
            if (r == unit) r = kNoRoom;
        }
        d.drop_openings_of(unit);
        break;
    }
    case DestructionOp::UnsafeExpand:
    case DestructionOp::SafeExpand: {
        if (rooms.empty()) return;
        const int unit = rooms[uniform_index(rooms.size(), rng)];
        const int rings = std::uniform_int_distribution<int>(1, params.expand_rings_max)(rng);
        expand(d, unit, rings, op == DestructionOp::UnsafeExpand);
        break;
    }
    case DestructionOp::Erode: {
        if (rooms.empty()) return;
        const int unit = rooms[uniform_index(rooms.size(), rng)];
        const auto cells = cells_of(d.rooms, unit);
        const int limit = static_cast<int>(std::floor(params.erode_fraction * static_cast<double>(cells.size())));
        if (limit < 1) return;
        const int quota = std::uniform_int_distribution<int>(1, limit)(rng);
        auto candidates = exterior_cells(d, unit);
        std::shuffle(candidates.begin(), candidates.end(), rng);
        int removed = 0;
        for (int c : candidates) {
            if (removed >= quota) break;
            if (!is_connected_without(d.t(), d.rooms, unit, c, kPathwayWidth)) continue;
            d.rooms[static_cast<std::size_t>(c)] = kNoRoom;
            ++removed;
        }
        break;
    }
    case DestructionOp::DeleteOpenings: {
        std::bernoulli_distribution drop(params.opening_delete_probability);
        std::vector<Opening> kept;
        for (const Opening& o : d.openings) {
            if (!drop(rng)) kept.push_back(o);
        }
        d.openings = std::move(kept);
        break;
    }
    }
}

// Shortest path of free cells from `from` to a free cell sharing a door-wide edge with `to`.
inline std::vector<int> free_path(const Draft& d, int from, int to, int limit) {
    const Tessellation& t = d.t();
    const std::size_t n = d.rooms.size();
    std::vector<int> parent(n, -2);
    std::vector<int> depth(n, 0);
    std::queue<int> q;
    for (std::size_t c = 0; c < n; ++c) {
        if (d.rooms[c] != from) continue;
        for (const Neighbor& nb : t.neighbors[c]) {
            const auto m = static_cast<std::size_t>(nb.cell);
            if (t.edges[static_cast<std::size_t>(nb.edge)].length < kPathwayWidth) continue;
            if (d.rooms[m] == kNoRoom && parent[m] == -2) {
                parent[m] = -1;
                depth[m] = 1;
                q.push(nb.cell);
            }
        }
    }
    while (!q.empty()) {
        const int c = q.front();
        q.pop();
        const auto cu = static_cast<std::size_t>(c);
        for (const Neighbor& nb : t.neighbors[cu]) {
            if (d.rooms[static_cast<std::size_t>(nb.cell)] == to &&
                t.edges[static_cast<std::size_t>(nb.edge)].length >= kDoorWidth) {
                std::vector<int> path;
                for (int p = c; p != -1; p = parent[static_cast<std::size_t>(p)]) path.push_back(p);
                return path;
            }
        }
        if (depth[cu] >= limit) continue;
        for (const Neighbor& nb : t.neighbors[cu]) {
            const auto m = static_cast<std::size_t>(nb.cell);
            if (t.edges[static_cast<std::size_t>(nb.edge)].length < kPathwayWidth) continue;
            if (d.rooms[m] == kNoRoom && parent[m] == -2) {
                parent[m] = c;
                depth[m] = depth[cu] + 1;
                q.push(nb.cell);
            }
        }
    }
    return {};
}

inline void repair(Draft& d, const FloorplanParams& params, Rng& rng) {
    const DesignSpec& ds = *d.ds;
    const auto order = ds.placement_order();

    // (1) missing rooms, when the free area can reach the precision threshold
    for (int u : order) {
        if (d.placed(u)) continue;
        double free_area = 0.0;
        for (std::size_t c = 0; c < d.rooms.size(); ++c) {
            if (d.rooms[c] == kNoRoom) free_area += d.t().cells[c].area;
        }
        if (free_area >= kMinAreaPrecision * ds.units[static_cast<std::size_t>(u)].target_area) {
            place_room(d, u, rng);
        }
    }

    // (2) one component per room, regrown toward the target. Segments joined
    // only through passages narrower than the pathway width count as separate.
    for (int u : order) {
        auto comps = room_components(d.t(), d.rooms, u, kPathwayWidth);
        if (comps.size() <= 1) continue;
        std::size_t keep = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            double a = 0.0;
            for (int c : comps[i]) a += d.t().cells[static_cast<std::size_t>(c)].area;
            if (a > best) {
                best = a;
                keep = i;
            }
        }
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (i == keep) continue;
            for (int c : comps[i]) d.rooms[static_cast<std::size_t>(c)] = kNoRoom;
        }
        grow(d, u, ds.units[static_cast<std::size_t>(u)].target_area, rng);
    }

    // (3) grow toward required neighbours lacking a door-wide shared edge
    for (const auto& [a, b] : ds.adjacencies) {
        const int ua = ds.index_of(a);
        const int ub = ds.index_of(b);
        if (!d.placed(ua) || !d.placed(ub)) continue;
        if (shared_boundary(d.t(), d.rooms, ua, ub).longest >= kDoorWidth) continue;
        std::array<std::pair<int, int>, 2> tries{{{ua, ub}, {ub, ua}}};
        if (std::bernoulli_distribution(0.5)(rng)) std::swap(tries[0], tries[1]);
        for (const auto& [from, to] : tries) {
            const auto path = free_path(d, from, to, params.adjacency_path_limit);
            if (path.empty()) continue;
            for (int c : path) d.rooms[static_cast<std::size_t>(c)] = from;
            break;
        }
    }

    // (4) add or remove frontier cells until each room's area precision reaches the threshold
    for (int u : order) {
        if (!d.placed(u)) continue;
        const double target = ds.units[static_cast<std::size_t>(u)].target_area;
        double area = d.area(u);
        if (area < target * kMinAreaPrecision) {
            grow(d, u, target * kMinAreaPrecision, rng);
        } else if (area > target / kMinAreaPrecision) {
            const Tessellation& t = d.t();
            for (;;) {
                auto candidates = exterior_cells(d, u);
                std::shuffle(candidates.begin(), candidates.end(), rng);
                bool removed = false;
                for (int c : candidates) {
                    if (candidates.size() <= 1) break;
                    if (!is_connected_without(t, d.rooms, u, c, kPathwayWidth)) continue;
                    d.rooms[static_cast<std::size_t>(c)] = kNoRoom;
                    area -= t.cells[static_cast<std::size_t>(c)].area;
                    removed = true;
                    break;
                }
                if (!removed || area <= target / kMinAreaPrecision) break;
            }
        }
    }

    // (5) openings
    fill_openings(d, rng);
}

} // namespace detail

inline LayoutGenome generate_initial(const DesignSpec& ds, const FloorplanParams& params, Rng& rng) {
    auto genome = LayoutGenome::from_sites(detail::random_sites(ds, params.site_count, rng), ds.width, ds.height);
    detail::Draft d(genome, ds);
    for (int u : ds.placement_order()) detail::place_room(d, u, rng);
    detail::fill_openings(d, rng);
    return std::move(d).finish();
}

/// Drops invalid or extraneous openings and places the missing prescribed ones.
inline LayoutGenome place_openings(const LayoutGenome& genome, const DesignSpec& ds, Rng& rng) {
    detail::Draft d(genome, ds);
    detail::fill_openings(d, rng);
    return std::move(d).finish();
}

inline LayoutGenome destruction(const LayoutGenome& genome, DestructionOp op, const DesignSpec& ds,
                                const FloorplanParams& params, Rng& rng) {
    detail::Draft d(genome, ds);
    detail::destroy(d, op, params, rng);
    return std::move(d).finish();
}

inline LayoutGenome repair(const LayoutGenome& genome, const DesignSpec& ds, const FloorplanParams& params,
                           Rng& rng) {
    detail::Draft d(genome, ds);
    detail::repair(d, params, rng);
    return std::move(d).finish();
}

/// Applies 1 to 3 distinct destruction operators, then the full repair sequence.
inline LayoutGenome mutate(const LayoutGenome& parent, const DesignSpec& ds, const FloorplanParams& params,
                           Rng& rng) {
    detail::Draft d(parent, ds);
    const int k = std::uniform_int_distribution<int>(1, 3)(rng);
    auto ops = kAllDestructionOps;
    std::shuffle(ops.begin(), ops.end(), rng);
    for (int i = 0; i < k; ++i) detail::destroy(d, ops[static_cast<std::size_t>(i)], params, rng);
    detail::repair(d, params, rng);
    return std::move(d).finish();
}

} // namespace ucme::floorplan
