#pragma once

// Voronoi tessellation of a rectangular plot, computed per site by clipping the
// plot rectangle against perpendicular bisectors of nearby sites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ucme/error.hpp"
#include "ucme/geometry.hpp"

namespace ucme {

/// Sides of the plot rectangle, counterclockwise from the bottom.
enum class Side : int { Bottom = 0, Right = 1, Top = 2, Left = 3 };

/// Edge label: a non-negative neighbour cell index, or `border_label(side)`.
inline constexpr int border_label(Side s) { return -1 - static_cast<int>(s); }
inline constexpr bool is_border_label(int label) { return label < 0; }

/// Identity of a Voronoi edge that survives copying: the two incident cells
/// (lower index first) or a cell plus a border label.
struct EdgeKey {
    int a = 0;
    int b = 0;

    static EdgeKey between(int cell, int label) {
        if (is_border_label(label)) return {cell, label};
        return {std::min(cell, label), std::max(cell, label)};
    }
    bool on_border() const { return is_border_label(b); }
    std::uint64_t packed() const {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    }
    friend bool operator==(EdgeKey, EdgeKey) = default;
};

struct VoronoiEdge {
    EdgeKey key;
    int v0 = 0; ///< vertex ids, counterclockwise with respect to cell key.a
    int v1 = 0;
    double length = 0.0;
};

struct VoronoiCell {
    std::vector<int> vertices; ///< counterclockwise vertex ids
    std::vector<int> labels;   ///< labels[k] names the far side of vertices[k] -> vertices[k+1]
    double area = 0.0;
    bool touches_border = false;
};

struct Neighbor {
    int cell;
    int edge;
};

struct Tessellation {
    double width = 0.0;
    double height = 0.0;
    std::vector<Vec2> vertices;
    std::vector<VoronoiCell> cells;
    std::vector<VoronoiEdge> edges;
    std::vector<std::vector<Neighbor>> neighbors;     ///< internal adjacency, zero-length edges dropped
    std::vector<std::vector<int>> cell_edges;         ///< every edge index incident to a cell
    std::unordered_map<std::uint64_t, int> edge_index;

    std::size_t size() const { return cells.size(); }

    const VoronoiEdge* find_edge(EdgeKey key) const {
        const auto it = edge_index.find(key.packed());
        return it == edge_index.end() ? nullptr : &edges[static_cast<std::size_t>(it->second)];
    }
};

namespace detail {

struct LabeledPoint {
    Vec2 p;
    int label; // label of the edge starting at p
};

// Keeps the side where (normal . p) <= offset.
inline void clip_half_plane(std::vector<LabeledPoint>& poly, std::vector<LabeledPoint>& scratch,
                            Vec2 normal, double offset, int label) {
    scratch.clear();
    const std::size_t n = poly.size();
    auto value = [&](Vec2 p) { return dot(normal, p) - offset; };
    auto push = [&](Vec2 p, int lab) {
        if (!scratch.empty() && distance(scratch.back().p, p) < 1e-12) {
            scratch.back().label = lab;
            return;
        }
        scratch.push_back({p, lab});
    };
    bool any_outside = false;
    for (std::size_t k = 0; k < n; ++k) {
        if (value(poly[k].p) > 0.0) {
            any_outside = true;
            break;
        }
    }
    if (!any_outside) return;
    for (std::size_t k = 0; k < n; ++k) {
        const LabeledPoint& a = poly[k];
        const LabeledPoint& b = poly[(k + 1) % n];
        const double fa = value(a.p);
        const double fb = value(b.p);
        const bool a_in = fa <= 0.0;
        const bool b_in = fb <= 0.0;
        if (a_in) {
            push(a.p, a.label);
            if (!b_in) {
                const double t = fa / (fa - fb);
                push(a.p + t * (b.p - a.p), label);
            }
        } else if (b_in) {
            const double t = fa / (fa - fb);
            push(a.p + t * (b.p - a.p), a.label);
        }
    }
    if (scratch.size() > 1 && distance(scratch.front().p, scratch.back().p) < 1e-12) {
        scratch.pop_back();
    }
    poly.swap(scratch);
}

class VertexPool {
  public:
    explicit VertexPool(double tol) : tol_(tol) {}

    int intern(Vec2 p, std::vector<Vec2>& out) {
        const auto ix = static_cast<std::int64_t>(std::floor(p.x / tol_));
        const auto iy = static_cast<std::int64_t>(std::floor(p.y / tol_));
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto it = bins_.find(key(ix + dx, iy + dy));
                if (it == bins_.end()) continue;
                for (int id : it->second) {
                    if (distance(out[static_cast<std::size_t>(id)], p) <= tol_) return id;
                }
            }
        }
        const int id = static_cast<int>(out.size());
        out.push_back(p);
        bins_[key(ix, iy)].push_back(id);
        return id;
    }

  private:
    static std::uint64_t key(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint64_t>(y & 0xffffffff);
    }
    double tol_;
    std::unordered_map<std::uint64_t, std::vector<int>> bins_;
};

} // namespace detail

/// Minimum separation between sites; closer pairs make the tessellation degenerate.
inline constexpr double kMinSiteSeparation = 1e-6;

/// Clipped Voronoi diagram of `sites` inside [0,width] x [0,height].
/// Throws EvaluationError when two sites coincide or a site lies outside the plot.
inline Tessellation tessellate(const std::vector<Vec2>& sites, double width, double height) {
    const std::size_t n = sites.size();
    if (n == 0) throw EvaluationError("tessellate: no sites");
    for (const Vec2& s : sites) {
        if (!(s.x >= 0.0 && s.x <= width && s.y >= 0.0 && s.y <= height)) {
            throw EvaluationError("tessellate: site outside plot bounds");
        }
    }

    const double bucket = std::sqrt(width * height / static_cast<double>(n));
    const int gx = std::max(1, static_cast<int>(std::ceil(width / bucket)));
    const int gy = std::max(1, static_cast<int>(std::ceil(height / bucket)));
    std::vector<std::vector<int>> grid(static_cast<std::size_t>(gx * gy));
    auto bucket_of = [&](Vec2 p) {
        const int bx = std::clamp(static_cast<int>(p.x / bucket), 0, gx - 1);
        const int by = std::clamp(static_cast<int>(p.y / bucket), 0, gy - 1);
        return std::pair{bx, by};
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto [bx, by] = bucket_of(sites[i]);
        grid[static_cast<std::size_t>(by * gx + bx)].push_back(static_cast<int>(i));
    }

    Tessellation t;
    t.width = width;
    t.height = height;
    t.cells.resize(n);
    detail::VertexPool pool(1e-7);

    std::vector<detail::LabeledPoint> poly;
    std::vector<detail::LabeledPoint> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 si = sites[i];
        poly = {{{0.0, 0.0}, border_label(Side::Bottom)},
                {{width, 0.0}, border_label(Side::Right)},
                {{width, height}, border_label(Side::Top)},
                {{0.0, height}, border_label(Side::Left)}};
        const auto [bx, by] = bucket_of(si);
        const int max_ring = std::max(gx, gy);
        for (int ring = 0; ring <= max_ring; ++ring) {
            for (int cy = by - ring; cy <= by + ring; ++cy) {
                if (cy < 0 || cy >= gy) continue;
                const bool full_row = (cy == by - ring || cy == by + ring);
                for (int cx = bx - ring; cx <= bx + ring; cx += (full_row ? 1 : 2 * ring)) {
                    if (cx >= 0 && cx < gx) {
                        for (int j : grid[static_cast<std::size_t>(cy * gx + cx)]) {
                            if (static_cast<std::size_t>(j) == i) continue;
                            const Vec2 sj = sites[static_cast<std::size_t>(j)];
                            if (distance(si, sj) < kMinSiteSeparation) {
                                throw EvaluationError("tessellate: coincident sites");
                            }
                            const Vec2 normal = sj - si;
                            const double offset = 0.5 * (dot(sj, sj) - dot(si, si));
                            detail::clip_half_plane(poly, scratch, normal, offset, j);
                        }
                    }
                    if (ring == 0) break;
                }
            }
            double reach = 0.0;
            for (const auto& lp : poly) reach = std::max(reach, distance(lp.p, si));
            // Every site in ring+1 or beyond is at least ring*bucket away.
            if (static_cast<double>(ring) * bucket > 2.0 * reach) break;
        }
        if (poly.size() < 3) throw EvaluationError("tessellate: degenerate cell");

        VoronoiCell& cell = t.cells[i];
        std::vector<Vec2> pts;
        pts.reserve(poly.size());
        for (const auto& lp : poly) {
            cell.vertices.push_back(pool.intern(lp.p, t.vertices));
            cell.labels.push_back(lp.label);
            pts.push_back(lp.p);
        }
        cell.area = signed_area(pts);
    }

    t.neighbors.resize(n);
    t.cell_edges.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const VoronoiCell& cell = t.cells[i];
        const std::size_t m = cell.vertices.size();
        for (std::size_t k = 0; k < m; ++k) {
            const int label = cell.labels[k];
            const EdgeKey key = EdgeKey::between(static_cast<int>(i), label);
            if (t.edge_index.contains(key.packed())) continue;
            int v0 = cell.vertices[k];
            int v1 = cell.vertices[(k + 1) % m];
            if (v0 == v1) continue;
            if (key.a != static_cast<int>(i)) std::swap(v0, v1);
            const double len = distance(t.vertices[static_cast<std::size_t>(v0)],
                                        t.vertices[static_cast<std::size_t>(v1)]);
            const int id = static_cast<int>(t.edges.size());
            t.edges.push_back({key, v0, v1, len});
            t.edge_index.emplace(key.packed(), id);
        }
    }
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        const VoronoiEdge& edge = t.edges[e];
        const int id = static_cast<int>(e);
        t.cell_edges[static_cast<std::size_t>(edge.key.a)].push_back(id);
        if (edge.key.on_border()) {
            if (edge.length > 1e-9) t.cells[static_cast<std::size_t>(edge.key.a)].touches_border = true;
            continue;
        }
        t.cell_edges[static_cast<std::size_t>(edge.key.b)].push_back(id);
        if (edge.length > 1e-9) {
            t.neighbors[static_cast<std::size_t>(edge.key.a)].push_back({edge.key.b, id});
            t.neighbors[static_cast<std::size_t>(edge.key.b)].push_back({edge.key.a, id});
        }
    }
    return t;
}

} // namespace ucme
