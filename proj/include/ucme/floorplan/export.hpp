#pragma once

// Render-ready geometry of a layout: room outlines and opening segments in meters.

#include <nlohmann/json.hpp>

#include "ucme/floorplan/design_spec.hpp"
#include "ucme/floorplan/layout.hpp"

namespace ucme::floorplan {

inline nlohmann::json point_json(Vec2 p) { return nlohmann::json::array({p.x, p.y}); }

/// Rooms carry one closed point list per boundary loop (outer loops
/// counterclockwise, holes clockwise; the first point is not repeated).
inline nlohmann::json layout_geometry(const LayoutGenome& g, const DesignSpec& ds) {
    const Tessellation& t = g.tess();
    const RoomMap rooms = room_map(g, ds);
    const auto areas = room_areas(t, rooms, ds.units.size());
    nlohmann::json out_rooms = nlohmann::json::array();
    for (std::size_t u = 0; u < ds.units.size(); ++u) {
        if (areas[u] <= 0.0) continue;
        nlohmann::json loops = nlohmann::json::array();
        for (const Loop& loop : room_loops(t, rooms, static_cast<int>(u))) {
            nlohmann::json pts = nlohmann::json::array();
            for (const Vec2& p : loop.points) pts.push_back(point_json(p));
            loops.push_back(std::move(pts));
        }
        out_rooms.push_back({{"id", ds.units[u].id},
                             {"name", ds.units[u].name},
                             {"kind", std::string(to_string(ds.units[u].kind))},
                             {"area", areas[u]},
                             {"loops", std::move(loops)}});
    }
    nlohmann::json openings = nlohmann::json::array();
    for (const Opening& op : g.openings) {
        const VoronoiEdge* e = t.find_edge(op.edge);
        if (e == nullptr) continue;
        nlohmann::json item{{"kind", std::string(to_string(op.kind))},
                            {"room", op.room_a},
                            {"segment", {point_json(t.vertices[static_cast<std::size_t>(e->v0)]),
                                         point_json(t.vertices[static_cast<std::size_t>(e->v1)])}}};
        if (op.room_b != kNoRoom) item["other_room"] = op.room_b;
        openings.push_back(std::move(item));
    }
    return {{"bounds", {{"width", ds.width}, {"height", ds.height}}},
            {"rooms", std::move(out_rooms)},
            {"openings", std::move(openings)}};
}

} // namespace ucme::floorplan
