#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "ucme/geometry.hpp"
#include "ucme/voronoi.hpp"

namespace ucme::floorplan {

inline constexpr int kNoRoom = -1;
inline constexpr double kDoorWidth = 0.8;
inline constexpr double kWindowWidth = 0.6;
inline constexpr double kPathwayWidth = 0.5;
inline constexpr double kMinAreaPrecision = 0.6;

enum class OpeningKind { Door, Entrance, Window };

inline std::string_view to_string(OpeningKind k) {
    switch (k) {
    case OpeningKind::Door: return "door";
    case OpeningKind::Entrance: return "entrance";
    case OpeningKind::Window: return "window";
    }
    return "?";
}

inline double required_width(OpeningKind k) { return k == OpeningKind::Window ? kWindowWidth : kDoorWidth; }

/// A door, entrance or window sitting on one Voronoi edge. Doors name both
/// rooms; entrances and windows leave `room_b` as kNoRoom.
struct Opening {
    OpeningKind kind = OpeningKind::Door;
    EdgeKey edge;
    int room_a = kNoRoom;
    int room_b = kNoRoom;
    friend bool operator==(const Opening&, const Opening&) = default;
};

/// Evolvable layout: Voronoi sites, a room id (or kNoRoom) per Voronoi cell,
/// and placed openings. The tessellation is a cache derived from the sites.
struct LayoutGenome {
    std::vector<Vec2> sites;
    std::vector<int> assignment;
    std::vector<Opening> openings;
    std::shared_ptr<const Tessellation> tessellation;

    const Tessellation& tess() const { return *tessellation; }

    /// Builds a genome over fresh sites with every cell unassigned.
    static LayoutGenome from_sites(std::vector<Vec2> sites, double width, double height) {
        LayoutGenome g;
        g.tessellation = std::make_shared<const Tessellation>(tessellate(sites, width, height));
        g.assignment.assign(sites.size(), kNoRoom);
        g.sites = std::move(sites);
        return g;
    }

    /// Same layout content; the tessellation cache is ignored.
    friend bool operator==(const LayoutGenome& a, const LayoutGenome& b) {
        return a.sites == b.sites && a.assignment == b.assignment && a.openings == b.openings;
    }
};

} // namespace ucme::floorplan
