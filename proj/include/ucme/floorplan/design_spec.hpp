#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucme/error.hpp"

namespace ucme::floorplan {

enum class UnitKind { Interior, Exterior };

struct SpaceUnit {
    int id = 0;
    std::string name;
    UnitKind kind = UnitKind::Interior;
    double target_area = 0.0; ///< m^2
    int entrances = 0;
    int windows = 0;
};

/// Problem statement: required space units, their areas and openings, the
/// required door graph, and the plot rectangle in meters.
struct DesignSpec {
    std::vector<SpaceUnit> units;
    std::vector<std::pair<int, int>> adjacencies;
    double width = 14.0;
    double height = 13.0;

    /// Position of unit `id` in `units`, or -1.
    int index_of(int id) const {
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (units[i].id == id) return static_cast<int>(i);
        }
        return -1;
    }

    int degree(int id) const {
        return static_cast<int>(std::count_if(adjacencies.begin(), adjacencies.end(), [id](const auto& a) {
            return a.first == id || a.second == id;
        }));
    }

    double total_area() const {
        double total = 0.0;
        for (const auto& u : units) total += u.target_area;
        return total;
    }

    /// Unit indices by descending adjacency degree, ties by ascending id.
    std::vector<int> placement_order() const {
        std::vector<int> order(units.size());
        for (std::size_t i = 0; i < units.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [this](int a, int b) {
            const auto& ua = units[static_cast<std::size_t>(a)];
            const auto& ub = units[static_cast<std::size_t>(b)];
            const int da = degree(ua.id);
            const int db = degree(ub.id);
            if (da != db) return da > db;
            return ua.id < ub.id;
        });
        return order;
    }

    void validate() const {
        if (!(width > 0.0) || !(height > 0.0)) throw ParseError("bounds", "width and height must be positive");
        if (units.empty()) throw ParseError("units", "at least one space unit is required");
        for (std::size_t i = 0; i < units.size(); ++i) {
            const auto& u = units[i];
            const std::string where = "units[" + std::to_string(i) + "]";
            if (u.id < 0) throw ParseError(where + ".id", "ids must be non-negative");
            for (std::size_t j = 0; j < i; ++j) {
                if (units[j].id == u.id) throw ParseError(where + ".id", "duplicate id " + std::to_string(u.id));
            }
            if (!(u.target_area > 0.0)) throw ParseError(where + ".area", "area must be positive");
            if (u.entrances < 0) throw ParseError(where + ".entrances", "must be non-negative");
            if (u.windows < 0) throw ParseError(where + ".windows", "must be non-negative");
        }
        for (std::size_t i = 0; i < adjacencies.size(); ++i) {
            const auto [a, b] = adjacencies[i];
            const std::string where = "adjacencies[" + std::to_string(i) + "]";
            if (index_of(a) < 0) throw ParseError(where, "unknown space unit id " + std::to_string(a));
            if (index_of(b) < 0) throw ParseError(where, "unknown space unit id " + std::to_string(b));
            if (a == b) throw ParseError(where, "self adjacency");
        }
        if (total_area() >= width * height) {
            throw ParseError("bounds", "total target area does not fit inside the plot");
        }
    }
};

inline std::string_view to_string(UnitKind k) { return k == UnitKind::Interior ? "interior" : "exterior"; }

namespace detail {

template <typename T>
T require(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + "." + key, "missing");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + "." + key, e.what());
    }
}

} // namespace detail

inline DesignSpec parse_design_spec(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("document", "expected an object");
    DesignSpec ds;
    if (doc.contains("bounds")) {
        ds.width = detail::require<double>(doc["bounds"], "width", "bounds");
        ds.height = detail::require<double>(doc["bounds"], "height", "bounds");
    }
    if (!doc.contains("units") || !doc["units"].is_array()) throw ParseError("units", "expected an array");
    const auto& units = doc["units"];
    for (std::size_t i = 0; i < units.size(); ++i) {
        const std::string where = "units[" + std::to_string(i) + "]";
        const auto& u = units[i];
        SpaceUnit su;
        su.id = detail::require<int>(u, "id", where);
        su.name = detail::require<std::string>(u, "name", where);
        const auto kind = detail::require<std::string>(u, "kind", where);
        if (kind == "interior" || kind == "Interior") {
            su.kind = UnitKind::Interior;
        } else if (kind == "exterior" || kind == "Exterior") {
            su.kind = UnitKind::Exterior;
        } else {
            throw ParseError(where + ".kind", "expected interior or exterior");
        }
        su.target_area = detail::require<double>(u, "area", where);
        su.entrances = u.contains("entrances") ? detail::require<int>(u, "entrances", where) : 0;
        su.windows = u.contains("windows") ? detail::require<int>(u, "windows", where) : 0;
        ds.units.push_back(std::move(su));
    }
    if (doc.contains("adjacencies")) {
        const auto& adj = doc["adjacencies"];
        if (!adj.is_array()) throw ParseError("adjacencies", "expected an array of id pairs");
        for (std::size_t i = 0; i < adj.size(); ++i) {
            if (!adj[i].is_array() || adj[i].size() != 2 || !adj[i][0].is_number_integer() ||
                !adj[i][1].is_number_integer()) {
                throw ParseError("adjacencies[" + std::to_string(i) + "]", "expected a pair of ids");
            }
            ds.adjacencies.emplace_back(adj[i][0].get<int>(), adj[i][1].get<int>());
        }
    }
    ds.validate();
    return ds;
}

inline DesignSpec parse_design_spec(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("document", e.what());
    }
    return parse_design_spec(doc);
}

inline nlohmann::json to_json(const DesignSpec& ds) {
    nlohmann::json units = nlohmann::json::array();
    for (const auto& u : ds.units) {
        units.push_back({{"id", u.id},
                         {"name", u.name},
                         {"kind", std::string(to_string(u.kind))},
                         {"area", u.target_area},
                         {"entrances", u.entrances},
                         {"windows", u.windows}});
    }
    nlohmann::json adj = nlohmann::json::array();
    for (const auto& [a, b] : ds.adjacencies) adj.push_back({a, b});
    return {{"bounds", {{"width", ds.width}, {"height", ds.height}}}, {"units", units}, {"adjacencies", adj}};
}

/// The ten-unit Mediterranean apartment used in the experiments.
inline DesignSpec apartment_design_spec() {
    DesignSpec ds;
    ds.units = {
        {1, "Living Room", UnitKind::Interior, 40.0, 1, 2},
        {2, "Veranda 1", UnitKind::Exterior, 25.0, 0, 0},
        {3, "Interior Hall", UnitKind::Interior, 5.0, 0, 0},
        {4, "W.C.", UnitKind::Interior, 4.0, 0, 1},
        {5, "Bathroom", UnitKind::Interior, 6.0, 0, 1},
        {6, "Bedroom 1", UnitKind::Interior, 15.0, 0, 0},
        {7, "Bedroom 2", UnitKind::Interior, 12.0, 0, 0},
        {8, "Veranda 2", UnitKind::Exterior, 15.0, 0, 0},
        {9, "Kitchen", UnitKind::Interior, 14.0, 0, 1},
        {10, "Balcony", UnitKind::Exterior, 4.0, 0, 0},
    };
    ds.adjacencies = {{1, 2}, {1, 3}, {1, 4}, {1, 8}, {1, 9}, {2, 9}, {3, 5}, {3, 6}, {3, 7}, {7, 10}};
    ds.validate();
    return ds;
}

} // namespace ucme::floorplan
