#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "ucme/error.hpp"

namespace ucme {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Shoelace area; positive for counterclockwise vertex order.
inline double signed_area(std::span<const Vec2> poly) {
    double twice = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        twice += cross(poly[i], poly[(i + 1) % n]);
    }
    return 0.5 * twice;
}

inline double perimeter(std::span<const Vec2> poly) {
    double total = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        total += distance(poly[i], poly[(i + 1) % n]);
    }
    return total;
}

/// Area precision of a realized area against its target: the smaller over the larger.
inline double area_precision(double area, double target) {
    if (!(target > 0.0) || area < 0.0) {
        throw EvaluationError("area_precision: target must be positive and area non-negative");
    }
    return area < target ? area / target : target / area;
}

/// 2*pi*A / P^2, clamped to [0, 1]. A circle scores 0.5, a square pi/8.
inline double compactness(double area, double outer_perimeter) {
    if (!(outer_perimeter > 0.0)) {
        throw EvaluationError("compactness: zero perimeter");
    }
    const double c = 2.0 * std::numbers::pi * area / (outer_perimeter * outer_perimeter);
    return std::clamp(c, 0.0, 1.0);
}

inline double compactness(std::span<const Vec2> polygon) {
    return compactness(std::abs(signed_area(polygon)), perimeter(polygon));
}

/// Piecewise-linear wall-angle score: 1 at right and straight angles, 0 at 0, 0.5 at 3pi/4.
inline double orthogonality(double theta) {
    constexpr double pi = std::numbers::pi;
    if (!(theta >= 0.0 && theta <= pi)) {
        throw EvaluationError("orthogonality: angle outside [0, pi]");
    }
    if (theta < pi / 2) return 2.0 * theta / pi;
    if (theta < 3.0 * pi / 4) return 2.0 - 2.0 * theta / pi;
    return 2.0 * theta / pi - 1.0;
}

/// Unsigned angle in [0, pi] between the segments vertex->prev and vertex->next.
inline double corner_angle(Vec2 prev, Vec2 vertex, Vec2 next) {
    const Vec2 a = prev - vertex;
    const Vec2 b = next - vertex;
    return std::abs(std::atan2(cross(a, b), dot(a, b)));
}

} // namespace ucme
