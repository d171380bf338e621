#pragma once

#include <cstdlib>
#include <limits>
#include <vector>

#include "ucme/archive.hpp"

namespace ucme {

inline int manhattan(Cell a, Cell b) { return std::abs(a.col - b.col) + std::abs(a.row - b.row); }

/// Sum over points of the distance to the nearest medoid.
inline long clustering_cost(const std::vector<Cell>& points, const std::vector<Cell>& medoids) {
    long total = 0;
    for (const Cell& p : points) {
        int best = std::numeric_limits<int>::max();
        for (const Cell& m : medoids) best = std::min(best, manhattan(p, m));
        total += best;
    }
    return total;
}

namespace detail {

/// One PAM pass: greedy BUILD starting from `first`, then best-improvement SWAP
/// until no swap lowers the cost.
inline std::vector<std::size_t> pam_from(const std::vector<std::vector<int>>& dist, std::size_t k, std::size_t first,
                                         long& cost_out) {
    const std::size_t n = dist.size();
    std::vector<std::size_t> medoids{first};
    std::vector<bool> is_medoid(n, false);
    is_medoid[first] = true;
    std::vector<int> nearest(dist[first]);

    while (medoids.size() < k) {
        long best_cost = std::numeric_limits<long>::max();
        std::size_t best = n;
        for (std::size_t c = 0; c < n; ++c) {
            if (is_medoid[c]) continue;
            long cost = 0;
            for (std::size_t p = 0; p < n; ++p) cost += std::min(nearest[p], dist[p][c]);
            if (cost < best_cost) {
                best_cost = cost;
                best = c;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = true;
        for (std::size_t p = 0; p < n; ++p) nearest[p] = std::min(nearest[p], dist[p][best]);
    }

    auto total_cost = [&](const std::vector<std::size_t>& ms) {
        long total = 0;
        for (std::size_t p = 0; p < n; ++p) {
            int d = std::numeric_limits<int>::max();
            for (std::size_t m : ms) d = std::min(d, dist[p][m]);
            total += d;
        }
        return total;
    };

    long current = total_cost(medoids);
    for (;;) {
        long best_cost = current;
        std::size_t best_slot = k;
        std::size_t best_candidate = n;
        for (std::size_t slot = 0; slot < k; ++slot) {
            for (std::size_t c = 0; c < n; ++c) {
                if (is_medoid[c]) continue;
                auto trial = medoids;
                trial[slot] = c;
                const long cost = total_cost(trial);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_slot = slot;
                    best_candidate = c;
                }
            }
        }
        if (best_slot == k) break;
        is_medoid[medoids[best_slot]] = false;
        is_medoid[best_candidate] = true;
        medoids[best_slot] = best_candidate;
        current = best_cost;
    }
    cost_out = current;
    return medoids;
}

} // namespace detail

/// PAM k-medoids under Manhattan distance, restarted once per possible first
/// medoid; the cheapest result wins. Ties resolve to the earliest point in input
/// order, so the result is a pure function of the input.
/// Returns the medoids in the order they were selected.
inline std::vector<Cell> kmedoids(const std::vector<Cell>& points, std::size_t k) {
    const std::size_t n = points.size();
    if (n <= k) return points;
    if (k == 0) return {};

    std::vector<std::vector<int>> dist(n, std::vector<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = manhattan(points[i], points[j]);
    }

    std::vector<std::size_t> best;
    long best_cost = std::numeric_limits<long>::max();
    for (std::size_t first = 0; first < n; ++first) {
        long cost = 0;
        auto medoids = detail::pam_from(dist, k, first, cost);
        if (cost < best_cost) {
            best_cost = cost;
            best = std::move(medoids);
        }
    }

    std::vector<Cell> out;
    out.reserve(k);
    for (std::size_t m : best) out.push_back(points[m]);
    return out;
}

} // namespace ucme
