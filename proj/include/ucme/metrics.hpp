#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "ucme/archive.hpp"
#include "ucme/users.hpp"

namespace ucme {

struct UscMetrics {
    double max_usc = 0.0;
    double mean_usc = 0.0;
    double mean_wusc = 0.0;
    double sum_wusc = 0.0;

    friend bool operator==(const UscMetrics&, const UscMetrics&) = default;
};

/// USC statistics over the occupied cells of a feasible archive. W-USC weights
/// each elite's USC by its fitness.
template <typename Genome>
UscMetrics usc_metrics(const EliteArchive<Genome>& feasible, UserId user, std::size_t s) {
    UscMetrics m;
    if (feasible.empty()) return m;
    double sum = 0.0;
    feasible.for_each([&](const Elite<Genome>& e) {
        const double u = usc(user, e.evaluation.bc, s);
        m.max_usc = std::max(m.max_usc, u);
        sum += u;
        m.sum_wusc += u * e.evaluation.fitness;
    });
    const double n = static_cast<double>(feasible.size());
    m.mean_usc = sum / n;
    m.mean_wusc = m.sum_wusc / n;
    return m;
}

struct LocalMetrics {
    double diversity = 0.0;
    double mean_fitness = 0.0;
    double mean_usc = 0.0;

    friend bool operator==(const LocalMetrics&, const LocalMetrics&) = default;
};

/// Diversity is the mean pairwise Euclidean distance between alternatives in BC space.
inline LocalMetrics local_metrics(std::span<const Evaluation> alternatives, UserId user, std::size_t s) {
    if (alternatives.empty()) throw Error("local_metrics: no alternatives");
    LocalMetrics m;
    const std::size_t n = alternatives.size();
    double dist = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m.mean_fitness += alternatives[i].fitness;
        m.mean_usc += usc(user, alternatives[i].bc, s);
        for (std::size_t j = i + 1; j < n; ++j) {
            dist += std::hypot(alternatives[i].bc.x - alternatives[j].bc.x, alternatives[i].bc.y - alternatives[j].bc.y);
            ++pairs;
        }
    }
    m.diversity = pairs == 0 ? 0.0 : dist / static_cast<double>(pairs);
    m.mean_fitness /= static_cast<double>(n);
    m.mean_usc /= static_cast<double>(n);
    return m;
}

/// Net over total variation of the selected USC sequence; 0 when it never changes.
inline double usc_efficiency(std::span<const double> selected) {
    if (selected.size() < 2) throw Error("usc_efficiency: needs at least two selections");
    double net = 0.0;
    double total = 0.0;
    for (std::size_t s = 1; s < selected.size(); ++s) {
        const double d = selected[s] - selected[s - 1];
        net += d;
        total += std::abs(d);
    }
    return total == 0.0 ? 0.0 : net / total;
}

struct SeriesPoint {
    double evals = 0.0;
    double value = 0.0;
};

/// Trapezoidal area under the series divided by its evaluation span, so a
/// constant series integrates to its value.
inline double auc(std::span<const SeriesPoint> series) {
    if (series.size() < 2) throw Error("auc: needs at least two points");
    double area = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double dx = series[i].evals - series[i - 1].evals;
        if (!(dx > 0.0)) throw Error("auc: evaluation counts must be strictly increasing");
        area += 0.5 * dx * (series[i].value + series[i - 1].value);
    }
    return area / (series.back().evals - series.front().evals);
}

struct TTest {
    double t = 0.0;
    double p = 1.0;
};

/// Two-sample Student's t-test with pooled variance, two-tailed.
inline TTest t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw Error("t_test: each sample needs at least two values");
    auto mean = [](std::span<const double> v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    auto ss = [](std::span<const double> v, double m) {
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return s;
    };
    const double ma = mean(a);
    const double mb = mean(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double df = na + nb - 2.0;
    const double pooled = (ss(a, ma) + ss(b, mb)) / df;
    if (pooled == 0.0) {
        if (ma == mb) return {0.0, 1.0};
        return {ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(), 0.0};
    }
    const double t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
    const boost::math::students_t dist(df);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return {t, std::min(1.0, p)};
}

} // namespace ucme
