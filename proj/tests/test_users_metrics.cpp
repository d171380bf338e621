#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ucme/metrics.hpp"
#include "ucme/users.hpp"

using namespace ucme;

TEST(Users, Names) {
    for (UserId u : kAllUsers) EXPECT_EQ(parse_user(to_string(u)), u);
    EXPECT_EQ(to_string(UserId::U12), "U12");
    EXPECT_FALSE(parse_user("U13").has_value());
    EXPECT_FALSE(parse_user("baseline").has_value());
}

TEST(Users, Examples) {
    EXPECT_NEAR(usc(UserId::U3, {0.8, 0.6}, 1), 0.7, 1e-12);
    EXPECT_NEAR(usc(UserId::U3, {0.8, 0.6}, 9), 0.7, 1e-12);
    EXPECT_NEAR(usc(UserId::U4, {0.8, 0.6}, 1), 0.8, 1e-12);
    EXPECT_NEAR(usc(UserId::U9, {0.8, 0.3}, 6), 0.2, 1e-12);
    EXPECT_NEAR(usc(UserId::U9, {0.8, 0.3}, 5), 0.8, 1e-12);
    EXPECT_NEAR(usc(UserId::U10, {0.8, 0.3}, 6), 0.7, 1e-12);
    EXPECT_NEAR(usc(UserId::U11, {0.8, 0.3}, 6), 0.3, 1e-12);
    EXPECT_NEAR(usc(UserId::U12, {0.8, 0.3}, 6), 0.8, 1e-12);
    EXPECT_NEAR(usc(UserId::U12, {0.8, 0.3}, 2), 0.3, 1e-12);
}

TEST(Users, ComplementPairs) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Bc bc{u(rng), u(rng)};
        const std::size_t s = 1 + static_cast<std::size_t>(i % 12);
        EXPECT_NEAR(usc(UserId::U5, bc, s), 1 - usc(UserId::U1, bc, s), 1e-12);
        EXPECT_NEAR(usc(UserId::U6, bc, s), 1 - usc(UserId::U2, bc, s), 1e-12);
        EXPECT_NEAR(usc(UserId::U7, bc, s), 1 - usc(UserId::U3, bc, s), 1e-12);
        EXPECT_NEAR(usc(UserId::U8, bc, s), 1 - usc(UserId::U4, bc, s), 1e-12);
        for (UserId user : kAllUsers) {
            EXPECT_GE(usc(user, bc, s), 0.0);
            EXPECT_LE(usc(user, bc, s), 1.0);
        }
    }
}

TEST(Users, ChooseArgmaxFirstOnTies) {
    const std::vector<Bc> bcs{{0.3, 0.0}, {0.7, 0.0}, {0.5, 0.0}};
    EXPECT_EQ(choose(UserId::U1, bcs, 1), 1u);
    EXPECT_EQ(choose(UserId::U5, bcs, 1), 0u);
    const std::vector<Bc> tie{{0.4, 0.1}, {0.4, 0.9}};
    EXPECT_EQ(choose(UserId::U1, tie, 1), 0u);
    EXPECT_THROW(choose(UserId::U1, {}, 1), ProtocolError);
}

TEST(UscMetrics, Examples) {
    EliteArchive<int> a;
    EXPECT_EQ(usc_metrics(a, UserId::U1, 1), UscMetrics{});
    Evaluation e;
    e.feasible = true;
    e.fitness = 1.0;
    e.bc = {0.4, 0.0};
    a.try_insert(1, e);
    e.bc = {0.8, 0.0};
    a.try_insert(2, e);
    const auto m = usc_metrics(a, UserId::U1, 1);
    EXPECT_NEAR(m.mean_usc, 0.6, 1e-12);
    EXPECT_NEAR(m.sum_wusc, 1.2, 1e-12);
    EXPECT_NEAR(m.max_usc, 0.8, 1e-12);
    EXPECT_NEAR(m.mean_wusc, 0.6, 1e-12);
}

TEST(UscMetrics, WeightedByFitness) {
    EliteArchive<int> a;
    Evaluation e;
    e.feasible = true;
    e.fitness = 0.5;
    e.bc = {0.4, 0.0};
    a.try_insert(1, e);
    e.fitness = 0.75;
    e.bc = {0.8, 0.0};
    a.try_insert(2, e);
    const auto m = usc_metrics(a, UserId::U1, 1);
    EXPECT_NEAR(m.sum_wusc, 0.2 + 0.6, 1e-12);
    EXPECT_NEAR(m.mean_wusc, 0.4, 1e-12);
    EXPECT_LE(m.sum_wusc, a.qd_score());
}

TEST(LocalMetrics, Examples) {
    Evaluation a;
    a.fitness = 0.6;
    a.bc = {0.0, 0.0};
    Evaluation b = a;
    b.fitness = 0.8;
    b.bc = {1.0, 1.0};
    EXPECT_EQ(local_metrics(std::vector<Evaluation>{a}, UserId::U1, 1).diversity, 0.0);
    const auto two = local_metrics(std::vector<Evaluation>{a, b}, UserId::U3, 1);
    EXPECT_NEAR(two.diversity, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(two.mean_fitness, 0.7, 1e-12);
    EXPECT_NEAR(two.mean_usc, 0.5, 1e-12);
    EXPECT_EQ(local_metrics(std::vector<Evaluation>(4, b), UserId::U1, 1).diversity, 0.0);
    EXPECT_THROW(local_metrics(std::vector<Evaluation>{}, UserId::U1, 1), Error);
}

TEST(UscEfficiency, Examples) {
    EXPECT_NEAR(usc_efficiency(std::vector<double>{0.1, 0.2, 0.3}), 1.0, 1e-12);
    EXPECT_NEAR(usc_efficiency(std::vector<double>{0.3, 0.2, 0.3}), 0.0, 1e-12);
    EXPECT_NEAR(usc_efficiency(std::vector<double>{0.2, 0.5, 0.4}), 0.5, 1e-12);
    EXPECT_EQ(usc_efficiency(std::vector<double>{0.4, 0.4, 0.4}), 0.0);
    EXPECT_THROW(usc_efficiency(std::vector<double>{0.4}), Error);
}

TEST(UscEfficiency, RangeAndMonotoneCharacterisation) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> v(2 + i % 9);
        for (double& x : v) x = u(rng);
        if (i % 3 == 0) std::sort(v.begin(), v.end());
        const double e = usc_efficiency(v);
        EXPECT_GE(e, -1.0 - 1e-12);
        EXPECT_LE(e, 1.0 + 1e-12);
        const bool monotone = std::is_sorted(v.begin(), v.end()) && v.front() < v.back();
        EXPECT_EQ(std::abs(e - 1.0) < 1e-12, monotone);
    }
}

TEST(Auc, Examples) {
    EXPECT_NEAR(auc(std::vector<SeriesPoint>{{0, 0.5}, {1000, 0.5}, {2500, 0.5}}), 0.5, 1e-12);
    EXPECT_NEAR(auc(std::vector<SeriesPoint>{{0, 0.0}, {10, 1.0}}), 0.5, 1e-12);
    EXPECT_NEAR(auc(std::vector<SeriesPoint>{{0, 0.0}, {5, 0.5}, {10, 1.0}}), 0.5, 1e-12);
    EXPECT_THROW(auc(std::vector<SeriesPoint>{{0, 1.0}}), Error);
    EXPECT_THROW(auc(std::vector<SeriesPoint>{{0, 1.0}, {0, 2.0}}), Error);
}

TEST(Auc, BoundedByExtremes) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<SeriesPoint> s;
        double x = 0;
        for (int k = 0; k < 12; ++k) {
            s.push_back({x, u(rng)});
            x += 1 + 100 * u(rng);
        }
        const double a = auc(s);
        double lo = 1;
        double hi = 0;
        for (const auto& p : s) {
            lo = std::min(lo, p.value);
            hi = std::max(hi, p.value);
        }
        EXPECT_GE(a, lo - 1e-12);
        EXPECT_LE(a, hi + 1e-12);
    }
}

TEST(TTest, Examples) {
    const std::vector<double> a{1, 2, 3, 4, 5};
    EXPECT_DOUBLE_EQ(t_test(a, a).p, 1.0);
    EXPECT_NEAR(t_test(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0)).p, 0.0, 1e-12);
    const std::vector<double> b{2, 3, 4, 5, 9};
    const auto ab = t_test(a, b);
    const auto ba = t_test(b, a);
    EXPECT_NEAR(ab.t, -ba.t, 1e-12);
    EXPECT_NEAR(ab.p, ba.p, 1e-12);
}

// Reference values from an independent statistics package.
TEST(TTest, MatchesReference) {
    const auto r1 = t_test(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{2, 3, 4, 5, 9});
    EXPECT_NEAR(r1.t, -1.1428571428571426, 1e-12);
    EXPECT_NEAR(r1.p, 0.28614455880991646, 1e-10);
    const auto r2 = t_test(std::vector<double>{0.52, 0.61, 0.58, 0.49, 0.55},
                           std::vector<double>{0.47, 0.50, 0.44, 0.52, 0.46});
    EXPECT_NEAR(r2.t, 2.8154227932207907, 1e-10);
    EXPECT_NEAR(r2.p, 0.022653018130624675, 1e-10);
}

TEST(TTest, SmallSamplesAreAnError) {
    EXPECT_THROW(t_test(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}
