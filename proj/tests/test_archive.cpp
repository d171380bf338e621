#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ucme/archive.hpp"

using namespace ucme;

namespace {

using Archive = EliteArchive<int>;

Evaluation with_fitness(double f, Bc bc = {0.5, 0.5}) {
    Evaluation e;
    e.feasible = true;
    e.feasibility_score = 1.0;
    e.fitness = f;
    e.bc = bc;
    return e;
}

Elite<int> elite_at(Cell c, double f, int id = 0) { return {id, with_fitness(f), c}; }

} // namespace

TEST(CellOf, Examples) {
    const ArchiveConfig cfg;
    EXPECT_EQ(cell_of({0.5, 0.5}, cfg), (Cell{32, 32}));
    EXPECT_EQ(cell_of({1.0, 0.0}, cfg), (Cell{63, 0}));
    EXPECT_EQ(cell_of({1.7, -0.2}, cfg), (Cell{63, 0}));
    EXPECT_EQ(cell_of({0.999, 1.0 / 64}, cfg), (Cell{63, 1}));
}

TEST(CellOf, CustomRange) {
    ArchiveConfig cfg;
    cfg.bc1_range = {0.44, 0.86};
    EXPECT_EQ(cell_of({0.44, 0.0}, cfg).col, 0);
    EXPECT_EQ(cell_of({0.65, 0.0}, cfg).col, 32);
    EXPECT_EQ(cell_of({0.86, 0.0}, cfg).col, 63);
}

TEST(CellOf, NonFiniteIsAnError) {
    EXPECT_THROW(cell_of({std::nan(""), 0.1}, ArchiveConfig{}), EvaluationError);
    EXPECT_THROW(cell_of({0.1, INFINITY}, ArchiveConfig{}), EvaluationError);
}

TEST(TryInsert, EmptyReplaceTie) {
    Archive a;
    EXPECT_EQ(a.try_insert(elite_at({3, 4}, 0.7, 1)), InsertResult::InsertedEmpty);
    EXPECT_EQ(a.try_insert(elite_at({3, 4}, 0.8, 2)), InsertResult::Replaced);
    EXPECT_EQ(a.try_insert(elite_at({3, 4}, 0.8, 3)), InsertResult::Rejected);
    EXPECT_EQ(a.try_insert(elite_at({3, 4}, 0.1, 4)), InsertResult::Rejected);
    EXPECT_EQ(a.at({3, 4})->genome, 2);
    EXPECT_EQ(a.size(), 1u);
}

TEST(TryInsert, InfeasibleArchiveRanksByFeasibilityScore) {
    Archive a({}, QualityRole::FeasibilityScore);
    Evaluation lo = with_fitness(0.9);
    lo.feasibility_score = 0.4;
    Evaluation hi = with_fitness(0.1);
    hi.feasibility_score = 0.6;
    a.try_insert(1, lo);
    EXPECT_EQ(a.try_insert(2, hi), InsertResult::Replaced);
    EXPECT_DOUBLE_EQ(a.qd_score(), 0.6);
}

TEST(TryInsert, QualityOutsideUnitIntervalIsAnError) {
    Archive a;
    EXPECT_THROW(a.try_insert(elite_at({0, 0}, 1.5)), EvaluationError);
    EXPECT_THROW(a.try_insert(elite_at({0, 0}, -0.1)), EvaluationError);
}

TEST(Coverage, Examples) {
    Archive a;
    EXPECT_EQ(a.coverage(), 0.0);
    for (int i = 0; i < 41; ++i) a.try_insert(elite_at({i % 64, i / 64}, 0.8));
    EXPECT_NEAR(a.coverage(), 41.0 / 4096.0, 1e-15);
    EXPECT_GE(a.coverage(), 0.01);
    ArchiveConfig small;
    small.resolution = 4;
    Archive full(small);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) full.try_insert(elite_at({c, r}, 0.5));
    }
    EXPECT_EQ(full.coverage(), 1.0);
}

TEST(QdScore, Examples) {
    Archive a;
    EXPECT_EQ(a.qd_score(), 0.0);
    a.try_insert(elite_at({0, 0}, 1.0));
    EXPECT_DOUBLE_EQ(a.qd_score(), 1.0);
    Archive b;
    b.try_insert(elite_at({0, 0}, 0.6));
    b.try_insert(elite_at({1, 0}, 0.9));
    EXPECT_DOUBLE_EQ(b.qd_score(), 1.5);
}

TEST(MaxFitness, Examples) {
    Archive a;
    EXPECT_FALSE(a.max_fitness().has_value());
    a.try_insert(elite_at({0, 0}, 0.6));
    EXPECT_DOUBLE_EQ(*a.max_fitness(), 0.6);
    a.try_insert(elite_at({1, 0}, 0.95));
    a.try_insert(elite_at({2, 0}, 0.71));
    a.try_insert(elite_at({3, 0}, 0.62));
    EXPECT_DOUBLE_EQ(*a.max_fitness(), 0.95);
}

TEST(OccupiedIn, RowMajorOrder) {
    Archive a;
    a.try_insert(elite_at({12, 14}, 0.7, 1));
    a.try_insert(elite_at({10, 10}, 0.7, 2));
    a.try_insert(elite_at({15, 10}, 0.7, 3));
    a.try_insert(elite_at({40, 40}, 0.7, 4));
    const auto in = a.occupied_in({{8, 8}, {17, 17}});
    ASSERT_EQ(in.size(), 3u);
    EXPECT_EQ(in[0]->genome, 2);
    EXPECT_EQ(in[1]->genome, 3);
    EXPECT_EQ(in[2]->genome, 1);
    EXPECT_TRUE(a.occupied_in({{20, 20}, {20, 20}}).empty());
    EXPECT_EQ(a.occupied_in({{0, 0}, {64, 64}}).size(), 4u);
}

TEST(ArchiveProperty, RandomInsertionsKeepInvariants) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    std::uniform_real_distribution<double> q(0.0, 1.0);
    ArchiveConfig cfg;
    cfg.resolution = 16;
    Archive a(cfg);
    std::vector<double> best(256, -1.0);
    for (int i = 0; i < 10'000; ++i) {
        const Bc bc{u(rng), u(rng)};
        const Cell c = cell_of(bc, cfg);
        ASSERT_GE(c.col, 0);
        ASSERT_LT(c.col, 16);
        const double f = q(rng);
        const auto idx = static_cast<std::size_t>(c.row * 16 + c.col);
        const auto r = a.try_insert(i, with_fitness(f, bc));
        if (best[idx] < 0) {
            EXPECT_EQ(r, InsertResult::InsertedEmpty);
            best[idx] = f;
        } else if (f > best[idx]) {
            EXPECT_EQ(r, InsertResult::Replaced);
            best[idx] = f;
        } else {
            EXPECT_EQ(r, InsertResult::Rejected);
        }
        ASSERT_DOUBLE_EQ(a.at(c)->evaluation.fitness, best[idx]);
    }
    double qd = 0.0;
    std::size_t n = 0;
    for (double b : best) {
        if (b >= 0) {
            qd += b;
            ++n;
        }
    }
    EXPECT_EQ(a.size(), n);
    EXPECT_DOUBLE_EQ(a.coverage() * 256, static_cast<double>(n));
    EXPECT_NEAR(a.qd_score(), qd, 1e-9);
}
