#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "das_oracle.hpp"
#include "ucme/das.hpp"
#include "ucme/window.hpp"

using namespace ucme;

namespace {

Bc center_bc(Cell c) { return {(c.col + 0.5) / 64.0, (c.row + 0.5) / 64.0}; }

void add(EliteArchive<int>& a, Cell c, int id = 0) {
    Evaluation e;
    e.feasible = true;
    e.feasibility_score = 1.0;
    e.fitness = 0.8;
    e.bc = center_bc(c);
    a.try_insert(id, e);
}

bool distinct(const std::vector<Cell>& v) {
    std::set<std::pair<int, int>> s;
    for (const Cell& c : v) s.insert({c.col, c.row});
    return s.size() == v.size();
}

bool inside(const std::vector<Cell>& chosen, const std::vector<Cell>& occupied) {
    return std::all_of(chosen.begin(), chosen.end(), [&](Cell c) {
        return std::find(occupied.begin(), occupied.end(), c) != occupied.end();
    });
}

} // namespace

TEST(Recenter, Examples) {
    const SelectionWindow w{{0, 0}, 9};
    EXPECT_EQ(recenter(w, {32, 32}, 64).origin, (Cell{28, 28}));
    EXPECT_EQ(recenter(w, {0, 0}, 64).origin, (Cell{0, 0}));
    EXPECT_EQ(recenter(w, {63, 5}, 64).origin, (Cell{55, 1}));
    EXPECT_EQ(recenter(w, {40, 22}, 64).origin, (Cell{36, 18}));
    EXPECT_EQ(recenter(w, {40, 22}, 64).size, 9);
}

TEST(Window, SizeValidation) {
    EXPECT_THROW(validate_window_size(8, 64), Error);
    EXPECT_THROW(validate_window_size(65, 64), Error);
    EXPECT_NO_THROW(validate_window_size(9, 64));
}

TEST(InitialWindow, SingleElite) {
    EliteArchive<int> a;
    add(a, {10, 10});
    const auto w = initial_window(a, 9);
    EXPECT_EQ(w.center(), (Cell{10, 10}));
    EXPECT_EQ(w.origin, (Cell{6, 6}));
}

TEST(InitialWindow, NearestOccupiedWhenMeanCellEmpty) {
    EliteArchive<int> a;
    add(a, {20, 20}, 2);
    add(a, {10, 10}, 1);
    const auto w = initial_window(a, 9);
    EXPECT_EQ(w.center(), (Cell{10, 10}));
}

TEST(InitialWindow, ClampsAtCorner) {
    EliteArchive<int> a;
    add(a, {0, 0});
    const auto w = initial_window(a, 9);
    EXPECT_EQ(w.origin, (Cell{0, 0}));
    EXPECT_EQ(w.center(), (Cell{4, 4}));
}

TEST(InitialWindow, EmptyArchiveIsAnError) {
    EliteArchive<int> a;
    EXPECT_THROW(initial_window(a, 9), InitializationError);
}

TEST(Das, NameRoundTrip) {
    for (DasMethod m : kAllDasMethods) EXPECT_EQ(parse_das_method(to_string(m)), m);
    EXPECT_FALSE(parse_das_method("diagonal").has_value());
}

TEST(Das, SingleOccupiedCellGivesOneAlternative) {
    const SelectionWindow w{{10, 10}, 9};
    Rng rng(1);
    for (DasMethod m : kAllDasMethods) {
        const auto out = sample_alternative_cells(m, w, {{14, 12}}, 4, rng);
        ASSERT_EQ(out.size(), 1u) << to_string(m);
        EXPECT_EQ(out[0], (Cell{14, 12}));
    }
}

TEST(Das, NoOccupiedCellIsAnError) {
    Rng rng(1);
    EXPECT_THROW(sample_alternative_cells(DasMethod::Random, {{0, 0}, 9}, {}, 4, rng), ProtocolError);
}

TEST(Das, CornersPicksOccupiedCorners) {
    const SelectionWindow w{{20, 30}, 9};
    std::vector<Cell> occ{{24, 34}, {20, 30}, {28, 30}, {28, 38}, {20, 38}, {22, 31}};
    Rng rng(3);
    const auto out = sample_alternative_cells(DasMethod::Corners, w, occ, 4, rng);
    const std::vector<Cell> expect{{20, 30}, {28, 30}, {28, 38}, {20, 38}};
    EXPECT_EQ(out, expect);
}

TEST(Das, EdgesPicksOneCellPerEdge) {
    const SelectionWindow w{{0, 0}, 9};
    std::vector<Cell> occ{{4, 0}, {8, 4}, {4, 8}, {0, 4}, {4, 4}};
    Rng rng(3);
    const auto out = sample_alternative_cells(DasMethod::Edges, w, occ, 4, rng);
    const std::vector<Cell> expect{{4, 0}, {8, 4}, {4, 8}, {0, 4}};
    EXPECT_EQ(out, expect);
}

TEST(Das, MedoidsEightPointExample) {
    const SelectionWindow w{{0, 0}, 9};
    const std::vector<Cell> occ{{0, 0}, {0, 1}, {8, 8}, {8, 7}, {4, 0}, {4, 1}, {0, 8}, {1, 8}};
    Rng rng(3);
    const auto out = sample_alternative_cells(DasMethod::Medoids, w, occ, 4, rng);
    EXPECT_EQ(clustering_cost(occ, out), oracle::exhaustive_kmedoids_cost(occ, 4));
}

TEST(Das, QuadrantSectors) {
    // 9x9 window, centre (4,4).
    EXPECT_EQ(detail::diagonal_sector({4, 4}, 9), 0);
    EXPECT_EQ(detail::diagonal_sector({8, 4}, 9), 0); // east
    EXPECT_EQ(detail::diagonal_sector({4, 8}, 9), 1); // north
    EXPECT_EQ(detail::diagonal_sector({0, 4}, 9), 2); // west
    EXPECT_EQ(detail::diagonal_sector({4, 0}, 9), 3); // south
    // Diagonal cells join the sector counterclockwise of them.
    EXPECT_EQ(detail::diagonal_sector({8, 8}, 9), 1); // NE -> N
    EXPECT_EQ(detail::diagonal_sector({0, 8}, 9), 2); // NW -> W
    EXPECT_EQ(detail::diagonal_sector({0, 0}, 9), 3); // SW -> S
    EXPECT_EQ(detail::diagonal_sector({8, 0}, 9), 0); // SE -> E
}

TEST(Das, SquareQuarters) {
    EXPECT_EQ(detail::axis_square({4, 4}, 9), 0);
    EXPECT_EQ(detail::axis_square({5, 4}, 9), 1);
    EXPECT_EQ(detail::axis_square({5, 5}, 9), 2);
    EXPECT_EQ(detail::axis_square({4, 5}, 9), 3);
    EXPECT_EQ(detail::axis_square({0, 8}, 9), 3);
}

TEST(Das, SectionedMethodsDrawOnePerNonEmptySection) {
    const SelectionWindow w{{5, 5}, 9};
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto occ = oracle::random_pattern(w, 0.1 + 0.005 * trial, gen);
        for (bool diag : {true, false}) {
            Rng rng(static_cast<std::uint64_t>(trial));
            const auto out = sample_alternative_cells(diag ? DasMethod::Quadrants : DasMethod::Squares, w, occ, 4, rng);
            std::array<int, 4> counts{};
            for (const Cell& c : occ) {
                const Cell l = w.local(c);
                ++counts[static_cast<std::size_t>(diag ? detail::diagonal_sector(l, 9) : detail::axis_square(l, 9))];
            }
            for (std::size_t s = 0, k = 0; s < 4 && k < out.size(); ++s, ++k) {
                if (counts[s] == 0) continue;
                const Cell l = w.local(out[k]);
                EXPECT_EQ(static_cast<std::size_t>(diag ? detail::diagonal_sector(l, 9) : detail::axis_square(l, 9)),
                          s);
            }
        }
    }
}

TEST(Das, RandomPatternsAgainstOracle) {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const SelectionWindow w{{trial % 50, (trial * 7) % 50}, 9};
        const auto occ = oracle::random_pattern(w, 0.02 + 0.004 * trial, gen);
        for (DasMethod m : kAllDasMethods) {
            Rng rng(static_cast<std::uint64_t>(trial) * 31 + static_cast<std::uint64_t>(m));
            const auto out = sample_alternative_cells(m, w, occ, 4, rng);
            ASSERT_EQ(out.size(), std::min<std::size_t>(4, occ.size())) << to_string(m);
            EXPECT_TRUE(distinct(out));
            EXPECT_TRUE(inside(out, occ));
            if (m == DasMethod::Corners || m == DasMethod::Edges) {
                EXPECT_TRUE(oracle::nearest_rule_holds(m, w, occ, out)) << to_string(m) << " trial " << trial;
            }
            if (m == DasMethod::Medoids && occ.size() <= 12) {
                EXPECT_LE(static_cast<double>(clustering_cost(occ, out)),
                          1.05 * static_cast<double>(oracle::exhaustive_kmedoids_cost(occ, 4)));
            }
        }
    }
}

TEST(Das, TiesAreBrokenAtRandom) {
    // Two cells equally near the lower-left corner; both must show up over many draws.
    const SelectionWindow w{{0, 0}, 9};
    const std::vector<Cell> occ{{1, 0}, {0, 1}, {8, 0}, {8, 8}, {0, 8}};
    std::set<std::pair<int, int>> first;
    for (std::uint64_t s = 0; s < 64; ++s) {
        Rng rng(s);
        const auto out = sample_alternative_cells(DasMethod::Corners, w, occ, 4, rng);
        first.insert({out[0].col, out[0].row});
    }
    EXPECT_EQ(first.size(), 2u);
}
