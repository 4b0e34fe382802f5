#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace croptrack;

namespace {

CostMatrix random_gated(Rng& rng, std::size_t r, std::size_t c, double inadmissible_rate) {
    CostMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double u = rng.uniform();
            m(i, j) = u < inadmissible_rate ? (rng.bernoulli(0.5) ? kInf : rng.uniform(1.0, 2.0)) : rng.uniform();
        }
    }
    return m;
}

void expect_valid(const AssignmentResult& a, std::size_t rows, std::size_t cols) {
    std::set<std::size_t> r, c;
    for (const auto& m : a.matches) {
        EXPECT_TRUE(r.insert(m.row).second);
        EXPECT_TRUE(c.insert(m.col).second);
    }
    for (auto x : a.unmatched_rows) EXPECT_TRUE(r.insert(x).second);
    for (auto x : a.unmatched_cols) EXPECT_TRUE(c.insert(x).second);
    EXPECT_EQ(r.size(), rows);
    EXPECT_EQ(c.size(), cols);
}

}  // namespace

TEST(Hungarian, SquareExample) {
    const auto m = CostMatrix::from_rows({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}});
    const auto a = hungarian(m, 10.0);
    ASSERT_EQ(a.matches.size(), 3u);
    EXPECT_DOUBLE_EQ(a.total_cost(m), 5.0);
}

TEST(Hungarian, GateLeavesPairsUnmatched) {
    const auto m = CostMatrix::from_rows({{0.1, 0.9}, {0.95, 0.99}});
    const auto a = hungarian(m, 0.8);
    ASSERT_EQ(a.matches.size(), 1u);
    EXPECT_EQ(a.matches[0], (Match{0, 0}));
    EXPECT_EQ(a.unmatched_rows, std::vector<std::size_t>{1});
    EXPECT_EQ(a.unmatched_cols, std::vector<std::size_t>{1});
}

TEST(Hungarian, PrefersMoreMatchesOverCheaperSingle) {
    // matching (0,0) alone costs 0; the two-pair solution costs 1.6 but matches more
    const auto m = CostMatrix::from_rows({{0.0, 0.8}, {0.8, kInf}});
    const auto a = hungarian(m, 1.0);
    EXPECT_EQ(a.matches.size(), 2u);
}

TEST(Hungarian, EmptyAndAllInadmissible) {
    EXPECT_TRUE(hungarian(CostMatrix(0, 3), 1.0).matches.empty());
    const auto a = hungarian(CostMatrix(2, 2, kInf), 1.0);
    EXPECT_TRUE(a.matches.empty());
    EXPECT_EQ(a.unmatched_rows.size(), 2u);
}

TEST(Hungarian, AgreesWithBruteForceOnRandomRectangles) {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto r = static_cast<std::size_t>(1 + rng.next_u64() % 7);
        const auto c = static_cast<std::size_t>(1 + rng.next_u64() % 7);
        const CostMatrix m = random_gated(rng, r, c, rng.uniform(0.0, 0.7));
        const auto fast = hungarian(m, 1.0);
        const auto slow = brute_force_assignment(m, 1.0);
        expect_valid(fast, r, c);
        ASSERT_EQ(fast.matches.size(), slow.matches.size()) << "trial " << trial;
        ASSERT_NEAR(fast.total_cost(m), slow.total_cost(m), 1e-9) << "trial " << trial;
    }
}

TEST(BruteForce, RejectsLargeInputs) {
    EXPECT_THROW(brute_force_assignment(CostMatrix(10, 10, 0.5), 1.0), std::length_error);
}

TEST(Candidates, StrictGateRowMajor) {
    const auto m = CostMatrix::from_rows({{0.5, 0.98}, {0.97, 1.0}});
    const auto c = generate_candidates(m, 0.98);
    const std::vector<std::pair<std::size_t, std::size_t>> want{{0, 0}, {1, 0}};
    EXPECT_EQ(c, want);
}

TEST(Greedy, LowestCostFirstAndOneToOne) {
    std::vector<Candidate> pool{{0, 0, 0.5}, {1, 0, 0.2}, {1, 1, 0.3}, {0, 1, 0.4}};
    const auto a = greedy_resolve(pool, 2, 2);
    ASSERT_EQ(a.matches.size(), 2u);
    EXPECT_NE(std::find(a.matches.begin(), a.matches.end(), Match{1, 0}), a.matches.end());
    EXPECT_NE(std::find(a.matches.begin(), a.matches.end(), Match{0, 1}), a.matches.end());
}

TEST(Greedy, DropsInfiniteCandidatesAndReportsLeftovers) {
    const auto a = greedy_resolve({{0, 0, kInf}, {1, 1, 0.1}}, 3, 2);
    ASSERT_EQ(a.matches.size(), 1u);
    EXPECT_EQ(a.unmatched_rows, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(a.unmatched_cols, (std::vector<std::size_t>{0}));
}

TEST(Greedy, InvariantToCandidateOrder) {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Candidate> pool;
        for (std::size_t t = 0; t < 5; ++t) {
            for (std::size_t d = 0; d < 5; ++d) {
                if (rng.bernoulli(0.6)) pool.push_back({t, d, std::floor(rng.uniform() * 4.0) / 4.0});
            }
        }
        auto shuffled = pool;
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[rng.next_u64() % i]);
        }
        auto a = greedy_resolve(pool, 5, 5).matches;
        auto b = greedy_resolve(shuffled, 5, 5).matches;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
    }
}
