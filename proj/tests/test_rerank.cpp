#include "reference/dense_rerank.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace croptrack;

namespace {

std::vector<std::vector<double>> raw_vectors(Rng& rng, std::size_t n, std::size_t dim) {
    std::vector<std::vector<double>> out(n, std::vector<double>(dim));
    for (auto& v : out) {
        for (double& x : v) x = rng.normal();
    }
    return out;
}

std::vector<Embedding> embed(const std::vector<std::vector<double>>& raw) {
    std::vector<Embedding> out;
    for (const auto& v : raw) out.emplace_back(v);
    return out;
}

}  // namespace

TEST(Embedding, NormalizesAndRejectsZero) {
    const Embedding e(std::vector<double>{3.0, 4.0});
    EXPECT_DOUBLE_EQ(e[0], 0.6);
    EXPECT_DOUBLE_EQ(e[1], 0.8);
    EXPECT_THROW(Embedding(std::vector<double>{0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW((void)e.dot(Embedding(std::vector<double>{1.0, 0.0, 0.0})), std::invalid_argument);
}

TEST(Cosine, KnownValues) {
    const std::vector<Embedding> q{test_support::axis(3, 0)};
    const std::vector<Embedding> g{test_support::axis(3, 0), test_support::axis(3, 1),
                                   Embedding(std::vector<double>{-1.0, 0.0, 0.0})};
    const CostMatrix m = cosine_distance_matrix(q, g);
    EXPECT_DOUBLE_EQ(m(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(m(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(m(0, 2), 2.0);
}

TEST(KReciprocal, SmallHandExample) {
    // Points on a line: 0, 1, 2 close together; 3 far away.
    const auto d = CostMatrix::from_rows({{0, 1, 2, 9}, {1, 0, 1, 8}, {2, 1, 0, 7}, {9, 8, 7, 0}});
    EXPECT_EQ(k_reciprocal_neighbors(1, d, 2), (std::vector<std::size_t>{0, 2}));
    // 3's nearest is 2, but 3 is not among 2's two nearest others
    EXPECT_TRUE(k_reciprocal_neighbors(3, d, 1).empty());
    EXPECT_EQ(k_reciprocal_neighbors(0, d, 1), (std::vector<std::size_t>{1}));
}

TEST(KReciprocal, SymmetricMembership) {
    Rng rng(4);
    const auto e = embed(raw_vectors(rng, 12, 8));
    const CostMatrix d = cosine_distance_matrix(e, e);
    const auto ranks = detail::rank_rows(d);
    for (std::size_t k = 1; k <= 6; ++k) {
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (std::size_t j : detail::reciprocal_set(ranks, i, k)) {
                const auto back = detail::reciprocal_set(ranks, j, k);
                EXPECT_NE(std::find(back.begin(), back.end(), i), back.end());
            }
        }
    }
}

TEST(Rerank, MatchesDenseReferenceOnRandomInstances) {
    Rng rng(99);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto nq = static_cast<std::size_t>(1 + rng.next_u64() % 10);
        const auto ng = static_cast<std::size_t>(1 + rng.next_u64() % 10);
        const auto dim = static_cast<std::size_t>(2 + rng.next_u64() % 15);
        RerankParams p;
        p.k1 = static_cast<std::size_t>(1 + rng.next_u64() % 12);
        p.k2 = static_cast<std::size_t>(1 + rng.next_u64() % 8);
        if (p.k2 > p.k1) p.k2 = p.k1;
        p.lambda_rr = std::floor(rng.uniform() * 5.0) / 4.0;
        const auto qraw = raw_vectors(rng, nq, dim);
        const auto graw = raw_vectors(rng, ng, dim);
        const auto q = embed(qraw);
        const auto g = embed(graw);
        const CostMatrix got = rerank_distance_matrix(q, g, p);
        const auto want = reference::rerank(qraw, graw, p.k1, p.k2, p.lambda_rr);
        for (std::size_t i = 0; i < nq; ++i) {
            for (std::size_t j = 0; j < ng; ++j) {
                ASSERT_NEAR(got(i, j), want[i][j], 1e-6) << "trial " << trial << " (" << i << "," << j << ")";
            }
        }
        ++checked;
    }
    EXPECT_EQ(checked, 200);
}

TEST(Rerank, DefaultsMatchReferenceOnLargerGallery) {
    Rng rng(7);
    const auto qraw = raw_vectors(rng, 10, 32);
    const auto graw = raw_vectors(rng, 30, 32);
    const CostMatrix got = rerank_distance_matrix(embed(qraw), embed(graw), RerankParams{});
    const auto want = reference::rerank(qraw, graw, 20, 6, 0.3);
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j < 30; ++j) EXPECT_NEAR(got(i, j), want[i][j], 1e-6);
    }
}

TEST(Rerank, LambdaOneIsCosine) {
    Rng rng(1);
    const auto q = embed(raw_vectors(rng, 4, 6));
    const auto g = embed(raw_vectors(rng, 5, 6));
    RerankParams p;
    p.lambda_rr = 1.0;
    EXPECT_EQ(rerank_distance_matrix(q, g, p), cosine_distance_matrix(q, g));
}

TEST(Rerank, SingleGalleryElementFallsBackToCosine) {
    Rng rng(2);
    const auto q = embed(raw_vectors(rng, 3, 6));
    const auto g = embed(raw_vectors(rng, 1, 6));
    EXPECT_EQ(rerank_distance_matrix(q, g, RerankParams{}), cosine_distance_matrix(q, g));
}

TEST(Rerank, EmptyGalleryThrows) {
    const std::vector<Embedding> q{test_support::axis(2, 0)};
    EXPECT_THROW(rerank_distance_matrix(q, {}, RerankParams{}), std::invalid_argument);
}

TEST(Rerank, IdentityIsNearestAmongSimilarLookalikes) {
    // many identities sharing a common direction; queries are jittered copies
    Rng rng(13);
    const std::size_t dim = 64;
    std::vector<double> common(dim);
    for (double& x : common) x = rng.normal();
    std::vector<std::vector<double>> gallery, queries;
    for (int id = 0; id < 8; ++id) {
        std::vector<double> base(dim);
        for (std::size_t i = 0; i < dim; ++i) base[i] = 2.0 * common[i] + rng.normal();
        for (int copy = 0; copy < 3; ++copy) {
            auto g = base;
            for (double& x : g) x += 0.2 * rng.normal();
            gallery.push_back(g);
        }
        auto q = base;
        for (double& x : q) x += 0.2 * rng.normal();
        queries.push_back(q);
    }
    const CostMatrix d = rerank_distance_matrix(embed(queries), embed(gallery), RerankParams{});
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto row = d.row(q);
        const auto best = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
        EXPECT_EQ(best / 3, q);
    }
}

TEST(SpatialGate, StrictBoundaryAndPassThrough) {
    const auto raw = CostMatrix::from_rows({{0.1, 0.2, 0.3}});
    const std::vector<Box> q{{0, 0, 10, 10}};
    const std::vector<Box> g{{600, 0, 10, 10}, {599.5, 0, 10, 10}, {0, 700, 10, 10}};
    const CostMatrix gated = apply_spatial_gate(raw, q, g, 600.0);
    EXPECT_EQ(gated(0, 0), kInf);
    EXPECT_EQ(gated(0, 1), 0.2);
    EXPECT_EQ(gated(0, 2), kInf);
    EXPECT_THROW(apply_spatial_gate(raw, q, std::vector<Box>{}, 600.0), std::invalid_argument);
}

TEST(SpatialGate, MonotoneInDelta) {
    Rng rng(21);
    std::vector<Box> q, g;
    for (int i = 0; i < 6; ++i) q.push_back(test_support::random_box(rng, 1500.0));
    for (int i = 0; i < 9; ++i) g.push_back(test_support::random_box(rng, 1500.0));
    CostMatrix raw(6, 9);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 9; ++j) raw(i, j) = rng.uniform();
    }
    std::size_t last = 0;
    for (double delta = 0.0; delta <= 2500.0; delta += 100.0) {
        const CostMatrix m = apply_spatial_gate(raw, q, g, delta);
        std::size_t finite = 0;
        for (double v : m.values()) finite += std::isfinite(v) ? 1 : 0;
        EXPECT_GE(finite, last);
        last = finite;
    }
    EXPECT_EQ(last, 54u);
}
