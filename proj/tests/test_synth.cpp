#include "support.hpp"

#include <gtest/gtest.h>

using namespace croptrack;

TEST(Rng, KnownStreamAndRanges) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
    Rng c(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = c.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    // 10000th output of mt19937_64 with its default seed is fixed by the standard
    Rng std_seeded(5489);
    for (int i = 0; i < 9999; ++i) std_seeded.next_u64();
    EXPECT_EQ(std_seeded.next_u64(), 9981545732273789042ULL);
    EXPECT_NE(Rng::derive_seed(1, 0), Rng::derive_seed(1, 1));
}

TEST(Rng, NormalMoments) {
    Rng r(7);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Synth, OneObjectTenFrames) {
    ScenarioSpec s;
    s.objects = 1;
    s.frames = 10;
    const auto b = synth_sequence(s, 1);
    ASSERT_EQ(b.frame_count(), 10);
    for (const auto& f : b.detections) EXPECT_EQ(f.size(), 1u);
}

TEST(Synth, SimilarityOneCollapsesIdentities) {
    const IdentityEmbedder e(32, 1.0, 0.0, 5);
    EXPECT_NEAR(e.base(1).dot(e.base(2)), 1.0, 1e-12);
    const IdentityEmbedder d(512, 0.0, 0.0, 5);
    EXPECT_NEAR(d.base(1).dot(d.base(2)), 0.0, 0.2);
    const IdentityEmbedder h(512, 0.95, 0.0, 5);
    EXPECT_NEAR(h.base(1).dot(h.base(2)), 0.95, 0.02);
}

TEST(Synth, ObservationsIndependentOfCallOrder) {
    const IdentityEmbedder e(16, 0.5, 0.1, 9);
    const Embedding first = e.observe(3, 10);
    (void)e.observe(4, 11);
    EXPECT_EQ(e.observe(3, 10), first);
}

TEST(Synth, CrossingPairCountsGaps) {
    for (int frames : {40, 60, 100}) {
        const auto b = synth_sequence(crossing_scenario(frames, 8), 1);
        std::size_t n = 0;
        for (const auto& f : b.detections) n += f.size();
        EXPECT_EQ(n, static_cast<std::size_t>(2 * frames - 8));
    }
}

TEST(Synth, DeterministicUnderSeed) {
    const auto a = synth_sequence(benchmark_scenario(), 7);
    const auto b = synth_sequence(benchmark_scenario(), 7);
    const auto c = synth_sequence(benchmark_scenario(), 8);
    EXPECT_EQ(*a.gt, *b.gt);
    EXPECT_NE(*a.gt, *c.gt);
}

TEST(Synth, BoxesStayInsideFrameUnderShake) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto spec = benchmark_scenario();
        const auto b = synth_sequence(spec, seed);
        for (const auto& f : *b.gt) {
            for (const auto& o : f) {
                EXPECT_GE(o.box.x, 0.0);
                EXPECT_GE(o.box.y, 0.0);
                EXPECT_LE(o.box.right(), spec.width);
                EXPECT_LE(o.box.bottom(), spec.height);
            }
        }
    }
}

TEST(Synth, InfeasibleSpecRejected) {
    ScenarioSpec s;
    s.width = 50;
    EXPECT_THROW(synth_sequence(s, 1), std::invalid_argument);
    EXPECT_THROW(named_scenario("nope"), std::invalid_argument);
}
