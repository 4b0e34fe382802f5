#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace croptrack;

namespace {

bool symmetric_psd(const StateCovariance& p) {
    if (!p.isApprox(p.transpose(), 1e-9)) return false;
    Eigen::SelfAdjointEigenSolver<StateCovariance> es(p);
    return es.eigenvalues().minCoeff() > -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff());
}

double position_variance(const KalmanState& s) { return s.covariance(0, 0); }

}  // namespace

TEST(Kalman, InitRoundTripsNiceBox) {
    const Box b{100, 200, 50, 100};
    const Box back = project_box(init_state(b));
    EXPECT_EQ(back.x, b.x);
    EXPECT_EQ(back.y, b.y);
    EXPECT_EQ(back.w, b.w);
    EXPECT_EQ(back.h, b.h);
}

TEST(Kalman, InitRoundTripsRandomBoxesClosely) {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Box b = test_support::random_box(rng, 1000.0);
        const Box back = project_box(init_state(b));
        EXPECT_NEAR(back.x, b.x, 1e-9);
        EXPECT_NEAR(back.y, b.y, 1e-9);
        EXPECT_NEAR(back.w, b.w, 1e-9);
        EXPECT_NEAR(back.h, b.h, 1e-9);
    }
}

TEST(Kalman, InitialVelocityIsZeroAndCovarianceScalesWithHeight) {
    const KalmanState s = init_state({0, 0, 20, 40});
    EXPECT_EQ(s.mean.tail<4>().norm(), 0.0);
    const double wp = 1.0 / 20.0;
    const double wv = 1.0 / 160.0;
    EXPECT_DOUBLE_EQ(s.covariance(0, 0), std::pow(2 * wp * 40, 2));
    EXPECT_DOUBLE_EQ(s.covariance(2, 2), 1e-4);
    EXPECT_DOUBLE_EQ(s.covariance(4, 4), std::pow(10 * wv * 40, 2));
    EXPECT_DOUBLE_EQ(s.covariance(6, 6), 1e-10);
}

TEST(Kalman, PredictMovesByVelocityAndGrowsCovariance) {
    KalmanState s = init_state({0, 0, 20, 40});
    s.mean(4) = 3.0;
    s.mean(5) = -2.0;
    const KalmanState p = predict(s);
    EXPECT_DOUBLE_EQ(p.mean(0), s.mean(0) + 3.0);
    EXPECT_DOUBLE_EQ(p.mean(1), s.mean(1) - 2.0);
    EXPECT_GT(p.covariance(0, 0), s.covariance(0, 0));
}

TEST(Kalman, FullConfidenceSnapsToMeasurement) {
    KalmanState s = predict(init_state({100, 100, 40, 80}));
    const Box z{130, 90, 44, 88};
    const KalmanState u = update_nsa(s, z, 1.0);
    const Box b = project_box(u);
    EXPECT_NEAR(b.cx(), z.cx(), 1e-6);
    EXPECT_NEAR(b.cy(), z.cy(), 1e-6);
    EXPECT_NEAR(b.h, z.h, 1e-6);
}

TEST(Kalman, ZeroConfidenceEqualsStandardUpdate) {
    const KalmanState s = predict(init_state({100, 100, 40, 80}));
    const Box z{110, 95, 42, 82};
    const KalmanState a = update_nsa(s, z, 0.0);
    const KalmanState b = update(s, z);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.covariance, b.covariance);
}

TEST(Kalman, HigherConfidencePullsHarderAndShrinksMore) {
    const KalmanState s = predict(init_state({100, 100, 40, 80}));
    const Box z{140, 100, 40, 80};
    double last_gap = std::numeric_limits<double>::infinity();
    double last_var = std::numeric_limits<double>::infinity();
    for (double c = 0.0; c <= 1.0 + 1e-12; c += 0.1) {
        const KalmanState u = update_nsa(s, z, std::min(c, 1.0));
        const double gap = std::abs(u.mean(0) - z.cx());
        EXPECT_LE(gap, last_gap + 1e-12);
        EXPECT_LE(position_variance(u), last_var + 1e-12);
        last_gap = gap;
        last_var = position_variance(u);
    }
}

TEST(Kalman, RejectsConfidenceOutsideUnitInterval) {
    const KalmanState s = init_state({0, 0, 10, 10});
    EXPECT_THROW(update_nsa(s, {0, 0, 10, 10}, 1.5), std::invalid_argument);
    EXPECT_THROW(update_nsa(s, {0, 0, 10, 10}, -0.1), std::invalid_argument);
}

TEST(Kalman, CovarianceStaysSymmetricPsdOverManyCycles) {
    Rng rng(5);
    KalmanState s = init_state({500, 300, 40, 80});
    for (int i = 0; i < 1000; ++i) {
        s = predict(s);
        const Box truth{500.0 + 2.0 * i, 300.0 + std::sin(0.05 * i) * 100.0, 40, 80};
        const Box z{truth.x + rng.normal(0, 3), truth.y + rng.normal(0, 3), truth.w * std::exp(rng.normal(0, 0.05)),
                    truth.h * std::exp(rng.normal(0, 0.05))};
        s = update_nsa(s, z, rng.uniform());
        ASSERT_TRUE(symmetric_psd(s.covariance)) << "cycle " << i;
    }
}

TEST(Kalman, ConvergesToConstantVelocity) {
    KalmanState s = init_state({0, 0, 40, 80});
    for (int f = 1; f <= 60; ++f) {
        s = predict(s);
        s = update(s, {4.0 * f, 2.0 * f, 40, 80});
    }
    EXPECT_NEAR(s.mean(4), 4.0, 0.05);
    EXPECT_NEAR(s.mean(5), 2.0, 0.05);
    const Box next = project_box(predict(s));
    EXPECT_NEAR(next.x, 4.0 * 61, 0.5);
}

TEST(Kalman, DegenerateStateThrowsOnProjection) {
    KalmanState s = init_state({0, 0, 10, 10});
    s.mean(3) = -1.0;
    EXPECT_THROW(project_box(s), degenerate_state);
}
