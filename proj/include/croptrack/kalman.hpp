// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/geometry.hpp>

#include <Eigen/Dense>

#include <stdexcept>

namespace croptrack {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Matrix<double, 4, 1>;

/**
 * Constant-velocity box filter state.
 *
 * mean = (cx, cy, a, h, vcx, vcy, va, vh) where a = w / h. Velocities are per frame.
 */
struct KalmanState {
    StateVector mean = StateVector::Zero();
    StateCovariance covariance = StateCovariance::Identity();
};

/// Noise weights are fractions of the box height, so the filter is scale-invariant.
struct KalmanNoise {
    double position_weight = 1.0 / 20.0;
    double velocity_weight = 1.0 / 160.0;
};

class degenerate_state : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline MeasurementVector to_measurement(const Box& b) {
    return {b.cx(), b.cy(), b.w / b.h, b.h};
}

inline Eigen::Matrix<double, 8, 8> transition() {
    Eigen::Matrix<double, 8, 8> f = Eigen::Matrix<double, 8, 8>::Identity();
    for (int i = 0; i < 4; ++i) {
        f(i, i + 4) = 1.0;
    }
    return f;
}

inline Eigen::Matrix<double, 4, 8> observation() {
    Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
    h.leftCols<4>().setIdentity();
    return h;
}

}  // namespace detail

inline KalmanState init_state(const Box& measurement, const KalmanNoise& noise = {}) {
    KalmanState s;
    s.mean.head<4>() = detail::to_measurement(measurement);
    s.mean.tail<4>().setZero();

    const double h = measurement.h;
    const double pos = 2.0 * noise.position_weight * h;
    const double vel = 10.0 * noise.velocity_weight * h;
    StateVector std_dev;
    std_dev << pos, pos, 1e-2, pos, vel, vel, 1e-5, vel;
    s.covariance = std_dev.array().square().matrix().asDiagonal();
    return s;
}

inline KalmanState predict(const KalmanState& state, const KalmanNoise& noise = {}) {
    const double h = state.mean(3);
    const double pos = noise.position_weight * h;
    const double vel = noise.velocity_weight * h;
    StateVector std_dev;
    std_dev << pos, pos, 1e-2, pos, vel, vel, 1e-5, vel;
    const StateCovariance q = std_dev.array().square().matrix().asDiagonal();

    static const auto f = detail::transition();
    KalmanState out;
    out.mean = f * state.mean;
    out.covariance = f * state.covariance * f.transpose() + q;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    return out;
}

/**
 * Measurement update with noise-scale-adaptive measurement covariance.
 *
 * The measurement covariance R is scaled to (1 - confidence) * R, so a fully
 * confident detection is trusted exactly and confidence 0 gives the plain update.
 */
inline KalmanState update_nsa(const KalmanState& state, const Box& measurement, double confidence,
                              const KalmanNoise& noise = {}) {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw std::invalid_argument("update_nsa: confidence must lie in [0, 1]");
    }
    const double h = state.mean(3);
    const double pos = noise.position_weight * h;
    Eigen::Vector4d std_dev(pos, pos, 1e-1, pos);
    const Eigen::Matrix4d r = (1.0 - confidence) * Eigen::Matrix4d(std_dev.array().square().matrix().asDiagonal());

    static const auto obs = detail::observation();
    const Eigen::Matrix4d innovation_cov = obs * state.covariance * obs.transpose() + r;
    const Eigen::Matrix<double, 8, 4> cross = state.covariance * obs.transpose();

    // K = P H^T S^-1, solved as S K^T = H P.
    const Eigen::LDLT<Eigen::Matrix4d> ldlt(innovation_cov);
    const Eigen::Matrix<double, 8, 4> gain = ldlt.solve(cross.transpose()).transpose();

    const MeasurementVector innovation = detail::to_measurement(measurement) - obs * state.mean;
    KalmanState out;
    out.mean = state.mean + gain * innovation;
    out.covariance = state.covariance - gain * innovation_cov * gain.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    return out;
}

/// Plain Kalman update: the NSA rule with confidence 0.
inline KalmanState update(const KalmanState& state, const Box& measurement, const KalmanNoise& noise = {}) {
    return update_nsa(state, measurement, 0.0, noise);
}

inline Box project_box(const KalmanState& state) {
    const double cx = state.mean(0);
    const double cy = state.mean(1);
    const double a = state.mean(2);
    const double h = state.mean(3);
    if (!(h > 0.0) || !(a > 0.0)) {
        throw degenerate_state("project_box: non-positive height or aspect ratio");
    }
    const double w = a * h;
    return {cx - w / 2.0, cy - h / 2.0, w, h};
}

}  // namespace croptrack
