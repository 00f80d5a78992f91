// Copyright 2026 The STT Tracking Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stt/kalman/kalman_filter.hpp"
#include "stt/core/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <array>
#include <random>

namespace stt::kalman {
namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

// One axis of the filter written out with plain loops.
struct ScalarAxis {
  Vec3 x{};
  Mat3 p{};

  void predict(double dt, double q) {
    const Mat3 f{{{1, dt, dt * dt / 2}, {0, 1, dt}, {0, 0, 1}}};
    const Mat3 qm{{{q * std::pow(dt, 5) / 20, q * std::pow(dt, 4) / 8, q * std::pow(dt, 3) / 6},
                   {q * std::pow(dt, 4) / 8, q * std::pow(dt, 3) / 3, q * dt * dt / 2},
                   {q * std::pow(dt, 3) / 6, q * dt * dt / 2, q * dt}}};
    Vec3 nx{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) nx[i] += f[i][j] * x[j];
    Mat3 fp{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) fp[i][j] += f[i][k] * p[k][j];
    Mat3 np{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) np[i][j] += fp[i][k] * f[j][k];
        np[i][j] += qm[i][j];
      }
    x = nx;
    p = np;
  }

  // Standard-form update; equal to Joseph form in exact arithmetic.
  void update(double z, double r) {
    const double s = p[0][0] + r;
    const Vec3 k{p[0][0] / s, p[1][0] / s, p[2][0] / s};
    const double innovation = z - x[0];
    for (int i = 0; i < 3; ++i) x[i] += k[i] * innovation;
    Mat3 np{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) np[i][j] = p[i][j] - k[i] * p[0][j];
    p = np;
  }
};

TEST(Kalman, PredictStaticLeavesPosition) {
  KfParams params;
  const KfState s = initialize({3, -1}, params);
  const KfState out = predict(s, 0.1, params);
  EXPECT_EQ(out.mean.segment<2>(0), Eigen::Vector2d(3, -1));
}

TEST(Kalman, PredictMovesWithVelocity) {
  KfParams params;
  KfState s;
  s.mean << 0, 0, 1, 0, 0, 0;
  const KfState out = predict(s, 1.0, params);
  EXPECT_NEAR(out.mean(0), 1.0, 1e-12);
  EXPECT_NEAR(out.mean(1), 0.0, 1e-12);
}

TEST(Kalman, PredictRejectsNonPositiveDt) {
  KfParams params;
  EXPECT_THROW(predict(initialize({0, 0}, params), 0.0, params), std::invalid_argument);
}

TEST(Kalman, MatchesHandWrittenAxisFilter) {
  KfParams params;
  params.process_noise_accel_sigma = 0.7;
  params.meas_noise_sigma = 0.3;
  KfState s = initialize({1.0, -2.0}, params);
  ScalarAxis ax;
  ax.x = {1.0, 0.0, 0.0};
  ax.p = {{{0.09, 0, 0}, {0, 100, 0}, {0, 0, 9}}};
  const double q = 0.49, r = 0.09, dt = 0.1;
  const std::array<double, 4> zs{1.05, 1.22, 1.31, 1.50};
  for (double z : zs) {
    s = update(predict(s, dt, params), {z, -2.0}, params);
    ax.predict(dt, q);
    ax.update(z, r);
  }
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(s.mean(2 * i), ax.x[i], 1e-9);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(s.covariance(2 * i, 2 * j), ax.p[i][j], 1e-9);
  }
}

TEST(Kalman, UpdateWithTinyNoiseSnapsToMeasurement) {
  const KfState prior = initialize({0, 0}, KfParams{});
  KfParams params;
  params.meas_noise_sigma = 1e-6;
  const KfState s = update(prior, {0.5, -0.25}, params);
  EXPECT_NEAR(s.mean(0), 0.5, 1e-9);
  EXPECT_NEAR(s.mean(1), -0.25, 1e-9);
}

TEST(Kalman, UpdateWithHugeNoiseIsUninformative) {
  KfParams params;
  KfState prior = predict(initialize({1, 2}, KfParams{}), 0.1, KfParams{});
  params.meas_noise_sigma = 1e6;
  const KfState s = update(prior, {50, 50}, params);
  EXPECT_LT((s.mean - prior.mean).norm(), 1e-6);
}

TEST(Kalman, ConvergesOnNoiselessConstantVelocity) {
  KfParams params;
  params.meas_noise_sigma = 1e-4;
  const Eigen::Vector2d v(4.0, -1.5);
  KfState s = initialize({0, 0}, params);
  for (int k = 1; k <= 10; ++k) s = update(predict(s, 0.1, params), v * 0.1 * k, params);
  EXPECT_LT((s.mean.segment<2>(2) - v).norm(), 1e-6);
}

TEST(Kalman, ConvergesOnNoiselessConstantAcceleration) {
  KfParams params;
  params.meas_noise_sigma = 1e-4;
  const Eigen::Vector2d v0(2.0, 1.0), a(1.5, -0.5);
  KfState s = initialize({0, 0}, params);
  for (int k = 1; k <= 20; ++k) {
    const double t = 0.1 * k;
    s = update(predict(s, 0.1, params), v0 * t + 0.5 * a * t * t, params);
  }
  EXPECT_LT((s.mean.segment<2>(4) - a).norm(), 1e-3);
}

TEST(Kalman, CovarianceStaysSymmetricPositiveDefinite) {
  KfParams params;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  KfState s = initialize({0, 0}, params);
  for (int k = 0; k < 500; ++k) {
    s = update(predict(s, 0.1, params), {n(rng), n(rng)}, params);
    ASSERT_TRUE(s.covariance.isApprox(s.covariance.transpose(), 1e-12));
    ASSERT_GT(s.covariance.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Kalman, UpdateFailsLoudlyOnBrokenCovariance) {
  KfParams params;
  KfState s = initialize({0, 0}, params);
  s.covariance(3, 3) = -50.0;
  EXPECT_THROW(update(s, {0, 0}, params), NumericalFailure);
}

TEST(Kalman, ProcessNoiseIsSymmetricPsd) {
  const Matrix6 q = process_noise(0.1, KfParams{});
  EXPECT_TRUE(q.isApprox(q.transpose()));
  EXPECT_GE(q.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), -1e-15);
}

TEST(KalmanCost, PerfectOverlapIsZero) {
  KfParams params;
  const Box7 b(Eigen::Vector3d(5, 5, 0), Eigen::Vector3d(2, 4, 1.5), 0.3);
  KfState s = initialize({5, 5}, params);
  Detection d;
  d.box = b;
  const auto cost = association_cost(s, b, d, params);
  ASSERT_TRUE(cost.has_value());
  EXPECT_NEAR(*cost, 0.0, 1e-12);
}

TEST(KalmanCost, DisjointIsForbidden) {
  KfParams params;
  const Box7 b(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(2, 4, 1.5), 0.0);
  Detection d;
  d.box = b.with_center({40, 0, 0});
  EXPECT_FALSE(association_cost(initialize({0, 0}, params), b, d, params).has_value());
}

TEST(KalmanCost, HalfOverlapUsesPredictedCenter) {
  KfParams params;
  const Box7 last(Eigen::Vector3d(-10, 0, 0), Eigen::Vector3d(2, 2, 1.5), 0.0);
  Detection d;
  d.box = last.with_center({1, 0, 0});
  // Predicted at the origin: two 2x2 squares offset by 1 m share a 1x2 strip.
  const auto cost = association_cost(initialize({0, 0}, params), last, d, params);
  ASSERT_TRUE(cost.has_value());
  EXPECT_NEAR(*cost, 1.0 - 2.0 / 6.0, 1e-12);
}

}  // namespace
}  // namespace stt::kalman
