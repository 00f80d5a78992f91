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

#include "stt/core/geometry.hpp"
#include "stt/core/types.hpp"

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace stt {
namespace {

Box7 box(double x, double y, double w, double l, double heading) {
  return Box7(Eigen::Vector3d(x, y, 0.0), Eigen::Vector3d(w, l, 1.5), heading);
}

// Point-in-rotated-rectangle sampling over the joint bounding square.
double monte_carlo_iou(const Box7& a, const Box7& b, int samples, std::uint64_t seed) {
  auto inside = [](const Box7& r, double x, double y) {
    const double c = std::cos(r.heading());
    const double s = std::sin(r.heading());
    const double dx = x - r.center().x();
    const double dy = y - r.center().y();
    // Length runs along the heading, width across it.
    const double along = c * dx + s * dy;
    const double across = -s * dx + c * dy;
    return std::abs(along) <= r.length() / 2 && std::abs(across) <= r.width() / 2;
  };
  auto reach = [](const Box7& r) { return std::hypot(r.width(), r.length()) / 2; };
  const double lo_x = std::min(a.center().x() - reach(a), b.center().x() - reach(b));
  const double hi_x = std::max(a.center().x() + reach(a), b.center().x() + reach(b));
  const double lo_y = std::min(a.center().y() - reach(a), b.center().y() - reach(b));
  const double hi_y = std::max(a.center().y() + reach(a), b.center().y() + reach(b));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo_x, hi_x), uy(lo_y, hi_y);
  long long in_a = 0, in_b = 0, both = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = ux(rng), y = uy(rng);
    const bool pa = inside(a, x, y), pb = inside(b, x, y);
    in_a += pa;
    in_b += pb;
    both += pa && pb;
  }
  const long long uni = in_a + in_b - both;
  return uni == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(uni);
}

TEST(Box7, RejectsDegenerateSizes) {
  EXPECT_THROW(box(0, 0, 0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(box(0, 0, 1.0, -1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(box(0, 0, 1.0, NAN, 0.0), std::invalid_argument);
}

TEST(Box7, HeadingIsWrapped) {
  const Box7 b = box(0, 0, 1, 1, 3 * std::numbers::pi);
  EXPECT_NEAR(b.heading(), std::numbers::pi, 1e-12);
  EXPECT_GT(normalize_heading(-std::numbers::pi), 0.0);
}

TEST(Classes, RoundTrip) {
  EXPECT_EQ(class_from_string(to_string(ClassId::kPedestrian)), ClassId::kPedestrian);
  EXPECT_THROW(class_from_string("truck"), std::invalid_argument);
}

TEST(BevIou, IdenticalBoxesGiveOne) {
  const Box7 b = box(3, -2, 2, 4.5, 0.3);
  EXPECT_NEAR(bev_iou(b, b), 1.0, 1e-12);
}

TEST(BevIou, DisjointBoxesGiveZero) {
  EXPECT_EQ(bev_iou(box(0, 0, 2, 2, 0), box(100, 0, 2, 2, 0)), 0.0);
}

TEST(BevIou, RotatedUnitSquareMatchesMonteCarlo) {
  const Box7 a = box(0, 0, 1, 1, 0);
  const Box7 b = box(0, 0, 1, 1, std::numbers::pi / 4);
  EXPECT_NEAR(bev_iou(a, b), monte_carlo_iou(a, b, 1'000'000, 7), 0.01);
}

TEST(BevIou, IgnoresHeight) {
  const Box7 a = box(0, 0, 2, 4, 0.1);
  const Box7 b(Eigen::Vector3d(0.5, 0.2, 30.0), Eigen::Vector3d(2, 4, 0.1), 0.4);
  EXPECT_NEAR(bev_iou(a, b), bev_iou(a, box(0.5, 0.2, 2, 4, 0.4)), 1e-12);
}

TEST(BevIou, SymmetricAndRigidInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-2, 2), size(0.5, 5), ang(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const Box7 a = box(pos(rng), pos(rng), size(rng), size(rng), ang(rng));
    const Box7 b = box(pos(rng), pos(rng), size(rng), size(rng), ang(rng));
    const double iou = bev_iou(a, b);
    ASSERT_GE(iou, 0.0);
    ASSERT_LE(iou, 1.0);
    EXPECT_EQ(iou, bev_iou(b, a));

    // Rotate both boxes about the origin and translate.
    const double theta = ang(rng);
    const Eigen::Vector2d shift(pos(rng) * 10, pos(rng) * 10);
    auto move = [&](const Box7& r) {
      const Eigen::Vector2d c =
          Eigen::Rotation2Dd(theta) * r.center().head<2>() + shift;
      return box(c.x(), c.y(), r.width(), r.length(), r.heading() + theta);
    };
    EXPECT_NEAR(iou, bev_iou(move(a), move(b)), 1e-9);
  }
}

TEST(BevIou, HalfTurnIsSameFootprint) {
  const Box7 a = box(1, 1, 2, 4, 0.2);
  EXPECT_NEAR(bev_iou(a, box(1, 1, 2, 4, 0.2 + std::numbers::pi)), 1.0, 1e-12);
}

TEST(Polygon, ShoelaceArea) {
  const std::vector<Eigen::Vector2d> square{{0, 0}, {2, 0}, {2, 3}, {0, 3}};
  EXPECT_DOUBLE_EQ(polygon_area(square), 6.0);
  EXPECT_EQ(polygon_area({}), 0.0);
}

TEST(Extrapolate, StaticIsUnchanged) {
  const StateVector s;
  EXPECT_EQ(extrapolate(s, 0.1), s);
}

TEST(Extrapolate, ConstantVelocity) {
  StateVector s;
  s.velocity = {2, 0};
  const StateVector out = extrapolate(s, 0.5);
  EXPECT_NEAR(out.position.x(), 1.0, 1e-12);
  EXPECT_NEAR(out.position.y(), 0.0, 1e-12);
}

TEST(Extrapolate, MatchesFineEulerIntegration) {
  StateVector s;
  s.position = {1, 1};
  s.velocity = {1, 0};
  s.acceleration = {2, 0};
  // Explicit Euler is first order: 1000 steps land within h * a / 2 = 1e-3.
  Eigen::Vector2d p = s.position, v = s.velocity;
  const int steps = 1000;
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    p += v * h;
    v += s.acceleration * h;
  }
  const StateVector out = extrapolate(s, 1.0);
  EXPECT_NEAR(out.position.x(), p.x(), 2e-3);
  EXPECT_NEAR(out.position.y(), p.y(), 1e-12);
  EXPECT_NEAR(out.velocity.x(), v.x(), 1e-9);
  EXPECT_NEAR(out.position.x(), 3.0, 1e-12);
}

TEST(Extrapolate, Semigroup) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5), t(0, 2);
  for (int i = 0; i < 100; ++i) {
    StateVector s;
    s.position = {u(rng), u(rng)};
    s.velocity = {u(rng), u(rng)};
    s.acceleration = {u(rng), u(rng)};
    const double a = t(rng), b = t(rng);
    const StateVector once = extrapolate(s, a + b);
    const StateVector twice = extrapolate(extrapolate(s, a), b);
    EXPECT_TRUE(once.position.isApprox(twice.position, 1e-9));
    EXPECT_TRUE(once.velocity.isApprox(twice.velocity, 1e-9));
    EXPECT_EQ(once.acceleration, twice.acceleration);
  }
}

TEST(CenterDistance, ThreeFourFive) {
  StateVector s;
  EXPECT_DOUBLE_EQ(center_distance(s, box(3, 4, 1, 1, 0)), 5.0);
  EXPECT_EQ(center_distance(s, box(0, 0, 1, 1, 0)), 0.0);
}

TEST(CenterDistance, MatchesComponentwiseFormula) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 100; ++i) {
    StateVector s;
    s.position = {u(rng), u(rng)};
    const Box7 b(Eigen::Vector3d(u(rng), u(rng), u(rng)), Eigen::Vector3d(1, 1, 1), 0.0);
    const double dx = s.position.x() - b.center().x();
    const double dy = s.position.y() - b.center().y();
    EXPECT_NEAR(center_distance(s, b), std::sqrt(dx * dx + dy * dy), 1e-12);
  }
}

TEST(StateVector, ArrayRoundTrip) {
  StateVector s;
  s.position = {1, 2};
  s.velocity = {3, 4};
  s.acceleration = {5, 6};
  EXPECT_EQ(StateVector::from_array(s.to_array()), s);
  EXPECT_TRUE(s.is_finite());
  s.velocity.x() = INFINITY;
  EXPECT_FALSE(s.is_finite());
}

TEST(Detection, ValidatesWidthsAndConfidence) {
  Detection d;
  d.appearance.assign(8, 0.0);
  d.motion.assign(2, 0.0);
  EXPECT_NO_THROW(d.validate(8, 2));
  EXPECT_THROW(d.validate(4, 2), std::invalid_argument);
  d.confidence = 1.5;
  EXPECT_THROW(d.validate(8, 2), std::invalid_argument);
}

TEST(Track, AppendKeepsNewestEntries) {
  Track t;
  for (int f = 0; f < 15; ++f) t.append(f, Detection{}, StateVector{}, 10);
  EXPECT_EQ(t.history.size(), 10u);
  EXPECT_EQ(t.history.front().first, 5);
  EXPECT_EQ(t.last_frame(), 14);
}

}  // namespace
}  // namespace stt
