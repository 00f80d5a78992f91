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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stt {
namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Signed distance-like test of p against the directed edge a->b; >= 0 is inside
// for a counter-clockwise clip polygon.
double side(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return cross(b - a, p - a);
}

Eigen::Vector2d intersect(const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                          double side_p, double side_q) {
  const double t = side_p / (side_p - side_q);
  return p + t * (q - p);
}

}  // namespace

std::array<Eigen::Vector2d, 4> footprint(const Box7& box) {
  // Length runs along the heading direction, width across it.
  const double c = std::cos(box.heading());
  const double s = std::sin(box.heading());
  const Eigen::Vector2d along(c * 0.5 * box.length(), s * 0.5 * box.length());
  const Eigen::Vector2d across(-s * 0.5 * box.width(), c * 0.5 * box.width());
  const Eigen::Vector2d center = box.center().head<2>();
  return {center - along - across, center + along - across, center + along + across,
          center - along + across};
}

double polygon_area(const std::vector<Eigen::Vector2d>& polygon) {
  if (polygon.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * std::abs(twice);
}

std::vector<Eigen::Vector2d> clip_convex(const std::vector<Eigen::Vector2d>& subject,
                                         const std::vector<Eigen::Vector2d>& clip) {
  // Sutherland-Hodgman against each clip edge.
  std::vector<Eigen::Vector2d> output = subject;
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Eigen::Vector2d& a = clip[e];
    const Eigen::Vector2d& b = clip[(e + 1) % clip.size()];
    std::vector<Eigen::Vector2d> input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Eigen::Vector2d& cur = input[i];
      const Eigen::Vector2d& nxt = input[(i + 1) % input.size()];
      const double sc = side(a, b, cur);
      const double sn = side(a, b, nxt);
      if (sc >= 0.0) {
        output.push_back(cur);
        if (sn < 0.0) output.push_back(intersect(cur, nxt, sc, sn));
      } else if (sn >= 0.0) {
        output.push_back(intersect(cur, nxt, sc, sn));
      }
    }
  }
  return output;
}

double bev_iou(const Box7& first, const Box7& second) {
  // Clip in a canonical order so that the result is exactly symmetric.
  const auto key = [](const Box7& box) {
    return std::array<double, 7>{box.center().x(), box.center().y(), box.center().z(),
                                 box.width(),      box.length(),     box.height(),
                                 box.heading()};
  };
  const bool swap = key(second) < key(first);
  const Box7& a = swap ? second : first;
  const Box7& b = swap ? first : second;

  const auto fa = footprint(a);
  const auto fb = footprint(b);
  const double area_a = a.width() * a.length();
  const double area_b = b.width() * b.length();

  // Quick reject on circumscribed circles.
  const double ra = 0.5 * std::hypot(a.width(), a.length());
  const double rb = 0.5 * std::hypot(b.width(), b.length());
  if ((a.center().head<2>() - b.center().head<2>()).norm() > ra + rb) return 0.0;

  const std::vector<Eigen::Vector2d> pa(fa.begin(), fa.end());
  const std::vector<Eigen::Vector2d> pb(fb.begin(), fb.end());
  const double inter = polygon_area(clip_convex(pa, pb));
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

StateVector extrapolate(const StateVector& state, double dt) {
  if (dt < 0.0) throw std::invalid_argument("extrapolate: dt must be >= 0");
  StateVector out;
  out.position = state.position + state.velocity * dt + 0.5 * state.acceleration * dt * dt;
  out.velocity = state.velocity + state.acceleration * dt;
  out.acceleration = state.acceleration;
  return out;
}

double center_distance(const StateVector& predicted, const Box7& box) {
  return (predicted.position - box.center().head<2>()).norm();
}

}  // namespace stt
