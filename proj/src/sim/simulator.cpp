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

#include "stt/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stt::sim {
namespace {

using Rng = std::mt19937_64;

double gauss(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::Vector3d nominal_size(ClassId cls) {
  // width, length, height
  return cls == ClassId::kVehicle ? Eigen::Vector3d(1.9, 4.5, 1.6)
                                  : Eigen::Vector3d(0.8, 0.8, 1.75);
}

double nominal_z(ClassId cls) { return 0.5 * nominal_size(cls).z(); }

std::vector<double> random_signature(Rng& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  for (double& x : v) {
    x = gauss(rng, 1.0);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

double heading_of(const StateVector& state, double fallback) {
  if (state.velocity.norm() > 1e-9) return std::atan2(state.velocity.y(), state.velocity.x());
  return fallback;
}

struct ObjectPlan {
  ClassId cls;
  Eigen::Vector2d origin;
  double heading;
  MotionProfile motion;
  Eigen::Vector3d size;
  std::vector<double> signature;
};

ObjectPlan sample_object(const SimConfig& config, Rng& rng) {
  ObjectPlan plan;
  plan.cls = config.cls;
  const double e = config.area_half_extent;
  plan.origin = {uniform(rng, -e, e), uniform(rng, -e, e)};
  plan.heading = normalize_heading(uniform(rng, -std::numbers::pi, std::numbers::pi));
  const Eigen::Vector2d dir(std::cos(plan.heading), std::sin(plan.heading));

  const MotionMix& mix = config.mix;
  std::discrete_distribution<int> pick({mix.static_weight, mix.constant_velocity_weight,
                                        mix.constant_acceleration_weight, mix.turn_weight});
  const int kind = pick(rng);
  const double speed = uniform(rng, config.min_speed, config.max_speed);
  const double duration = config.dt * (config.frames - 1);
  switch (kind) {
    case 0:
      plan.motion = StaticMotion{};
      break;
    case 1:
      plan.motion = ConstantVelocity{speed * dir};
      break;
    case 2: {
      // Decelerations are bounded so the object never reverses.
      const double lowest = -std::min(config.max_accel, speed / std::max(duration, 1e-9));
      const double accel = uniform(rng, lowest, config.max_accel);
      plan.motion = ConstantAcceleration{speed * dir, accel * dir};
      break;
    }
    default: {
      double rate = uniform(rng, 0.05, std::max(0.05, config.max_yaw_rate));
      if (uniform(rng, 0.0, 1.0) < 0.5) rate = -rate;
      plan.motion = Turn{speed, rate};
      break;
    }
  }
  plan.size = nominal_size(config.cls).cwiseProduct(Eigen::Vector3d(
      uniform(rng, 0.9, 1.1), uniform(rng, 0.9, 1.1), uniform(rng, 0.9, 1.1)));
  plan.signature = random_signature(rng, config.appearance_dim);
  return plan;
}

ObjectPlan plan_from_spec(const ObjectSpec& spec, const SimConfig& config, Rng& rng) {
  ObjectPlan plan;
  plan.cls = spec.cls;
  plan.origin = spec.initial_position;
  plan.heading = normalize_heading(spec.initial_heading);
  plan.motion = spec.motion;
  plan.size = spec.size.value_or(nominal_size(spec.cls));
  if (spec.signature) {
    if (static_cast<int>(spec.signature->size()) != config.appearance_dim) {
      throw std::invalid_argument("object signature width does not match appearance_dim");
    }
    plan.signature = *spec.signature;
  } else {
    plan.signature = random_signature(rng, config.appearance_dim);
  }
  return plan;
}

void validate_motion(const MotionProfile& motion) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantVelocity>) {
          if (!m.velocity.allFinite()) throw std::invalid_argument("non-finite velocity");
        } else if constexpr (std::is_same_v<T, ConstantAcceleration>) {
          if (!m.initial_velocity.allFinite() || !m.acceleration.allFinite()) {
            throw std::invalid_argument("non-finite acceleration profile");
          }
        } else if constexpr (std::is_same_v<T, Turn>) {
          if (!std::isfinite(m.speed) || !std::isfinite(m.yaw_rate)) {
            throw std::invalid_argument("non-finite turn profile");
          }
          if (m.yaw_rate == 0.0) throw std::invalid_argument("turn yaw_rate must be non-zero");
        }
      },
      motion);
}

}  // namespace

void NoiseModel::validate() const {
  const auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("noise.") + name + " must be finite and >= 0");
    }
  };
  nonneg(center_sigma, "center_sigma");
  nonneg(heading_sigma, "heading_sigma");
  nonneg(size_sigma, "size_sigma");
  nonneg(appearance_sigma, "appearance_sigma");
  nonneg(fp_rate, "fp_rate");
  nonneg(confidence_noise, "confidence_noise");
  if (!(miss_prob >= 0.0 && miss_prob < 1.0)) {
    throw std::invalid_argument("noise.miss_prob must be in [0, 1)");
  }
}

SimConfig SimConfig::defaults_for(ClassId cls) {
  SimConfig config;
  config.cls = cls;
  if (cls == ClassId::kPedestrian) {
    config.min_speed = 0.3;
    config.max_speed = 2.5;
    config.max_accel = 0.5;
    config.max_yaw_rate = 0.4;
    config.area_half_extent = 15.0;
    config.noise.center_sigma = 0.05;
  }
  return config;
}

void SimConfig::validate() const {
  if (frames < 2) throw std::invalid_argument("sim.frames must be >= 2");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sim.dt must be > 0");
  if (objects.empty() && num_objects < 1) {
    throw std::invalid_argument("sim needs at least one object");
  }
  if (!(area_half_extent > 0.0)) throw std::invalid_argument("sim.area_half_extent must be > 0");
  if (!(min_speed >= 0.0 && max_speed >= min_speed)) {
    throw std::invalid_argument("sim speed range must satisfy 0 <= min_speed <= max_speed");
  }
  if (!(max_accel >= 0.0) || !(max_yaw_rate >= 0.0)) {
    throw std::invalid_argument("sim.max_accel and sim.max_yaw_rate must be >= 0");
  }
  if (appearance_dim < 1) throw std::invalid_argument("sim.appearance_dim must be >= 1");
  const double w = mix.static_weight + mix.constant_velocity_weight +
                   mix.constant_acceleration_weight + mix.turn_weight;
  if (!(w > 0.0) || mix.static_weight < 0 || mix.constant_velocity_weight < 0 ||
      mix.constant_acceleration_weight < 0 || mix.turn_weight < 0) {
    throw std::invalid_argument("sim.mix weights must be >= 0 with a positive sum");
  }
  noise.validate();
  for (const ObjectSpec& spec : objects) validate_motion(spec.motion);
}

std::vector<Detection> Scenario::frame_detections(int frame) const {
  std::vector<Detection> out;
  const auto& row = detections.at(static_cast<std::size_t>(frame));
  out.reserve(row.size());
  for (const ScenarioDetection& d : row) out.push_back(d.detection);
  return out;
}

StateVector evaluate_motion(const MotionProfile& motion, const Eigen::Vector2d& origin,
                            double initial_heading, double t) {
  StateVector s;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StaticMotion>) {
          s.position = origin;
        } else if constexpr (std::is_same_v<T, ConstantVelocity>) {
          s.position = origin + m.velocity * t;
          s.velocity = m.velocity;
        } else if constexpr (std::is_same_v<T, ConstantAcceleration>) {
          s.position = origin + m.initial_velocity * t + 0.5 * m.acceleration * t * t;
          s.velocity = m.initial_velocity + m.acceleration * t;
          s.acceleration = m.acceleration;
        } else {
          const double psi0 = initial_heading;
          const double psi = psi0 + m.yaw_rate * t;
          const double r = m.speed / m.yaw_rate;
          s.position = origin + r * Eigen::Vector2d(std::sin(psi) - std::sin(psi0),
                                                    std::cos(psi0) - std::cos(psi));
          s.velocity = m.speed * Eigen::Vector2d(std::cos(psi), std::sin(psi));
          s.acceleration =
              m.speed * m.yaw_rate * Eigen::Vector2d(-std::sin(psi), std::cos(psi));
        }
      },
      motion);
  return s;
}

Scenario generate(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);

  std::vector<ObjectPlan> plans;
  if (!config.objects.empty()) {
    for (const ObjectSpec& spec : config.objects) plans.push_back(plan_from_spec(spec, config, rng));
  } else {
    for (int i = 0; i < config.num_objects; ++i) plans.push_back(sample_object(config, rng));
  }

  Scenario scenario;
  scenario.frames = config.frames;
  scenario.dt = config.dt;
  scenario.detections.resize(static_cast<std::size_t>(config.frames));

  for (std::size_t id = 0; id < plans.size(); ++id) {
    const ObjectPlan& plan = plans[id];
    GtTrack track;
    track.object_id = static_cast<int>(id);
    track.cls = plan.cls;
    for (int f = 0; f < config.frames; ++f) {
      const StateVector state = evaluate_motion(plan.motion, plan.origin, plan.heading, f * config.dt);
      double heading = heading_of(state, plan.heading);
      if (std::holds_alternative<Turn>(plan.motion)) {
        heading = plan.heading + std::get<Turn>(plan.motion).yaw_rate * f * config.dt;
      }
      const Eigen::Vector3d center(state.position.x(), state.position.y(), nominal_z(plan.cls));
      track.frames.push_back({f, Box7(center, plan.size, heading), state});
    }
    scenario.gt_tracks.push_back(std::move(track));
  }

  const NoiseModel& noise = config.noise;
  const double e = config.area_half_extent;
  const std::vector<double> zero_motion(2, 0.0);
  // Last emitted noisy center per object, for the motion feature.
  std::vector<std::optional<std::pair<int, Eigen::Vector2d>>> last_seen(plans.size());

  for (int f = 0; f < config.frames; ++f) {
    auto& row = scenario.detections[static_cast<std::size_t>(f)];
    for (std::size_t id = 0; id < plans.size(); ++id) {
      const GtFrame& gt = scenario.gt_tracks[id].frames[static_cast<std::size_t>(f)];
      if (noise.miss_prob > 0.0 && uniform(rng, 0.0, 1.0) < noise.miss_prob) continue;

      Eigen::Vector3d center = gt.box.center();
      center.x() += gauss(rng, noise.center_sigma);
      center.y() += gauss(rng, noise.center_sigma);
      center.z() += gauss(rng, noise.center_sigma);
      Eigen::Vector3d size = gt.box.size();
      for (int k = 0; k < 3; ++k) size[k] = std::max(0.05, size[k] + gauss(rng, noise.size_sigma));
      const double heading = gt.box.heading() + gauss(rng, noise.heading_sigma);

      Detection det;
      det.box = Box7(center, size, heading);
      det.cls = plans[id].cls;
      det.appearance = plans[id].signature;
      for (double& a : det.appearance) a += gauss(rng, noise.appearance_sigma);
      const Eigen::Vector2d xy = center.head<2>();
      if (last_seen[id]) {
        const double span = (f - last_seen[id]->first) * config.dt;
        const Eigen::Vector2d v = (xy - last_seen[id]->second) / span;
        det.motion = {v.x(), v.y()};
      } else {
        det.motion = zero_motion;
      }
      last_seen[id] = std::make_pair(f, xy);
      det.confidence = std::clamp(1.0 - std::abs(gauss(rng, noise.confidence_noise)), 0.0, 1.0);
      det.frame_index = f;
      row.push_back({std::move(det), static_cast<int>(id)});
    }

    const int fp_count =
        noise.fp_rate > 0.0 ? std::poisson_distribution<int>(noise.fp_rate)(rng) : 0;
    for (int i = 0; i < fp_count; ++i) {
      Detection det;
      const Eigen::Vector3d center(uniform(rng, -1.5 * e, 1.5 * e), uniform(rng, -1.5 * e, 1.5 * e),
                                   nominal_z(config.cls));
      const Eigen::Vector3d size = nominal_size(config.cls).cwiseProduct(Eigen::Vector3d(
          uniform(rng, 0.8, 1.2), uniform(rng, 0.8, 1.2), uniform(rng, 0.8, 1.2)));
      det.box = Box7(center, size, uniform(rng, -std::numbers::pi, std::numbers::pi));
      det.cls = config.cls;
      det.appearance = random_signature(rng, config.appearance_dim);
      det.motion = zero_motion;
      det.confidence = uniform(rng, 0.05, 0.5);
      det.frame_index = f;
      row.push_back({std::move(det), kFalsePositive});
    }

    std::shuffle(row.begin(), row.end(), rng);
    for (std::size_t i = 0; i < row.size(); ++i) row[i].detection.detection_id = static_cast<int>(i);
  }
  return scenario;
}

std::string_view to_string(SpeedBucket bucket) {
  switch (bucket) {
    case SpeedBucket::kStatic:
      return "static";
    case SpeedBucket::kSlow:
      return "slow";
    case SpeedBucket::kFast:
      return "fast";
  }
  return "unknown";
}

SpeedBucket speed_class(double gt_speed, ClassId cls, const SpeedThresholds& thresholds) {
  if (gt_speed < thresholds.static_below) return SpeedBucket::kStatic;
  const double fast = cls == ClassId::kVehicle ? thresholds.vehicle_fast_above
                                               : thresholds.pedestrian_fast_above;
  if (gt_speed > fast) return SpeedBucket::kFast;
  return SpeedBucket::kSlow;
}

}  // namespace stt::sim
