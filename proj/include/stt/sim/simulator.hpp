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

#pragma once

#include "stt/core/types.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace stt::sim {

struct StaticMotion {};
struct ConstantVelocity {
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};
struct ConstantAcceleration {
  Eigen::Vector2d initial_velocity = Eigen::Vector2d::Zero();
  Eigen::Vector2d acceleration = Eigen::Vector2d::Zero();
};
struct Turn {
  double speed = 0.0;
  double yaw_rate = 0.0;  // rad/s, non-zero
};

using MotionProfile = std::variant<StaticMotion, ConstantVelocity, ConstantAcceleration, Turn>;

struct NoiseModel {
  double center_sigma = 0.1;
  double heading_sigma = 0.02;
  double size_sigma = 0.05;
  double appearance_sigma = 0.1;
  double fp_rate = 1.0;  // expected false positives per frame
  double miss_prob = 0.05;
  double confidence_noise = 0.1;

  void validate() const;
};

/// Explicitly placed object; used in place of random sampling when given.
struct ObjectSpec {
  ClassId cls = ClassId::kVehicle;
  Eigen::Vector2d initial_position = Eigen::Vector2d::Zero();
  double initial_heading = 0.0;
  MotionProfile motion = StaticMotion{};
  std::optional<Eigen::Vector3d> size;
  std::optional<std::vector<double>> signature;
};

/// Relative weights of the motion profiles drawn for random objects.
struct MotionMix {
  double static_weight = 0.3;
  double constant_velocity_weight = 0.3;
  double constant_acceleration_weight = 0.2;
  double turn_weight = 0.2;
};

struct SimConfig {
  int frames = 200;
  double dt = 0.1;
  int num_objects = 20;
  ClassId cls = ClassId::kVehicle;
  double area_half_extent = 40.0;  // meters, initial positions are uniform in the square
  MotionMix mix;
  double min_speed = 1.0;
  double max_speed = 15.0;
  double max_accel = 2.0;
  double max_yaw_rate = 0.3;
  int appearance_dim = 8;
  NoiseModel noise;
  std::vector<ObjectSpec> objects;

  /// Class-appropriate speed and extent defaults.
  static SimConfig defaults_for(ClassId cls);
  void validate() const;
};

struct GtFrame {
  int frame = 0;
  Box7 box;
  StateVector state;
};

struct GtTrack {
  int object_id = 0;
  ClassId cls = ClassId::kVehicle;
  std::vector<GtFrame> frames;  // one entry per scenario frame, in order
};

inline constexpr int kFalsePositive = -1;

struct ScenarioDetection {
  Detection detection;
  int source_object = kFalsePositive;  // provenance, hidden from trackers
};

struct Scenario {
  int frames = 0;
  double dt = 0.1;
  std::vector<GtTrack> gt_tracks;
  std::vector<std::vector<ScenarioDetection>> detections;  // indexed by frame

  /// Detections of one frame without provenance.
  std::vector<Detection> frame_detections(int frame) const;
};

/// Analytic state of a motion profile `t` seconds after start.
StateVector evaluate_motion(const MotionProfile& motion, const Eigen::Vector2d& origin,
                            double initial_heading, double t);

/// Builds a scenario. Deterministic for a fixed (config, seed).
/// Throws std::invalid_argument on invalid config.
Scenario generate(const SimConfig& config, std::uint64_t seed);

enum class SpeedBucket : std::uint8_t { kStatic, kSlow, kFast };

std::string_view to_string(SpeedBucket bucket);

struct SpeedThresholds {
  double static_below = 0.2;
  double vehicle_fast_above = 3.0;
  double pedestrian_fast_above = 1.0;
};

SpeedBucket speed_class(double gt_speed, ClassId cls, const SpeedThresholds& thresholds = {});

}  // namespace stt::sim
