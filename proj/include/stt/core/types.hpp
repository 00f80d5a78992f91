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

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stt {

/// Evaluation class of a detection or ground-truth object.
enum class ClassId : std::uint8_t { kVehicle, kPedestrian };

std::string_view to_string(ClassId cls);
/// Parses "vehicle" / "pedestrian". Throws std::invalid_argument otherwise.
ClassId class_from_string(std::string_view name);

/// Wraps an angle into (-pi, pi].
double normalize_heading(double radians);

/// Kinematic state in the ground plane: position, velocity, acceleration.
struct StateVector {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  Eigen::Vector2d acceleration = Eigen::Vector2d::Zero();

  bool is_finite() const;
  /// Layout: px, py, vx, vy, ax, ay.
  std::array<double, 6> to_array() const;
  static StateVector from_array(const std::array<double, 6>& values);

  bool operator==(const StateVector& other) const = default;
};

/// 7-DoF box: center (x, y, z), size (width, length, height), heading.
/// Sizes are strictly positive and heading lives in (-pi, pi].
class Box7 {
 public:
  Box7() = default;
  /// Throws std::invalid_argument on non-positive or non-finite inputs.
  Box7(const Eigen::Vector3d& center, const Eigen::Vector3d& size, double heading);

  const Eigen::Vector3d& center() const { return center_; }
  const Eigen::Vector3d& size() const { return size_; }
  double heading() const { return heading_; }
  double width() const { return size_.x(); }
  double length() const { return size_.y(); }
  double height() const { return size_.z(); }

  Box7 with_center(const Eigen::Vector3d& center) const;

  bool operator==(const Box7& other) const = default;

 private:
  Eigen::Vector3d center_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d size_ = Eigen::Vector3d::Ones();
  double heading_ = 0.0;
};

struct Detection {
  Box7 box;
  ClassId cls = ClassId::kVehicle;
  std::vector<double> appearance;
  // Noisy velocity observation from the detector, m/s.
  std::vector<double> motion;
  double confidence = 1.0;
  int frame_index = 0;
  int detection_id = 0;

  /// Throws std::invalid_argument when confidence or feature widths are off.
  void validate(std::size_t appearance_dim, std::size_t motion_dim) const;

  bool operator==(const Detection& other) const = default;
};

enum class TrackStatus : std::uint8_t { kActive, kDead };

struct Track {
  int track_id = 0;
  ClassId cls = ClassId::kVehicle;
  std::vector<std::pair<int, Detection>> history;
  std::vector<std::pair<int, StateVector>> states;
  std::vector<double> query;
  int misses = 0;
  TrackStatus status = TrackStatus::kActive;

  int last_frame() const { return history.empty() ? -1 : history.back().first; }
  const StateVector& latest_state() const { return states.back().second; }

  /// Appends an observation and its state estimate, dropping the oldest
  /// entries so that at most `max_length` remain.
  void append(int frame, Detection detection, const StateVector& state,
              std::size_t max_length);
};

}  // namespace stt
