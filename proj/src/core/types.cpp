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

#include "stt/core/types.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace stt {

std::string_view to_string(ClassId cls) {
  switch (cls) {
    case ClassId::kVehicle:
      return "vehicle";
    case ClassId::kPedestrian:
      return "pedestrian";
  }
  return "unknown";
}

ClassId class_from_string(std::string_view name) {
  if (name == "vehicle") return ClassId::kVehicle;
  if (name == "pedestrian") return ClassId::kPedestrian;
  throw std::invalid_argument("unknown class '" + std::string(name) + "'");
}

double normalize_heading(double radians) {
  double wrapped = std::remainder(radians, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

bool StateVector::is_finite() const {
  return position.allFinite() && velocity.allFinite() && acceleration.allFinite();
}

std::array<double, 6> StateVector::to_array() const {
  return {position.x(),     position.y(),     velocity.x(),
          velocity.y(),     acceleration.x(), acceleration.y()};
}

StateVector StateVector::from_array(const std::array<double, 6>& values) {
  StateVector s;
  s.position = {values[0], values[1]};
  s.velocity = {values[2], values[3]};
  s.acceleration = {values[4], values[5]};
  return s;
}

Box7::Box7(const Eigen::Vector3d& center, const Eigen::Vector3d& size, double heading)
    : center_(center), size_(size), heading_(normalize_heading(heading)) {
  if (!center.allFinite() || !size.allFinite() || !std::isfinite(heading)) {
    throw std::invalid_argument("Box7: non-finite component");
  }
  if ((size.array() <= 0.0).any()) {
    std::ostringstream msg;
    msg << "Box7: sizes must be positive, got (" << size.x() << ", " << size.y()
        << ", " << size.z() << ")";
    throw std::invalid_argument(msg.str());
  }
}

Box7 Box7::with_center(const Eigen::Vector3d& center) const {
  return Box7(center, size_, heading_);
}

void Detection::validate(std::size_t appearance_dim, std::size_t motion_dim) const {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw std::invalid_argument("detection confidence outside [0, 1]: " +
                                std::to_string(confidence));
  }
  if (appearance.size() != appearance_dim || motion.size() != motion_dim) {
    std::ostringstream msg;
    msg << "detection feature widths (" << appearance.size() << ", " << motion.size()
        << ") do not match configured (" << appearance_dim << ", " << motion_dim << ")";
    throw std::invalid_argument(msg.str());
  }
}

void Track::append(int frame, Detection detection, const StateVector& state,
                   std::size_t max_length) {
  if (!history.empty() && frame <= history.back().first) {
    throw std::logic_error("track history frames must be strictly increasing");
  }
  history.emplace_back(frame, std::move(detection));
  states.emplace_back(frame, state);
  while (history.size() > max_length) history.erase(history.begin());
  while (states.size() > max_length) states.erase(states.begin());
}

}  // namespace stt
