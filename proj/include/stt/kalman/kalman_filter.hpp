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

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>

namespace stt::kalman {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Raised when the covariance loses positive definiteness.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KfParams {
  double process_noise_accel_sigma = 0.25;  // white-jerk spectral density is sigma^2
  double meas_noise_sigma = 0.4;
  double initial_velocity_sigma = 10.0;
  double initial_accel_sigma = 3.0;
  double iou_gate = 0.1;

  void validate() const;
};

/// Mean layout: x, y, vx, vy, ax, ay.
struct KfState {
  Vector6 mean = Vector6::Zero();
  Matrix6 covariance = Matrix6::Identity();

  StateVector to_state() const;
};

/// Filter state for a freshly observed position with zero velocity/acceleration.
KfState initialize(const Eigen::Vector2d& position, const KfParams& params);

Matrix6 transition(double dt);
/// White-noise-jerk process covariance for one step of length dt.
Matrix6 process_noise(double dt, const KfParams& params);

/// Constant-acceleration prediction. Requires dt > 0.
KfState predict(const KfState& state, double dt, const KfParams& params);

/// Position measurement update in Joseph form. Throws NumericalFailure if the
/// resulting covariance is not positive definite.
KfState update(const KfState& state, const Eigen::Vector2d& z, const KfParams& params);

/// 1 - BEV IoU between the predicted footprint (last box size/heading at the
/// predicted position) and the detection box; nullopt when IoU <= gate.
std::optional<double> association_cost(const KfState& predicted, const Box7& last_box,
                                       const Detection& detection, const KfParams& params);

}  // namespace stt::kalman
