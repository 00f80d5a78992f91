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

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace stt::kalman {
namespace {

using Matrix26 = Eigen::Matrix<double, 2, 6>;

Matrix26 measurement_matrix() {
  Matrix26 h = Matrix26::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

void require_positive_definite(const Matrix6& p, const char* where) {
  Eigen::LLT<Matrix6> llt(p);
  if (llt.info() != Eigen::Success || !p.allFinite()) {
    std::ostringstream msg;
    msg << where << ": covariance lost positive definiteness\n" << p;
    throw NumericalFailure(msg.str());
  }
}

}  // namespace

void KfParams::validate() const {
  if (!(process_noise_accel_sigma > 0.0) || !(meas_noise_sigma > 0.0) ||
      !(initial_velocity_sigma > 0.0) || !(initial_accel_sigma > 0.0)) {
    throw std::invalid_argument("kalman parameters must all be positive");
  }
  if (!(iou_gate >= 0.0 && iou_gate < 1.0)) {
    throw std::invalid_argument("kalman.iou_gate must be in [0, 1)");
  }
}

StateVector KfState::to_state() const {
  StateVector s;
  s.position = mean.segment<2>(0);
  s.velocity = mean.segment<2>(2);
  s.acceleration = mean.segment<2>(4);
  return s;
}

KfState initialize(const Eigen::Vector2d& position, const KfParams& params) {
  KfState s;
  s.mean.setZero();
  s.mean.segment<2>(0) = position;
  Vector6 var;
  const double pv = params.meas_noise_sigma * params.meas_noise_sigma;
  const double vv = params.initial_velocity_sigma * params.initial_velocity_sigma;
  const double av = params.initial_accel_sigma * params.initial_accel_sigma;
  var << pv, pv, vv, vv, av, av;
  s.covariance = var.asDiagonal();
  return s;
}

Matrix6 transition(double dt) {
  Matrix6 f = Matrix6::Identity();
  for (int axis = 0; axis < 2; ++axis) {
    f(axis, 2 + axis) = dt;
    f(axis, 4 + axis) = 0.5 * dt * dt;
    f(2 + axis, 4 + axis) = dt;
  }
  return f;
}

Matrix6 process_noise(double dt, const KfParams& params) {
  const double q = params.process_noise_accel_sigma * params.process_noise_accel_sigma;
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  const double dt4 = dt3 * dt;
  const double dt5 = dt4 * dt;
  // Per-axis block over (position, velocity, acceleration).
  Eigen::Matrix3d block;
  block << dt5 / 20.0, dt4 / 8.0, dt3 / 6.0,
           dt4 / 8.0,  dt3 / 3.0, dt2 / 2.0,
           dt3 / 6.0,  dt2 / 2.0, dt;
  block *= q;
  Matrix6 out = Matrix6::Zero();
  for (int axis = 0; axis < 2; ++axis) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out(2 * i + axis, 2 * j + axis) = block(i, j);
    }
  }
  return out;
}

KfState predict(const KfState& state, double dt, const KfParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("kalman predict: dt must be > 0");
  const Matrix6 f = transition(dt);
  KfState out;
  out.mean = f * state.mean;
  out.covariance = f * state.covariance * f.transpose() + process_noise(dt, params);
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

KfState update(const KfState& state, const Eigen::Vector2d& z, const KfParams& params) {
  if (!z.allFinite()) throw std::invalid_argument("kalman update: non-finite measurement");
  const Matrix26 h = measurement_matrix();
  const Eigen::Matrix2d r =
      Eigen::Matrix2d::Identity() * params.meas_noise_sigma * params.meas_noise_sigma;
  const Eigen::Matrix2d s = h * state.covariance * h.transpose() + r;
  const Eigen::Matrix<double, 6, 2> k =
      state.covariance * h.transpose() * s.ldlt().solve(Eigen::Matrix2d::Identity());
  KfState out;
  out.mean = state.mean + k * (z - h * state.mean);
  const Matrix6 i_kh = Matrix6::Identity() - k * h;
  out.covariance = i_kh * state.covariance * i_kh.transpose() + k * r * k.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  require_positive_definite(out.covariance, "kalman update");
  return out;
}

std::optional<double> association_cost(const KfState& predicted, const Box7& last_box,
                                       const Detection& detection, const KfParams& params) {
  Eigen::Vector3d center = last_box.center();
  center.head<2>() = predicted.mean.segment<2>(0);
  const double iou = bev_iou(last_box.with_center(center), detection.box);
  if (iou <= params.iou_gate) return std::nullopt;
  return 1.0 - iou;
}

}  // namespace stt::kalman
