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

#include "stt/autodiff/adamw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stt::ad {

void AdamWConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("adamw.learning_rate must be > 0");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("adamw.weight_decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("adamw betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("adamw.epsilon must be > 0");
  if (warmup_steps < 0 || total_steps < 0) {
    throw std::invalid_argument("adamw step counts must be >= 0");
  }
  if (!(final_lr_multiplier >= 0.0)) {
    throw std::invalid_argument("adamw.final_lr_multiplier must be >= 0");
  }
}

double AdamWConfig::learning_rate_at(int step) const {
  if (warmup_steps > 0 && step <= warmup_steps) {
    return learning_rate * static_cast<double>(step) / warmup_steps;
  }
  if (total_steps <= warmup_steps) return learning_rate;
  const double progress =
      std::clamp(static_cast<double>(step - warmup_steps) / (total_steps - warmup_steps), 0.0, 1.0);
  return learning_rate * (1.0 - (1.0 - final_lr_multiplier) * progress);
}

AdamW::AdamW(std::vector<Var> params, AdamWConfig config)
    : params_(std::move(params)), config_(config) {
  config_.validate();
  for (const Var& p : params_) {
    first_moment_.emplace_back(p.rows(), p.cols());
    second_moment_.emplace_back(p.rows(), p.cols());
  }
}

void AdamW::step(int step) {
  if (step < 1) throw std::invalid_argument("adamw step index must be >= 1");
  const double lr = config_.learning_rate_at(step);
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, step);
  const double correction2 = 1.0 - std::pow(b2, step);
  const double decay = 1.0 - lr * config_.weight_decay;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Var& p = params_[i];
    Tensor& value = p.mutable_value();
    const Tensor& grad = p.mutable_grad();
    Tensor& m = first_moment_[i];
    Tensor& v = second_moment_[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = grad[j];
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      value[j] = value[j] * decay - lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

void AdamW::zero_grad() {
  for (Var& p : params_) p.zero_grad();
}

}  // namespace stt::ad
