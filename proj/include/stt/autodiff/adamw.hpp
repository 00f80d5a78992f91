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

#include "stt/autodiff/ops.hpp"

#include <vector>

namespace stt::ad {

struct AdamWConfig {
  double learning_rate = 1e-4;
  double weight_decay = 0.03;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int warmup_steps = 0;
  int total_steps = 0;              // 0 disables the decay phase
  double final_lr_multiplier = 0.5;  // linear decay target, as a fraction of learning_rate

  void validate() const;
  /// Learning rate at 1-based `step`: linear warmup, then linear decay.
  double learning_rate_at(int step) const;
};

/// Decoupled-weight-decay Adam over a fixed list of parameter leaves.
class AdamW {
 public:
  AdamW(std::vector<Var> params, AdamWConfig config);

  /// Applies one update using the gradients currently stored on the params.
  /// `step` is 1-based.
  void step(int step);
  void zero_grad();

  const AdamWConfig& config() const { return config_; }

 private:
  std::vector<Var> params_;
  AdamWConfig config_;
  std::vector<Tensor> first_moment_;
  std::vector<Tensor> second_moment_;
};

}  // namespace stt::ad
