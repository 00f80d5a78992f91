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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace stt::testing {

// Relative error of one parameter tensor: ||analytic - numeric|| / max(||analytic||, ||numeric||).
// Tensors whose gradients are both below `floor` in norm count as exact.
struct GradCheckResult {
  double worst = 0.0;
  std::size_t worst_param = 0;
};

inline GradCheckResult gradcheck(std::vector<ad::Var> params,
                                 const std::function<ad::Var()>& loss, double step = 1e-6,
                                 double floor = 1e-10) {
  for (ad::Var& p : params) p.zero_grad();
  loss().backward();
  std::vector<ad::Tensor> analytic;
  for (const ad::Var& p : params) {
    analytic.push_back(p.grad().size() == 0 ? ad::Tensor(p.rows(), p.cols()) : p.grad());
  }

  GradCheckResult result;
  ad::NoGradGuard no_grad;
  for (std::size_t i = 0; i < params.size(); ++i) {
    ad::Tensor& value = params[i].mutable_value();
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double saved = value[j];
      value[j] = saved + step;
      const double up = loss().item();
      value[j] = saved - step;
      const double down = loss().item();
      value[j] = saved;
      const double numeric = (up - down) / (2 * step);
      const double a = analytic[i][j];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
    }
    const double scale = std::max(std::sqrt(a2), std::sqrt(n2));
    const double rel = scale < floor ? 0.0 : std::sqrt(diff2) / scale;
    if (rel > result.worst) {
      result.worst = rel;
      result.worst_param = i;
    }
  }
  return result;
}

}  // namespace stt::testing
