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
#include "stt/model/config.hpp"
#include "stt/sim/simulator.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace stt::model {

/// One supervised track/frame pair.
struct TrainingExample {
  std::vector<Detection> history;  // oldest first, 1..T entries, all of one object
  std::vector<Detection> context;  // candidates at the target frame
  std::vector<int> labels;         // 1 for the object's own detection, else 0
  StateVector target_current;      // ground truth at the context frame
  StateVector target_previous;     // ground truth at the newest history frame
  int frame = 0;                   // context frame

  /// Throws std::invalid_argument unless at most one label is set and shapes agree.
  void validate(const SttConfig& config) const;
};

/// Indices of the detections whose centers lie strictly within `radius` of
/// the predicted position, nearest first (ties by index), at most `k`.
std::vector<std::size_t> select_context(const StateVector& predicted,
                                        std::span<const Detection> detections, double radius,
                                        int k);

/// Examples from every ground-truth object and frame of a scenario. Context is
/// centered on the ground-truth position at the target frame. When
/// `random_history_length` is set, histories are truncated to a uniformly drawn
/// length so that short tracks are represented. Only every `frame_stride`-th
/// frame of each object becomes an example (offset by object index).
std::vector<TrainingExample> build_examples(const sim::Scenario& scenario, const SttConfig& config,
                                            std::uint64_t seed, bool random_history_length = true,
                                            int frame_stride = 1);

}  // namespace stt::model
