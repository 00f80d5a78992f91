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

#include "stt/autodiff/adamw.hpp"
#include "stt/model/dataset.hpp"
#include "stt/model/network.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace stt::model {

struct TrainConfig {
  int steps = 30000;
  int batch_size = 64;
  // Every n-th frame of each object becomes a training example.
  int example_stride = 5;
  ad::AdamWConfig optimizer{.learning_rate = 2e-3, .warmup_steps = 100};

  void validate() const;
};

/// Batch-mean loss terms at one optimizer step (before its update).
struct TrainLogRow {
  int step = 0;
  double association = 0.0;
  double state_current = 0.0;
  double state_previous = 0.0;
  double total = 0.0;
};

/// Raised when a batch loss becomes non-finite.
class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(int step);
  int step() const { return step_; }

 private:
  int step_;
};

/// Trains `model` in place. Batches are drawn uniformly with replacement from
/// `examples` using `seed`. When `optimizer.total_steps` is 0 the decay phase
/// spans `steps`. `on_step` (optional) sees every log row as it is produced.
std::vector<TrainLogRow> train(SttModel& model, std::span<const TrainingExample> examples,
                               const TrainConfig& config, std::uint64_t seed,
                               const std::function<void(const TrainLogRow&)>& on_step = {});

void write_train_log_csv(std::ostream& out, std::span<const TrainLogRow> rows);

/// Mean loss terms over `examples` without recording a graph.
TrainLogRow mean_loss(const SttModel& model, std::span<const TrainingExample> examples);

struct AssociationAccuracy {
  std::size_t examples = 0;  // examples with a positive label
  std::size_t top1 = 0;      // of those, positive slot received the highest score
  double rate() const { return examples == 0 ? 0.0 : static_cast<double>(top1) / static_cast<double>(examples); }
};

AssociationAccuracy evaluate_association(const SttModel& model,
                                         std::span<const TrainingExample> examples);

}  // namespace stt::model
