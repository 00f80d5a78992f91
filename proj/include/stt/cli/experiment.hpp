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

#include "stt/cli/config.hpp"
#include "stt/metrics/report.hpp"
#include "stt/model/network.hpp"
#include "stt/model/trainer.hpp"
#include "stt/sim/simulator.hpp"
#include "stt/tracker/runtime.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stt::cli {

/// Independent per-index seed stream (splitmix64 of base and index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Runs `task(i)` for i in [0, count) on up to `workers` threads. The first
/// exception (lowest index) is rethrown after all tasks finish.
void parallel_for(int count, int workers, const std::function<void(int)>& task);

/// `count` scenarios; scenario i uses derive_seed(seed, i).
std::vector<sim::Scenario> generate_scenarios(const sim::SimConfig& config, std::uint64_t seed,
                                              int count, int workers = 1);

/// Training examples from all scenarios, in scenario order.
std::vector<model::TrainingExample> examples_from(const std::vector<sim::Scenario>& scenarios,
                                                  const model::SttConfig& config, std::uint64_t seed,
                                                  bool random_history_length = true,
                                                  int frame_stride = 1);

/// Builds and trains a model. The log is appended to `log` when given.
model::SttModel train_stt(const RunConfig& config, const std::vector<sim::Scenario>& scenarios,
                          std::uint64_t seed, std::vector<model::TrainLogRow>* log = nullptr);

/// Tracks one scenario with the configured backend; `model` is required for stt.
tracker::TrackerOutput track_scenario(const RunConfig& config, const sim::Scenario& scenario,
                                      const model::SttModel* model);

std::vector<tracker::TrackerOutput> track_all(const RunConfig& config,
                                              const std::vector<sim::Scenario>& scenarios,
                                              const model::SttModel* model, int workers = 1);

std::vector<std::vector<metrics::Prediction>> predictions_of(const tracker::TrackerOutput& output);

metrics::MetricReport evaluate(const metrics::EvalConfig& config,
                               const std::vector<sim::Scenario>& scenarios,
                               const std::vector<tracker::TrackerOutput>& outputs);

struct AblationRow {
  std::string group;
  std::string name;
  metrics::MetricReport report;
  std::optional<double> association_accuracy;
};

enum class Suite : std::uint8_t { kJoint, kTrackLength, kNoise, kAll };
Suite suite_from_string(std::string_view name);

/// Trains and evaluates the ablation rows of `suite` on fresh train/test
/// scenarios drawn from `config`. Progress lines go to `log` when given.
std::vector<AblationRow> run_experiment(const RunConfig& config, Suite suite, int workers,
                                        std::ostream* log = nullptr);

/// Comparison table: one row per entry with S-MOTA deltas against the first
/// row of each group.
void write_ablation_table(std::ostream& out, const std::vector<AblationRow>& rows, ClassId cls);
void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows, ClassId cls);

}  // namespace stt::cli
