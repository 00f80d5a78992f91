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

#include "stt/metrics/clear_mot.hpp"
#include "stt/sim/simulator.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace stt::metrics {

struct EvalConfig {
  MatchingPolicy mota = MatchingPolicy::mota();
  MatchingPolicy s_mota = MatchingPolicy::s_mota();
  // |MOTP_s| thresholds; default to the stateful gate thresholds.
  ClassThresholds vehicle_alpha{0.0, 1.0, 1.0};
  ClassThresholds pedestrian_alpha{0.0, 0.5, 0.5};
  sim::SpeedThresholds speed;

  void validate() const;
};

struct ClassReport {
  ClassId cls = ClassId::kVehicle;
  ClearCounts mota;
  ClearCounts s_mota;
  ErrorStats position;  // center L2 over MOTA matches
  StateErrorStats velocity;
  StateErrorStats acceleration;

  ClassReport& operator+=(const ClassReport& other);
  bool operator==(const ClassReport&) const = default;
};

struct MetricReport {
  bool persistence = true;
  std::vector<ClassReport> classes;  // classes with ground truth or predictions

  const ClassReport* find(ClassId cls) const;
  /// Sums raw counts class by class.
  MetricReport& operator+=(const MetricReport& other);

  nlohmann::json to_json() const;
  static MetricReport from_json(const nlohmann::json& j);
  void write_csv(std::ostream& out) const;
  void write_table(std::ostream& out) const;
};

/// Accumulates one or more sequences into a MetricReport.
class Evaluator {
 public:
  explicit Evaluator(EvalConfig config);

  /// Per-frame predictions and labels of one sequence (equal frame counts).
  void add_sequence(const std::vector<std::vector<Prediction>>& predictions,
                    const std::vector<std::vector<Label>>& labels);
  MetricReport report() const;

 private:
  EvalConfig config_;
  std::array<ClassReport, 2> classes_{};
  std::array<bool, 2> seen_{};
};

/// Per-frame ground-truth labels of a scenario.
std::vector<std::vector<Label>> labels_of(const sim::Scenario& scenario);

}  // namespace stt::metrics
