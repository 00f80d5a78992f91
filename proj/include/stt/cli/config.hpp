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

#include "stt/kalman/kalman_filter.hpp"
#include "stt/metrics/report.hpp"
#include "stt/model/config.hpp"
#include "stt/model/trainer.hpp"
#include "stt/sim/simulator.hpp"
#include "stt/tracker/runtime.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace stt::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kMissingFile = 3,
  kSchema = 4,
  kMismatch = 5,
  kNumerical = 6,
};

/// Error carrying the exit code it maps to.
class CliError : public std::runtime_error {
 public:
  CliError(ExitCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

enum class BackendKind : std::uint8_t { kKalman, kStt };

std::string_view to_string(BackendKind kind);
BackendKind backend_from_string(std::string_view name);

/// Everything a command needs. Serialized as JSON; unknown keys are rejected.
struct RunConfig {
  ClassId cls = ClassId::kVehicle;
  BackendKind backend = BackendKind::kKalman;
  std::uint64_t seed = 0;
  sim::SimConfig sim;
  model::SttConfig stt;
  model::TrainConfig train;
  // Scenarios generated for training by the experiment harness.
  int train_scenarios = 64;
  int test_scenarios = 4;
  kalman::KfParams kalman;
  tracker::LifecycleConfig lifecycle;
  metrics::EvalConfig eval;

  /// Defaults for one class, including class-appropriate simulator settings.
  static RunConfig defaults_for(ClassId cls);
  /// Validates every section and cross-section consistency.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Throws CliError(kSchema) on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const nlohmann::json& j);
/// Throws CliError(kMissingFile) if the file does not exist.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const model::SttConfig& config);
model::SttConfig stt_config_from_json(const nlohmann::json& j);

/// Version string embedded in every output file.
std::string version_string();

}  // namespace stt::cli
