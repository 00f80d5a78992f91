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
#include "stt/tracker/runtime.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace stt::cli {

inline constexpr int kSchemaVersion = 1;

// Every JSONL file starts with a header object:
//   {"schema_version": 1, "kind": "...", "version": "...", "config": {...}, ...}
// followed by one record per line.

/// Header for a file of the given kind; `extra` keys are merged in.
nlohmann::json make_header(std::string_view kind, const nlohmann::json& config,
                           const nlohmann::json& extra = nlohmann::json::object());

/// Writes `<dir>/<name>.gt.jsonl` and `<dir>/<name>.det.jsonl`.
void write_scenario(const std::filesystem::path& dir, const std::string& name,
                    const sim::Scenario& scenario, const nlohmann::json& config);
/// Reads the pair written by write_scenario. Provenance is restored.
sim::Scenario read_scenario(const std::filesystem::path& dir, const std::string& name);
/// Scenario names in `dir` (files ending in .det.jsonl), sorted.
std::vector<std::string> list_scenarios(const std::filesystem::path& dir);

void write_tracks(const std::filesystem::path& path, const tracker::TrackerOutput& output,
                  const nlohmann::json& config);
/// Per-frame predictions of a tracks file; `frames` is taken from its header.
std::vector<std::vector<metrics::Prediction>> read_tracks(const std::filesystem::path& path);

nlohmann::json detection_to_json(const Detection& detection, int provenance);
Detection detection_from_json(const nlohmann::json& j, int* provenance = nullptr);

/// Writes text atomically enough for our purposes: to a temp file, then renamed.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stt::cli
