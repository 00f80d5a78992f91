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

#include "stt/model/network.hpp"
#include "stt/tracker/runtime.hpp"

#include <map>

namespace stt::tracker {

/// Learned association and state estimation. Each track's candidates are
/// the context detections around its extrapolated state; every other pair is
/// infeasible, as is any pair scoring below the creation threshold.
class SttBackend final : public Backend {
 public:
  /// `model` must outlive the backend and is only read.
  SttBackend(const model::SttModel& model, double creation_score_threshold);

  assign::CostMatrix costs(std::span<const Track> tracks, int frame,
                           std::span<const Detection> detections) override;
  StateVector on_create(int track_id, const Detection& detection) override;
  StateVector on_match(const Track& track, const Detection& detection) override;
  void on_delete(int track_id) override;

  /// Association scores of the last costs() call, aligned to its matrix.
  const std::vector<std::vector<double>>& last_scores() const { return scores_; }

 private:
  const model::SttModel& model_;
  double threshold_;
  // Interaction-head state per track from the latest costs() call.
  std::map<int, StateVector> interaction_state_;
  std::vector<std::vector<double>> scores_;
};

}  // namespace stt::tracker
