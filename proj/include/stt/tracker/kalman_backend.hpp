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
#include "stt/tracker/runtime.hpp"

#include <map>

namespace stt::tracker {

/// Constant-acceleration Kalman filter per track, IoU association cost.
class KalmanBackend final : public Backend {
 public:
  KalmanBackend(kalman::KfParams params, double dt);

  assign::CostMatrix costs(std::span<const Track> tracks, int frame,
                           std::span<const Detection> detections) override;
  StateVector on_create(int track_id, const Detection& detection) override;
  StateVector on_match(const Track& track, const Detection& detection) override;
  void on_delete(int track_id) override;

  const kalman::KfState& filter(int track_id) const { return filters_.at(track_id).state; }

 private:
  struct Entry {
    kalman::KfState state;
    int frame = 0;
    kalman::KfState predicted;
    int predicted_frame = -1;
  };
  const kalman::KfState& predicted(Entry& entry, int frame);

  kalman::KfParams params_;
  double dt_;
  std::map<int, Entry> filters_;
};

}  // namespace stt::tracker
