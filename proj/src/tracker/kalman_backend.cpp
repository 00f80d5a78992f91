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

#include "stt/tracker/kalman_backend.hpp"

#include <stdexcept>

namespace stt::tracker {

KalmanBackend::KalmanBackend(kalman::KfParams params, double dt) : params_(params), dt_(dt) {
  params_.validate();
  if (!(dt_ > 0.0)) throw std::invalid_argument("kalman backend: dt must be > 0");
}

const kalman::KfState& KalmanBackend::predicted(Entry& entry, int frame) {
  if (entry.predicted_frame != frame) {
    entry.predicted = kalman::predict(entry.state, (frame - entry.frame) * dt_, params_);
    entry.predicted_frame = frame;
  }
  return entry.predicted;
}

assign::CostMatrix KalmanBackend::costs(std::span<const Track> tracks, int frame,
                                        std::span<const Detection> detections) {
  assign::CostMatrix c(tracks.size(), detections.size());
  for (std::size_t r = 0; r < tracks.size(); ++r) {
    const Track& track = tracks[r];
    const kalman::KfState& pred = predicted(filters_.at(track.track_id), frame);
    const Box7& last_box = track.history.back().second.box;
    for (std::size_t j = 0; j < detections.size(); ++j) {
      if (detections[j].cls != track.cls) continue;
      if (const auto cost = kalman::association_cost(pred, last_box, detections[j], params_)) {
        c.set(r, j, *cost);
      }
    }
  }
  return c;
}

StateVector KalmanBackend::on_create(int track_id, const Detection& detection) {
  Entry entry;
  entry.state = kalman::initialize(detection.box.center().head<2>(), params_);
  entry.frame = detection.frame_index;
  const StateVector state = entry.state.to_state();
  filters_[track_id] = entry;
  return state;
}

StateVector KalmanBackend::on_match(const Track& track, const Detection& detection) {
  Entry& entry = filters_.at(track.track_id);
  const kalman::KfState& pred = predicted(entry, detection.frame_index);
  entry.state = kalman::update(pred, detection.box.center().head<2>(), params_);
  entry.frame = detection.frame_index;
  entry.predicted_frame = -1;
  return entry.state.to_state();
}

void KalmanBackend::on_delete(int track_id) { filters_.erase(track_id); }

}  // namespace stt::tracker
