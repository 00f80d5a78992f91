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

#include "stt/tracker/stt_backend.hpp"

#include "stt/core/geometry.hpp"
#include "stt/model/dataset.hpp"

#include <algorithm>

namespace stt::tracker {

namespace {

std::vector<Detection> history_of(const Track& track) {
  std::vector<Detection> out;
  out.reserve(track.history.size());
  for (const auto& entry : track.history) out.push_back(entry.second);
  return out;
}

}  // namespace

SttBackend::SttBackend(const model::SttModel& model, double creation_score_threshold)
    : model_(model), threshold_(creation_score_threshold) {}

assign::CostMatrix SttBackend::costs(std::span<const Track> tracks, int frame,
                                     std::span<const Detection> detections) {
  ad::NoGradGuard no_grad;
  const model::SttConfig& cfg = model_.config();
  assign::CostMatrix c(tracks.size(), detections.size());
  scores_.assign(tracks.size(), std::vector<double>(detections.size(), 0.0));

  for (std::size_t r = 0; r < tracks.size(); ++r) {
    const Track& track = tracks[r];
    const StateVector predicted =
        extrapolate(track.latest_state(), (frame - track.last_frame()) * cfg.dt);
    std::vector<std::size_t> candidates;
    for (std::size_t idx : model::select_context(predicted, detections, cfg.context_radius,
                                                 cfg.max_context)) {
      if (detections[idx].cls == track.cls) candidates.push_back(idx);
    }
    if (candidates.empty()) continue;

    std::vector<Detection> context;
    context.reserve(candidates.size());
    for (std::size_t idx : candidates) context.push_back(detections[idx]);
    const std::vector<Detection> history = history_of(track);
    const model::Anchor anchor = model::Anchor::of(history.back());
    const ad::Var query = model_.track_query(history);
    const std::vector<std::uint8_t> mask(context.size(), 1);
    const model::InteractionOutput out = model_.interact(query, model_.encode(context, anchor), mask);
    interaction_state_[track.track_id] = model_.to_state(out.state.value(), anchor);

    const ad::Tensor& scores = out.scores.value();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      scores_[r][candidates[i]] = scores[i];
      if (scores[i] >= threshold_) c.set(r, candidates[i], 1.0 - scores[i]);
    }
  }
  return c;
}

StateVector SttBackend::on_create(int track_id, const Detection& detection) {
  interaction_state_.erase(track_id);
  StateVector s;
  s.position = detection.box.center().head<2>();
  return s;
}

StateVector SttBackend::on_match(const Track& track, const Detection& detection) {
  const model::SttConfig& cfg = model_.config();
  if (cfg.state_source == model::StateSource::kInteraction) {
    return interaction_state_.at(track.track_id);
  }
  ad::NoGradGuard no_grad;
  std::vector<Detection> history = history_of(track);
  history.push_back(detection);
  const auto keep = static_cast<std::size_t>(cfg.max_track_length);
  if (history.size() > keep) history.erase(history.begin(), history.end() - static_cast<std::ptrdiff_t>(keep));
  const model::Anchor anchor = model::Anchor::of(history.back());
  return model_.to_state(model_.decode_state(model_.track_query(history)).value(), anchor);
}

void SttBackend::on_delete(int track_id) { interaction_state_.erase(track_id); }

}  // namespace stt::tracker
