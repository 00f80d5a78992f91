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

#include "stt/tracker/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>
#include <string>

namespace stt::tracker {

void LifecycleConfig::validate() const {
  if (!(creation_score_threshold >= 0.0 && creation_score_threshold <= 1.0)) {
    throw std::invalid_argument("lifecycle.creation_score_threshold must be in [0, 1]");
  }
  if (max_misses < 0) throw std::invalid_argument("lifecycle.max_misses must be >= 0");
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw std::invalid_argument("lifecycle.min_confidence must be in [0, 1]");
  }
  if (max_track_length < 1) throw std::invalid_argument("lifecycle.max_track_length must be >= 1");
}

Tracker::Tracker(Backend& backend, LifecycleConfig config) : backend_(backend), config_(config) {
  config_.validate();
}

FrameOutput Tracker::step(int frame, std::span<const Detection> detections) {
  if (started_ && frame <= last_frame_) {
    throw std::invalid_argument("tracker frames must be strictly increasing (got " +
                                std::to_string(frame) + " after " + std::to_string(last_frame_) + ")");
  }
  std::set<int> ids;
  for (const Detection& d : detections) {
    if (!ids.insert(d.detection_id).second) {
      throw std::invalid_argument("duplicate detection id " + std::to_string(d.detection_id) +
                                  " in frame " + std::to_string(frame));
    }
  }
  started_ = true;
  last_frame_ = frame;

  std::vector<Detection> considered;
  for (const Detection& d : detections) {
    if (d.confidence >= config_.min_confidence) considered.push_back(d);
  }

  const assign::CostMatrix costs = backend_.costs(tracks_, frame, considered);
  if (costs.rows() != tracks_.size() || costs.cols() != considered.size()) {
    throw std::logic_error("backend returned a cost matrix of the wrong shape");
  }
  const assign::Matching matching = assign::solve(costs);

  FrameOutput out{.frame = frame, .tracks = {}};
  const auto max_length = static_cast<std::size_t>(config_.max_track_length);
  std::vector<bool> track_matched(tracks_.size(), false);
  std::vector<bool> det_matched(considered.size(), false);
  for (const auto& [row, col] : matching) {
    Track& track = tracks_[static_cast<std::size_t>(row)];
    const Detection& det = considered[static_cast<std::size_t>(col)];
    const StateVector state = backend_.on_match(track, det);
    track.append(frame, det, state, max_length);
    track.misses = 0;
    track_matched[static_cast<std::size_t>(row)] = true;
    det_matched[static_cast<std::size_t>(col)] = true;
    out.tracks.push_back({track.track_id, track.cls, det.box, state, det.confidence, det.detection_id});
  }

  std::vector<Track> survivors;
  survivors.reserve(tracks_.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& track = tracks_[i];
    if (!track_matched[i]) {
      ++track.misses;
      backend_.on_miss(track);
      if (track.misses > config_.max_misses) {
        track.status = TrackStatus::kDead;
        backend_.on_delete(track.track_id);
        continue;
      }
    }
    survivors.push_back(std::move(track));
  }
  tracks_ = std::move(survivors);

  for (std::size_t j = 0; j < considered.size(); ++j) {
    if (det_matched[j]) continue;
    const Detection& det = considered[j];
    Track track;
    track.track_id = next_id_++;
    track.cls = det.cls;
    const StateVector state = backend_.on_create(track.track_id, det);
    track.append(frame, det, state, max_length);
    out.tracks.push_back({track.track_id, track.cls, det.box, state, det.confidence, det.detection_id});
    tracks_.push_back(std::move(track));
  }

  std::sort(out.tracks.begin(), out.tracks.end(),
            [](const TrackEmission& a, const TrackEmission& b) { return a.track_id < b.track_id; });
  return out;
}

TrackerOutput run_sequence(const sim::Scenario& scenario, Backend& backend,
                           const LifecycleConfig& config) {
  Tracker tracker(backend, config);
  TrackerOutput out;
  out.frames.reserve(static_cast<std::size_t>(scenario.frames));
  for (int f = 0; f < scenario.frames; ++f) {
    const std::vector<Detection> detections = scenario.frame_detections(f);
    const auto start = std::chrono::steady_clock::now();
    out.frames.push_back(tracker.step(f, detections));
    const auto stop = std::chrono::steady_clock::now();
    out.frame_seconds.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return out;
}

}  // namespace stt::tracker
