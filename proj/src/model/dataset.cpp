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

#include "stt/model/dataset.hpp"

#include "stt/core/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace stt::model {

void TrainingExample::validate(const SttConfig& config) const {
  if (history.empty() || static_cast<int>(history.size()) > config.max_track_length) {
    throw std::invalid_argument("training example history must have 1..T entries");
  }
  if (context.size() != labels.size()) {
    throw std::invalid_argument("training example context/labels length mismatch");
  }
  if (static_cast<int>(context.size()) > config.max_context) {
    throw std::invalid_argument("training example has more than k context detections");
  }
  int positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("association labels must be 0 or 1");
    positives += y;
  }
  if (positives > 1) throw std::invalid_argument("at most one context detection may be labeled 1");
}

std::vector<std::size_t> select_context(const StateVector& predicted,
                                        std::span<const Detection> detections, double radius,
                                        int k) {
  if (!(radius > 0.0) || k < 1) throw std::invalid_argument("select_context: need d > 0, k >= 1");
  std::vector<std::pair<double, std::size_t>> inside;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const double dist = center_distance(predicted, detections[i].box);
    if (dist < radius) inside.emplace_back(dist, i);
  }
  std::sort(inside.begin(), inside.end());
  if (inside.size() > static_cast<std::size_t>(k)) inside.resize(static_cast<std::size_t>(k));
  std::vector<std::size_t> out;
  out.reserve(inside.size());
  for (const auto& entry : inside) out.push_back(entry.second);
  return out;
}

std::vector<TrainingExample> build_examples(const sim::Scenario& scenario, const SttConfig& config,
                                            std::uint64_t seed, bool random_history_length,
                                            int frame_stride) {
  config.validate();
  if (frame_stride < 1) throw std::invalid_argument("build_examples: frame_stride must be >= 1");
  std::mt19937_64 rng(seed);
  const std::size_t max_len = static_cast<std::size_t>(config.max_track_length);

  // Per object, per frame: index of its detection in that frame (or -1).
  const std::size_t objects = scenario.gt_tracks.size();
  std::vector<std::vector<int>> own(objects, std::vector<int>(static_cast<std::size_t>(scenario.frames), -1));
  for (int f = 0; f < scenario.frames; ++f) {
    const auto& row = scenario.detections[static_cast<std::size_t>(f)];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].source_object != sim::kFalsePositive) {
        own[static_cast<std::size_t>(row[i].source_object)][static_cast<std::size_t>(f)] = static_cast<int>(i);
      }
    }
  }

  std::vector<std::vector<Detection>> frame_dets(static_cast<std::size_t>(scenario.frames));
  for (int f = 0; f < scenario.frames; ++f) frame_dets[static_cast<std::size_t>(f)] = scenario.frame_detections(f);

  std::vector<TrainingExample> examples;
  for (std::size_t obj = 0; obj < objects; ++obj) {
    const sim::GtTrack& gt = scenario.gt_tracks[obj];
    std::vector<int> seen_frames;  // frames with a detection of this object, ascending
    for (int t = 0; t < scenario.frames; ++t) {
      if (!seen_frames.empty() && (t + static_cast<int>(obj)) % frame_stride == 0) {
        std::size_t available = std::min(seen_frames.size(), max_len);
        std::size_t length = available;
        if (random_history_length) {
          length = std::uniform_int_distribution<std::size_t>(1, available)(rng);
        }
        TrainingExample ex;
        ex.frame = t;
        for (std::size_t i = seen_frames.size() - length; i < seen_frames.size(); ++i) {
          const int f = seen_frames[i];
          ex.history.push_back(scenario.detections[static_cast<std::size_t>(f)]
                                   [static_cast<std::size_t>(own[obj][static_cast<std::size_t>(f)])]
                                       .detection);
        }
        ex.target_current = gt.frames[static_cast<std::size_t>(t)].state;
        ex.target_previous = gt.frames[static_cast<std::size_t>(seen_frames.back())].state;
        const auto& dets = frame_dets[static_cast<std::size_t>(t)];
        const auto chosen = select_context(ex.target_current, dets, config.context_radius,
                                           config.max_context);
        if (!chosen.empty()) {
          for (std::size_t idx : chosen) {
            ex.context.push_back(dets[idx]);
            ex.labels.push_back(static_cast<int>(idx) == own[obj][static_cast<std::size_t>(t)] ? 1 : 0);
          }
          examples.push_back(std::move(ex));
        }
      }
      if (own[obj][static_cast<std::size_t>(t)] >= 0) seen_frames.push_back(t);
    }
  }
  return examples;
}

}  // namespace stt::model
