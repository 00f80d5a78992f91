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

#include "stt/assign/hungarian.hpp"
#include "stt/core/types.hpp"
#include "stt/sim/simulator.hpp"

#include <span>
#include <vector>

namespace stt::tracker {

struct LifecycleConfig {
  // Association scores below this are infeasible; the detection may then seed a new track.
  double creation_score_threshold = 0.5;
  // A track is deleted once it has gone unobserved for more than this many frames.
  int max_misses = 3;
  // Detections below this confidence are ignored entirely.
  double min_confidence = 0.5;
  // T: history entries kept per track.
  int max_track_length = 10;

  void validate() const;
};

struct TrackEmission {
  int track_id = 0;
  ClassId cls = ClassId::kVehicle;
  Box7 box;
  StateVector state;
  double confidence = 0.0;
  int detection_id = -1;

  bool operator==(const TrackEmission&) const = default;
};

struct FrameOutput {
  int frame = 0;
  std::vector<TrackEmission> tracks;  // sorted by track_id

  bool operator==(const FrameOutput&) const = default;
};

struct TrackerOutput {
  std::vector<FrameOutput> frames;
  std::vector<double> frame_seconds;  // wall clock per step, not part of equality
};

/// State estimation and association costs for the shared tracking loop.
class Backend {
 public:
  virtual ~Backend() = default;

  /// Rows follow `tracks`, columns follow `detections`.
  virtual assign::CostMatrix costs(std::span<const Track> tracks, int frame,
                                   std::span<const Detection> detections) = 0;
  /// State of a track seeded by `detection`.
  virtual StateVector on_create(int track_id, const Detection& detection) = 0;
  /// State after `detection` is associated to `track` (history not yet extended).
  virtual StateVector on_match(const Track& track, const Detection& detection) = 0;
  virtual void on_miss(const Track& track) { (void)track; }
  virtual void on_delete(int track_id) { (void)track_id; }
};

/// Online tracking loop: association, track creation, update and deletion.
class Tracker {
 public:
  Tracker(Backend& backend, LifecycleConfig config);

  /// Processes one frame. Frames must be strictly increasing. Throws
  /// std::invalid_argument on duplicate detection ids.
  FrameOutput step(int frame, std::span<const Detection> detections);

  const std::vector<Track>& tracks() const { return tracks_; }
  const LifecycleConfig& config() const { return config_; }

 private:
  Backend& backend_;
  LifecycleConfig config_;
  std::vector<Track> tracks_;
  int next_id_ = 0;
  int last_frame_ = -1;
  bool started_ = false;
};

TrackerOutput run_sequence(const sim::Scenario& scenario, Backend& backend,
                           const LifecycleConfig& config);

}  // namespace stt::tracker
