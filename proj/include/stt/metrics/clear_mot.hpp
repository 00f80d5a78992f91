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

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace stt::metrics {

inline constexpr double kNoGate = std::numeric_limits<double>::infinity();

enum class GatedState : std::uint8_t { kVelocity, kAcceleration };

struct ClassThresholds {
  double iou = 0.7;                  // t_u
  double velocity = kNoGate;         // m/s
  double acceleration = kNoGate;     // m/s^2
};

/// Feasibility rule for prediction/label pairs.
struct MatchingPolicy {
  ClassThresholds vehicle{0.7, kNoGate, kNoGate};
  ClassThresholds pedestrian{0.5, kNoGate, kNoGate};
  // Keep last frame's correspondences when they are still feasible.
  bool persistence = true;

  /// Box-only matching (MOTA).
  static MatchingPolicy mota();
  /// Box and state matching with 1.0 m/s, 1.0 m/s^2 (vehicle) and
  /// 0.5 m/s, 0.5 m/s^2 (pedestrian).
  static MatchingPolicy s_mota();

  const ClassThresholds& for_class(ClassId cls) const {
    return cls == ClassId::kVehicle ? vehicle : pedestrian;
  }
  void validate() const;
};

struct Prediction {
  int track_id = 0;
  ClassId cls = ClassId::kVehicle;
  Box7 box;
  StateVector state;
};

struct Label {
  int object_id = 0;
  ClassId cls = ClassId::kVehicle;
  Box7 box;
  StateVector state;
};

/// Ground-truth object id -> predicted track id.
using Correspondence = std::map<int, int>;

/// Cost 1 - IoU if the pair is feasible under `policy`, else kForbidden.
double pair_cost(const Prediction& prediction, const Label& label, const MatchingPolicy& policy);

struct FrameMatches {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (label index, prediction index)
  Correspondence correspondence;
};

/// Matches one frame. Previous correspondences whose pair is still feasible
/// are kept first (when the policy asks for persistence); the remainder is
/// solved optimally on 1 - IoU.
FrameMatches match_frame(std::span<const Prediction> predictions, std::span<const Label> labels,
                         const MatchingPolicy& policy, const Correspondence& previous);

struct ClearCounts {
  long long gt = 0;
  long long predictions = 0;
  long long matches = 0;
  long long false_positives = 0;
  long long misses = 0;
  long long mismatches = 0;

  ClearCounts& operator+=(const ClearCounts& other);
  bool operator==(const ClearCounts&) const = default;

  /// 1 - (FP + Miss + Mismatch) / GT; absent when GT is 0.
  std::optional<double> accuracy() const;
  std::optional<double> percent_of_gt(long long count) const;
};

/// Sequence-level CLEAR accumulation for one policy, split per class.
class ClearAccumulator {
 public:
  explicit ClearAccumulator(MatchingPolicy policy);

  /// Adds one frame and returns its matched pairs (label index, prediction index).
  std::vector<std::pair<std::size_t, std::size_t>> add_frame(std::span<const Prediction> predictions,
                                                             std::span<const Label> labels);
  const ClearCounts& counts(ClassId cls) const { return counts_[static_cast<std::size_t>(cls)]; }
  const MatchingPolicy& policy() const { return policy_; }

 private:
  MatchingPolicy policy_;
  std::array<ClearCounts, 2> counts_{};
  std::array<Correspondence, 2> previous_;
  std::array<std::map<int, int>, 2> last_matched_track_;
};

struct ErrorStats {
  long long count = 0;
  double sum = 0.0;

  void add(double error) {
    ++count;
    sum += error;
  }
  ErrorStats& operator+=(const ErrorStats& other) {
    count += other.count;
    sum += other.sum;
    return *this;
  }
  /// Mean error; absent for an empty set.
  std::optional<double> mean() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
  bool operator==(const ErrorStats&) const = default;
};

/// Mean L2 error of one state type over matched pairs, split by GT speed.
struct StateErrorStats {
  std::array<ErrorStats, 3> buckets{};  // static, slow, fast
  ErrorStats all;
  double alpha = kNoGate;
  long long large_errors = 0;  // errors strictly above alpha

  void add(double error, sim::SpeedBucket bucket);
  StateErrorStats& operator+=(const StateErrorStats& other);
  bool operator==(const StateErrorStats&) const = default;
};

}  // namespace stt::metrics
