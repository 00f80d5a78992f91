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

#include "stt/autodiff/checkpoint.hpp"
#include "stt/autodiff/ops.hpp"
#include "stt/core/types.hpp"
#include "stt/model/config.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stt::model {

/// Reference point for anchor-relative encoding: a track's last observed
/// XY position and the frame it was observed in.
struct Anchor {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  int frame = 0;

  static Anchor of(const Detection& last_observation);
};

struct InteractionOutput {
  ad::Var logits;  // 1 x k, padded slots are 0
  ad::Var scores;  // 1 x k, sigmoid of logits, padded slots exactly 0
  ad::Var state;   // 1 x 6, normalized anchor-relative state at the context frame
};

struct TrainingExample;

struct LossTerms {
  ad::Var total;
  double association = 0.0;
  double state_current = 0.0;
  double state_previous = 0.0;
};

/// The stateful tracking network: detection encoder, temporal fusion,
/// track state decoder and track-detection interaction.
class SttModel {
 public:
  SttModel(SttConfig config, std::uint64_t seed);

  const SttConfig& config() const { return config_; }
  const std::vector<std::pair<std::string, ad::Var>>& named_parameters() const { return params_; }
  std::vector<ad::Var> parameters() const;
  std::size_t parameter_count() const;

  /// Geometry (anchor-relative), appearance and motion inputs of one detection.
  std::vector<double> detection_features(const Detection& detection, const Anchor& anchor) const;

  /// Embeds detections row-wise: n x D_q.
  ad::Var encode(std::span<const Detection> detections, const Anchor& anchor) const;
  ad::Var encode_detection(const Detection& detection, const Anchor& anchor) const;

  /// Self-attention over history embeddings (T' x D_q) followed by pooling.
  /// `slots[i]` is the recency rank of row i (0 = newest); `mask[i]` marks
  /// live rows. Returns the 1 x D_q track query.
  ad::Var temporal_fuse(const ad::Var& embeddings, std::span<const int> slots,
                        ad::Mask mask) const;

  /// Track query for an ordered (oldest first) history, without padding.
  ad::Var track_query(std::span<const Detection> history) const;

  /// 1 x 6 normalized anchor-relative state at the time of the newest history entry.
  ad::Var decode_state(const ad::Var& query) const;

  /// Cross-attends the query to the context embeddings (k' x D_q, rows
  /// flagged by `mask`) and scores every context slot.
  InteractionOutput interact(const ad::Var& query, const ad::Var& context, ad::Mask mask) const;

  /// Physical state from a normalized 1 x 6 output.
  StateVector to_state(const ad::Tensor& raw, const Anchor& anchor) const;

  LossTerms loss(const TrainingExample& example) const;

  ad::Checkpoint to_checkpoint(const std::string& metadata) const;
  /// Replaces parameter values; throws ad::CheckpointError on any name or
  /// shape mismatch with this model's configuration.
  void load(const ad::Checkpoint& checkpoint);

 private:
  ad::Var& param(const std::string& name);
  const ad::Var& p(const std::string& name) const;
  void add_param(const std::string& name, std::size_t rows, std::size_t cols, double init_range);
  ad::Var multi_head(const ad::Var& queries, const ad::Var& keys, const std::string& prefix,
                     ad::Mask mask) const;
  ad::Var block(const ad::Var& queries, const ad::Var& keys, const std::string& prefix,
                ad::Mask mask) const;
  ad::Var state_loss(const ad::Var& raw, const StateVector& target, const Anchor& anchor) const;

  SttConfig config_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, ad::Var>> params_;
};

}  // namespace stt::model
