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

#include <cstdint>
#include <string_view>

namespace stt::model {

enum class Pooling : std::uint8_t { kMean, kLastSlot };
enum class StateSource : std::uint8_t { kDecoder, kInteraction };

std::string_view to_string(Pooling pooling);
Pooling pooling_from_string(std::string_view name);
std::string_view to_string(StateSource source);
StateSource state_source_from_string(std::string_view name);

struct SttConfig {
  // Widths.
  int query_dim = 32;  // D_q
  int appearance_dim = 8;
  int motion_dim = 2;
  int encoder_hidden = 64;
  int ffn_hidden = 64;
  int decoder_hidden = 64;
  int pair_hidden = 32;
  int heads = 2;

  int max_track_length = 10;  // T
  int max_context = 20;       // k
  double context_radius = 5.0;  // d, meters

  Pooling pooling = Pooling::kMean;
  // Which head produces the emitted track state at inference.
  StateSource state_source = StateSource::kDecoder;

  // Loss weights: total = association * L_d + state * L_s(t) + previous_state * L_s(t-1).
  double association_weight = 10.0;
  double state_weight = 1.0;
  double previous_state_weight = 1.0;
  double position_weight = 1.0;
  double velocity_weight = 1.0;
  double acceleration_weight = 10.0;

  double dt = 0.1;

  // Fixed input/output normalization.
  double position_scale = 5.0;
  double velocity_scale = 10.0;
  double acceleration_scale = 2.0;
  double size_scale = 5.0;

  int feature_dim() const { return kGeometryFeatures + appearance_dim + motion_dim; }
  void validate() const;

  // rel x, rel y, width, length, height, sin heading, cos heading, confidence, time offset,
  // displacement rate x, displacement rate y
  static constexpr int kGeometryFeatures = 11;
};

}  // namespace stt::model
