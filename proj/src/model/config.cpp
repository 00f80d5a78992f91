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

#include "stt/model/config.hpp"

#include <stdexcept>
#include <string>

namespace stt::model {

std::string_view to_string(Pooling pooling) {
  return pooling == Pooling::kMean ? "mean" : "last_slot";
}

Pooling pooling_from_string(std::string_view name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "last_slot") return Pooling::kLastSlot;
  throw std::invalid_argument("unknown pooling '" + std::string(name) + "'");
}

std::string_view to_string(StateSource source) {
  return source == StateSource::kDecoder ? "decoder" : "interaction";
}

StateSource state_source_from_string(std::string_view name) {
  if (name == "decoder") return StateSource::kDecoder;
  if (name == "interaction") return StateSource::kInteraction;
  throw std::invalid_argument("unknown state source '" + std::string(name) + "'");
}

void SttConfig::validate() const {
  const auto positive = [](int v, const char* name) {
    if (v < 1) throw std::invalid_argument(std::string("stt.") + name + " must be >= 1");
  };
  positive(query_dim, "query_dim");
  positive(appearance_dim, "appearance_dim");
  positive(motion_dim, "motion_dim");
  positive(encoder_hidden, "encoder_hidden");
  positive(ffn_hidden, "ffn_hidden");
  positive(decoder_hidden, "decoder_hidden");
  positive(pair_hidden, "pair_hidden");
  positive(heads, "heads");
  positive(max_track_length, "max_track_length");
  positive(max_context, "max_context");
  if (query_dim % heads != 0) {
    throw std::invalid_argument("stt.query_dim must be divisible by stt.heads");
  }
  if (!(context_radius > 0.0)) throw std::invalid_argument("stt.context_radius must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("stt.dt must be > 0");
  for (double w : {association_weight, state_weight, previous_state_weight, position_weight,
                   velocity_weight, acceleration_weight}) {
    if (!(w >= 0.0)) throw std::invalid_argument("stt loss weights must be >= 0");
  }
  for (double s : {position_scale, velocity_scale, acceleration_scale, size_scale}) {
    if (!(s > 0.0)) throw std::invalid_argument("stt normalization scales must be > 0");
  }
}

}  // namespace stt::model
