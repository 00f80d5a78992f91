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

#include "stt/model/network.hpp"

#include "stt/model/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace stt::model {

using ad::Tensor;
using ad::Var;

namespace {

Var linear(const Var& x, const Var& w, const Var& b) { return ad::add(ad::matmul(x, w), b); }

double xavier(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

std::vector<std::uint8_t> all_live(std::size_t n) { return std::vector<std::uint8_t>(n, 1); }

}  // namespace

Anchor Anchor::of(const Detection& last_observation) {
  return {last_observation.box.center().head<2>(), last_observation.frame_index};
}

SttModel::SttModel(SttConfig config, std::uint64_t seed) : config_(config), seed_(seed) {
  config_.validate();
  const auto q = static_cast<std::size_t>(config_.query_dim);
  const auto f = static_cast<std::size_t>(config_.feature_dim());
  const auto eh = static_cast<std::size_t>(config_.encoder_hidden);
  const auto fh = static_cast<std::size_t>(config_.ffn_hidden);
  const auto dh = static_cast<std::size_t>(config_.decoder_hidden);
  const auto ph = static_cast<std::size_t>(config_.pair_hidden);
  const auto t = static_cast<std::size_t>(config_.max_track_length);

  add_param("de.w1", f, eh, xavier(f, eh));
  add_param("de.b1", 1, eh, 0.0);
  add_param("de.w2", eh, q, xavier(eh, q));
  add_param("de.b2", 1, q, 0.0);

  add_param("tf.slot", t, q, 0.1);
  for (const std::string prefix : {"tf", "tdi"}) {
    for (const char* m : {".wq", ".wk", ".wv", ".wo"}) add_param(prefix + m, q, q, xavier(q, q));
    add_param(prefix + ".ln1.g", 1, q, 0.0);
    add_param(prefix + ".ln1.b", 1, q, 0.0);
    add_param(prefix + ".ffn.w1", q, fh, xavier(q, fh));
    add_param(prefix + ".ffn.b1", 1, fh, 0.0);
    add_param(prefix + ".ffn.w2", fh, q, xavier(fh, q));
    add_param(prefix + ".ffn.b2", 1, q, 0.0);
    add_param(prefix + ".ln2.g", 1, q, 0.0);
    add_param(prefix + ".ln2.b", 1, q, 0.0);
  }

  add_param("tsd.w1", q, dh, xavier(q, dh));
  add_param("tsd.b1", 1, dh, 0.0);
  add_param("tsd.w2", dh, 6, xavier(dh, 6));
  add_param("tsd.b2", 1, 6, 0.0);

  add_param("tdi.pair.w1", 3 * q, ph, xavier(3 * q, ph));
  add_param("tdi.pair.b1", 1, ph, 0.0);
  add_param("tdi.pair.w2", ph, 1, xavier(ph, 1));
  add_param("tdi.pair.b2", 1, 1, 0.0);
  add_param("tdi.state.w1", q, dh, xavier(q, dh));
  add_param("tdi.state.b1", 1, dh, 0.0);
  add_param("tdi.state.w2", dh, 6, xavier(dh, 6));
  add_param("tdi.state.b2", 1, 6, 0.0);

  for (auto& [name, var] : params_) {
    if (name.ends_with(".g")) var.mutable_value().fill(1.0);
  }
}

void SttModel::add_param(const std::string& name, std::size_t rows, std::size_t cols,
                         double init_range) {
  // Each tensor draws from its own stream so that adding a parameter does not
  // reshuffle the others.
  std::seed_seq seq{seed_, static_cast<std::uint64_t>(params_.size()),
                    static_cast<std::uint64_t>(std::hash<std::string>{}(name) & 0xffffffffu)};
  std::mt19937_64 rng(seq);
  Tensor value(rows, cols);
  if (init_range > 0.0) {
    std::uniform_real_distribution<double> dist(-init_range, init_range);
    for (double& v : value.data()) v = dist(rng);
  }
  params_.emplace_back(name, ad::parameter(std::move(value)));
}

ad::Var& SttModel::param(const std::string& name) {
  for (auto& [n, v] : params_) {
    if (n == name) return v;
  }
  throw std::out_of_range("unknown parameter " + name);
}

const ad::Var& SttModel::p(const std::string& name) const {
  for (const auto& [n, v] : params_) {
    if (n == name) return v;
  }
  throw std::out_of_range("unknown parameter " + name);
}

std::vector<ad::Var> SttModel::parameters() const {
  std::vector<ad::Var> out;
  for (const auto& entry : params_) out.push_back(entry.second);
  return out;
}

std::size_t SttModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& entry : params_) n += entry.second.value().size();
  return n;
}

std::vector<double> SttModel::detection_features(const Detection& detection,
                                                 const Anchor& anchor) const {
  const auto appearance = static_cast<std::size_t>(config_.appearance_dim);
  const auto motion = static_cast<std::size_t>(config_.motion_dim);
  detection.validate(appearance, motion);
  std::vector<double> f;
  f.reserve(static_cast<std::size_t>(config_.feature_dim()));
  const Eigen::Vector2d rel = detection.box.center().head<2>() - anchor.position;
  f.push_back(rel.x() / config_.position_scale);
  f.push_back(rel.y() / config_.position_scale);
  f.push_back(detection.box.width() / config_.size_scale);
  f.push_back(detection.box.length() / config_.size_scale);
  f.push_back(detection.box.height() / config_.size_scale);
  f.push_back(std::sin(detection.box.heading()));
  f.push_back(std::cos(detection.box.heading()));
  f.push_back(detection.confidence);
  const double offset = (detection.frame_index - anchor.frame) * config_.dt;
  f.push_back(offset);
  // Mean velocity implied by moving between the anchor and this detection.
  const Eigen::Vector2d rate = offset == 0.0 ? Eigen::Vector2d::Zero() : Eigen::Vector2d(rel / offset);
  f.push_back(rate.x() / config_.velocity_scale);
  f.push_back(rate.y() / config_.velocity_scale);
  f.insert(f.end(), detection.appearance.begin(), detection.appearance.end());
  for (double m : detection.motion) f.push_back(m / config_.velocity_scale);
  return f;
}

Var SttModel::encode(std::span<const Detection> detections, const Anchor& anchor) const {
  const auto width = static_cast<std::size_t>(config_.feature_dim());
  Tensor x(detections.size(), width);
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto f = detection_features(detections[i], anchor);
    std::copy(f.begin(), f.end(), x.data().begin() + static_cast<std::ptrdiff_t>(i * width));
  }
  const Var hidden = ad::relu(linear(ad::constant(std::move(x)), p("de.w1"), p("de.b1")));
  return linear(hidden, p("de.w2"), p("de.b2"));
}

Var SttModel::encode_detection(const Detection& detection, const Anchor& anchor) const {
  return encode(std::span<const Detection>(&detection, 1), anchor);
}

Var SttModel::multi_head(const Var& queries, const Var& keys, const std::string& prefix,
                         ad::Mask mask) const {
  const Var q = ad::matmul(queries, p(prefix + ".wq"));
  const Var k = ad::matmul(keys, p(prefix + ".wk"));
  const Var v = ad::matmul(keys, p(prefix + ".wv"));
  const auto heads = static_cast<std::size_t>(config_.heads);
  const std::size_t width = static_cast<std::size_t>(config_.query_dim) / heads;
  std::vector<Var> outputs;
  outputs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t b = h * width, e = b + width;
    outputs.push_back(ad::attention(ad::slice(q, 1, b, e), ad::slice(k, 1, b, e),
                                    ad::slice(v, 1, b, e), mask));
  }
  const Var merged = heads == 1 ? outputs.front() : ad::concat(outputs, 1);
  return ad::matmul(merged, p(prefix + ".wo"));
}

Var SttModel::block(const Var& queries, const Var& keys, const std::string& prefix,
                    ad::Mask mask) const {
  const Var attended = multi_head(queries, keys, prefix, mask);
  const Var h = ad::layer_norm(ad::add(queries, attended), p(prefix + ".ln1.g"), p(prefix + ".ln1.b"));
  const Var ffn = linear(ad::relu(linear(h, p(prefix + ".ffn.w1"), p(prefix + ".ffn.b1"))),
                         p(prefix + ".ffn.w2"), p(prefix + ".ffn.b2"));
  return ad::layer_norm(ad::add(h, ffn), p(prefix + ".ln2.g"), p(prefix + ".ln2.b"));
}

Var SttModel::temporal_fuse(const Var& embeddings, std::span<const int> slots,
                            ad::Mask mask) const {
  const std::size_t n = embeddings.rows();
  const auto t = static_cast<std::size_t>(config_.max_track_length);
  if (slots.size() != n || mask.size() != n) {
    throw ad::ShapeError("temporal_fuse: slots/mask length must equal the number of rows " +
                         embeddings.value().shape_string());
  }
  std::size_t live = 0;
  for (auto m : mask) live += m ? 1 : 0;
  if (live == 0) throw std::invalid_argument("temporal_fuse: empty history");

  Tensor one_hot(n, t);
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i] < 0 || static_cast<std::size_t>(slots[i]) >= t) {
      throw std::invalid_argument("temporal_fuse: slot index out of range");
    }
    one_hot(i, static_cast<std::size_t>(slots[i])) = 1.0;
  }
  const Var x = ad::add(embeddings, ad::matmul(ad::constant(std::move(one_hot)), p("tf.slot")));
  const Var fused = block(x, x, "tf", mask);

  Tensor pool(1, n);
  if (config_.pooling == Pooling::kMean) {
    for (std::size_t i = 0; i < n; ++i) pool[i] = mask[i] ? 1.0 / static_cast<double>(live) : 0.0;
  } else {
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] && slots[i] == 0) {
        pool[i] = 1.0;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("temporal_fuse: last-slot pooling needs a live slot 0");
  }
  return ad::matmul(ad::constant(std::move(pool)), fused);
}

Var SttModel::track_query(std::span<const Detection> history) const {
  if (history.empty()) throw std::invalid_argument("track_query: empty history");
  const Anchor anchor = Anchor::of(history.back());
  const Var embeddings = encode(history, anchor);
  std::vector<int> slots(history.size());
  for (std::size_t i = 0; i < history.size(); ++i) slots[i] = static_cast<int>(history.size() - 1 - i);
  const auto mask = all_live(history.size());
  return temporal_fuse(embeddings, slots, mask);
}

Var SttModel::decode_state(const Var& query) const {
  const Var hidden = ad::relu(linear(query, p("tsd.w1"), p("tsd.b1")));
  return linear(hidden, p("tsd.w2"), p("tsd.b2"));
}

InteractionOutput SttModel::interact(const Var& query, const Var& context, ad::Mask mask) const {
  const std::size_t k = context.rows();
  if (mask.size() != k) throw ad::ShapeError("interact: mask length must equal context rows");
  if (k == 0) throw std::invalid_argument("interact: empty context");
  const Var attended = block(query, context, "tdi", mask);

  const Var repeated = ad::matmul(ad::constant(Tensor(k, 1, 1.0)), attended);
  const Var pair = ad::concat({repeated, context, ad::mul(repeated, context)}, 1);
  const Var hidden = ad::relu(linear(pair, p("tdi.pair.w1"), p("tdi.pair.b1")));
  const Var column = linear(hidden, p("tdi.pair.w2"), p("tdi.pair.b2"));

  Tensor live(1, k);
  for (std::size_t i = 0; i < k; ++i) live[i] = mask[i] ? 1.0 : 0.0;
  const Var live_row = ad::constant(std::move(live));
  InteractionOutput out;
  out.logits = ad::mul(ad::transpose(column), live_row);
  out.scores = ad::mul(ad::sigmoid(out.logits), live_row);
  const Var state_hidden = ad::relu(linear(attended, p("tdi.state.w1"), p("tdi.state.b1")));
  out.state = linear(state_hidden, p("tdi.state.w2"), p("tdi.state.b2"));
  return out;
}

StateVector SttModel::to_state(const Tensor& raw, const Anchor& anchor) const {
  if (raw.size() != 6) throw ad::ShapeError("to_state expects 6 values, got " + raw.shape_string());
  StateVector s;
  s.position = anchor.position + config_.position_scale * Eigen::Vector2d(raw[0], raw[1]);
  s.velocity = config_.velocity_scale * Eigen::Vector2d(raw[2], raw[3]);
  s.acceleration = config_.acceleration_scale * Eigen::Vector2d(raw[4], raw[5]);
  return s;
}

Var SttModel::state_loss(const Var& raw, const StateVector& target, const Anchor& anchor) const {
  const double ps = config_.position_scale, vs = config_.velocity_scale,
               as = config_.acceleration_scale;
  const Tensor scales(1, 6, {ps, ps, vs, vs, as, as});
  const double wp = config_.position_weight, wv = config_.velocity_weight,
               wa = config_.acceleration_weight;
  const Tensor weights(1, 6, {wp, wp, wv, wv, wa, wa});
  const Eigen::Vector2d rel = target.position - anchor.position;
  const Tensor goal(1, 6, {rel.x(), rel.y(), target.velocity.x(), target.velocity.y(),
                           target.acceleration.x(), target.acceleration.y()});
  const Var physical = ad::mul(raw, ad::constant(scales));
  const Var error = ad::abs(ad::sub(physical, ad::constant(goal)));
  return ad::sum_all(ad::mul(error, ad::constant(weights)));
}

LossTerms SttModel::loss(const TrainingExample& example) const {
  example.validate(config_);
  if (example.context.empty()) throw std::invalid_argument("loss: example without context");
  const Anchor anchor = Anchor::of(example.history.back());
  const Var query = track_query(example.history);
  const Var previous = decode_state(query);

  const Var context = encode(example.context, anchor);
  const auto mask = all_live(example.context.size());
  const InteractionOutput out = interact(query, context, mask);

  Tensor labels(1, example.labels.size());
  for (std::size_t i = 0; i < example.labels.size(); ++i) labels[i] = example.labels[i];
  const Var association = ad::sum_all(ad::bce_with_logits(out.logits, labels));
  const Var current = state_loss(out.state, example.target_current, anchor);
  const Var prior = state_loss(previous, example.target_previous, anchor);

  LossTerms terms;
  terms.association = association.item();
  terms.state_current = current.item();
  terms.state_previous = prior.item();
  terms.total = ad::add(ad::add(ad::scale(association, config_.association_weight),
                                ad::scale(current, config_.state_weight)),
                        ad::scale(prior, config_.previous_state_weight));
  return terms;
}

ad::Checkpoint SttModel::to_checkpoint(const std::string& metadata) const {
  ad::Checkpoint checkpoint;
  checkpoint.metadata = metadata;
  for (const auto& [name, var] : params_) checkpoint.tensors.push_back({name, var.value()});
  return checkpoint;
}

void SttModel::load(const ad::Checkpoint& checkpoint) {
  if (checkpoint.tensors.size() != params_.size()) {
    throw ad::CheckpointError("checkpoint has " + std::to_string(checkpoint.tensors.size()) +
                              " tensors, model expects " + std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& [name, var] = params_[i];
    const ad::NamedTensor& t = checkpoint.tensors[i];
    if (t.name != name || !t.tensor.same_shape(var.value())) {
      throw ad::CheckpointError("checkpoint tensor '" + t.name + "' " + t.tensor.shape_string() +
                                " does not match model parameter '" + name + "' " +
                                var.value().shape_string());
    }
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i].second.mutable_value() = checkpoint.tensors[i].tensor;
  }
}

}  // namespace stt::model
