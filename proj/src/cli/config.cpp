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

#include "stt/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace stt::cli {

using nlohmann::json;

std::string_view to_string(BackendKind kind) { return kind == BackendKind::kKalman ? "kalman" : "stt"; }

BackendKind backend_from_string(std::string_view name) {
  if (name == "kalman") return BackendKind::kKalman;
  if (name == "stt") return BackendKind::kStt;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "' (expected kalman or stt)");
}

std::string version_string() {
#ifdef STT_VERSION
  return STT_VERSION;
#else
  return "unknown";
#endif
}

RunConfig RunConfig::defaults_for(ClassId cls) {
  RunConfig c;
  c.cls = cls;
  c.sim = sim::SimConfig::defaults_for(cls);
  return c;
}

void RunConfig::validate() const {
  sim.validate();
  stt.validate();
  train.validate();
  kalman.validate();
  lifecycle.validate();
  eval.validate();
  if (sim.cls != cls) throw std::invalid_argument("sim.class must equal class");
  if (train_scenarios < 1 || test_scenarios < 1) {
    throw std::invalid_argument("train_scenarios and test_scenarios must be >= 1");
  }
  if (stt.appearance_dim != sim.appearance_dim || stt.motion_dim != 2 || stt.dt != sim.dt ||
      lifecycle.max_track_length != stt.max_track_length) {
    throw std::invalid_argument("stt widths, dt and track length must agree with sim and lifecycle");
  }
}

namespace {

// Reads the keys of one JSON object and rejects any it did not consume.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw CliError(kSchema, "config: '" + where() + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw CliError(kSchema, "config: '" + name(key) + "' has the wrong type");
    }
  }

  // Numbers, or the string "inf".
  void get_threshold(const char* key, double& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const json& v = j_.at(key);
    if (v.is_string() && v.get<std::string>() == "inf") {
      out = std::numeric_limits<double>::infinity();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      throw CliError(kSchema, "config: '" + name(key) + "' must be a number or \"inf\"");
    }
  }

  template <typename F>
  void get_string(const char* key, F&& parse) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    if (!j_.at(key).is_string()) throw CliError(kSchema, "config: '" + name(key) + "' must be a string");
    try {
      parse(j_.at(key).get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw CliError(kSchema, "config: '" + name(key) + "': " + e.what());
    }
  }

  template <typename F>
  void child(const char* key, F&& read) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    Section s(j_.at(key), name(key));
    read(s);
    s.finish();
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) throw CliError(kSchema, "config: unknown key '" + name(item.key().c_str()) + "'");
    }
  }

 private:
  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json threshold(double v) { return std::isinf(v) ? json("inf") : json(v); }

json thresholds_json(const metrics::ClassThresholds& t) {
  return {{"iou", t.iou}, {"velocity", threshold(t.velocity)}, {"acceleration", threshold(t.acceleration)}};
}

void read_thresholds(Section& s, metrics::ClassThresholds& t) {
  s.get("iou", t.iou);
  s.get_threshold("velocity", t.velocity);
  s.get_threshold("acceleration", t.acceleration);
}

json policy_json(const metrics::MatchingPolicy& p) {
  return {{"vehicle", thresholds_json(p.vehicle)},
          {"pedestrian", thresholds_json(p.pedestrian)},
          {"persistence", p.persistence}};
}

void read_policy(Section& s, metrics::MatchingPolicy& p) {
  s.child("vehicle", [&](Section& c) { read_thresholds(c, p.vehicle); });
  s.child("pedestrian", [&](Section& c) { read_thresholds(c, p.pedestrian); });
  s.get("persistence", p.persistence);
}

void read_stt(Section& s, model::SttConfig& c) {
  s.get("query_dim", c.query_dim);
  s.get("encoder_hidden", c.encoder_hidden);
  s.get("ffn_hidden", c.ffn_hidden);
  s.get("decoder_hidden", c.decoder_hidden);
  s.get("pair_hidden", c.pair_hidden);
  s.get("heads", c.heads);
  s.get("max_track_length", c.max_track_length);
  s.get("max_context", c.max_context);
  s.get("context_radius", c.context_radius);
  s.get_string("pooling", [&](const std::string& v) { c.pooling = model::pooling_from_string(v); });
  s.get_string("state_source", [&](const std::string& v) { c.state_source = model::state_source_from_string(v); });
  s.get("association_weight", c.association_weight);
  s.get("state_weight", c.state_weight);
  s.get("previous_state_weight", c.previous_state_weight);
  s.get("position_weight", c.position_weight);
  s.get("velocity_weight", c.velocity_weight);
  s.get("acceleration_weight", c.acceleration_weight);
  s.get("position_scale", c.position_scale);
  s.get("velocity_scale", c.velocity_scale);
  s.get("acceleration_scale", c.acceleration_scale);
  s.get("size_scale", c.size_scale);
}

}  // namespace

json to_json(const model::SttConfig& c) {
  return {{"query_dim", c.query_dim},
          {"appearance_dim", c.appearance_dim},
          {"motion_dim", c.motion_dim},
          {"encoder_hidden", c.encoder_hidden},
          {"ffn_hidden", c.ffn_hidden},
          {"decoder_hidden", c.decoder_hidden},
          {"pair_hidden", c.pair_hidden},
          {"heads", c.heads},
          {"max_track_length", c.max_track_length},
          {"max_context", c.max_context},
          {"context_radius", c.context_radius},
          {"pooling", std::string(model::to_string(c.pooling))},
          {"state_source", std::string(model::to_string(c.state_source))},
          {"association_weight", c.association_weight},
          {"state_weight", c.state_weight},
          {"previous_state_weight", c.previous_state_weight},
          {"position_weight", c.position_weight},
          {"velocity_weight", c.velocity_weight},
          {"acceleration_weight", c.acceleration_weight},
          {"dt", c.dt},
          {"position_scale", c.position_scale},
          {"velocity_scale", c.velocity_scale},
          {"acceleration_scale", c.acceleration_scale},
          {"size_scale", c.size_scale}};
}

model::SttConfig stt_config_from_json(const json& j) {
  model::SttConfig c;
  Section s(j, "stt");
  read_stt(s, c);
  s.get("appearance_dim", c.appearance_dim);
  s.get("motion_dim", c.motion_dim);
  s.get("dt", c.dt);
  s.finish();
  return c;
}

json to_json(const RunConfig& c) {
  const sim::SimConfig& sc = c.sim;
  const sim::NoiseModel& n = sc.noise;
  const ad::AdamWConfig& o = c.train.optimizer;
  return {
      {"class", std::string(to_string(c.cls))},
      {"backend", std::string(to_string(c.backend))},
      {"seed", c.seed},
      {"train_scenarios", c.train_scenarios},
      {"test_scenarios", c.test_scenarios},
      {"sim",
       {{"frames", sc.frames},
        {"dt", sc.dt},
        {"num_objects", sc.num_objects},
        {"area_half_extent", sc.area_half_extent},
        {"mix",
         {{"static", sc.mix.static_weight},
          {"constant_velocity", sc.mix.constant_velocity_weight},
          {"constant_acceleration", sc.mix.constant_acceleration_weight},
          {"turn", sc.mix.turn_weight}}},
        {"min_speed", sc.min_speed},
        {"max_speed", sc.max_speed},
        {"max_accel", sc.max_accel},
        {"max_yaw_rate", sc.max_yaw_rate},
        {"appearance_dim", sc.appearance_dim},
        {"noise",
         {{"center_sigma", n.center_sigma},
          {"heading_sigma", n.heading_sigma},
          {"size_sigma", n.size_sigma},
          {"appearance_sigma", n.appearance_sigma},
          {"fp_rate", n.fp_rate},
          {"miss_prob", n.miss_prob},
          {"confidence_noise", n.confidence_noise}}}}},
      {"stt", to_json(c.stt)},
      {"train",
       {{"steps", c.train.steps},
        {"batch_size", c.train.batch_size},
        {"example_stride", c.train.example_stride},
        {"learning_rate", o.learning_rate},
        {"weight_decay", o.weight_decay},
        {"beta1", o.beta1},
        {"beta2", o.beta2},
        {"epsilon", o.epsilon},
        {"warmup_steps", o.warmup_steps},
        {"total_steps", o.total_steps},
        {"final_lr_multiplier", o.final_lr_multiplier}}},
      {"kalman",
       {{"process_noise_accel_sigma", c.kalman.process_noise_accel_sigma},
        {"meas_noise_sigma", c.kalman.meas_noise_sigma},
        {"initial_velocity_sigma", c.kalman.initial_velocity_sigma},
        {"initial_accel_sigma", c.kalman.initial_accel_sigma},
        {"iou_gate", c.kalman.iou_gate}}},
      {"lifecycle",
       {{"creation_score_threshold", c.lifecycle.creation_score_threshold},
        {"max_misses", c.lifecycle.max_misses},
        {"min_confidence", c.lifecycle.min_confidence},
        {"max_track_length", c.lifecycle.max_track_length}}},
      {"eval",
       {{"mota", policy_json(c.eval.mota)},
        {"s_mota", policy_json(c.eval.s_mota)},
        {"vehicle_alpha",
         {{"velocity", threshold(c.eval.vehicle_alpha.velocity)},
          {"acceleration", threshold(c.eval.vehicle_alpha.acceleration)}}},
        {"pedestrian_alpha",
         {{"velocity", threshold(c.eval.pedestrian_alpha.velocity)},
          {"acceleration", threshold(c.eval.pedestrian_alpha.acceleration)}}},
        {"speed",
         {{"static_below", c.eval.speed.static_below},
          {"vehicle_fast_above", c.eval.speed.vehicle_fast_above},
          {"pedestrian_fast_above", c.eval.speed.pedestrian_fast_above}}}}},
  };
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw CliError(kSchema, "config must be a JSON object");
  ClassId cls = ClassId::kVehicle;
  if (j.contains("class")) {
    if (!j.at("class").is_string()) throw CliError(kSchema, "config: 'class' must be a string");
    try {
      cls = class_from_string(j.at("class").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw CliError(kSchema, std::string("config: 'class': ") + e.what());
    }
  }
  RunConfig c = RunConfig::defaults_for(cls);

  Section root(j, "");
  root.get_string("class", [](const std::string&) {});
  root.get_string("backend", [&](const std::string& v) { c.backend = backend_from_string(v); });
  root.get("seed", c.seed);
  root.get("train_scenarios", c.train_scenarios);
  root.get("test_scenarios", c.test_scenarios);
  root.child("sim", [&](Section& s) {
    s.get("frames", c.sim.frames);
    s.get("dt", c.sim.dt);
    s.get("num_objects", c.sim.num_objects);
    s.get("area_half_extent", c.sim.area_half_extent);
    s.child("mix", [&](Section& m) {
      m.get("static", c.sim.mix.static_weight);
      m.get("constant_velocity", c.sim.mix.constant_velocity_weight);
      m.get("constant_acceleration", c.sim.mix.constant_acceleration_weight);
      m.get("turn", c.sim.mix.turn_weight);
    });
    s.get("min_speed", c.sim.min_speed);
    s.get("max_speed", c.sim.max_speed);
    s.get("max_accel", c.sim.max_accel);
    s.get("max_yaw_rate", c.sim.max_yaw_rate);
    s.get("appearance_dim", c.sim.appearance_dim);
    s.child("noise", [&](Section& n) {
      n.get("center_sigma", c.sim.noise.center_sigma);
      n.get("heading_sigma", c.sim.noise.heading_sigma);
      n.get("size_sigma", c.sim.noise.size_sigma);
      n.get("appearance_sigma", c.sim.noise.appearance_sigma);
      n.get("fp_rate", c.sim.noise.fp_rate);
      n.get("miss_prob", c.sim.noise.miss_prob);
      n.get("confidence_noise", c.sim.noise.confidence_noise);
    });
  });
  root.child("stt", [&](Section& s) {
    read_stt(s, c.stt);
    // Derived from the simulator; accepted when consistent so that written configs read back.
    s.get("appearance_dim", c.stt.appearance_dim);
    s.get("motion_dim", c.stt.motion_dim);
    s.get("dt", c.stt.dt);
  });
  root.child("train", [&](Section& s) {
    s.get("steps", c.train.steps);
    s.get("batch_size", c.train.batch_size);
    s.get("example_stride", c.train.example_stride);
    s.get("learning_rate", c.train.optimizer.learning_rate);
    s.get("weight_decay", c.train.optimizer.weight_decay);
    s.get("beta1", c.train.optimizer.beta1);
    s.get("beta2", c.train.optimizer.beta2);
    s.get("epsilon", c.train.optimizer.epsilon);
    s.get("warmup_steps", c.train.optimizer.warmup_steps);
    s.get("total_steps", c.train.optimizer.total_steps);
    s.get("final_lr_multiplier", c.train.optimizer.final_lr_multiplier);
  });
  root.child("kalman", [&](Section& s) {
    s.get("process_noise_accel_sigma", c.kalman.process_noise_accel_sigma);
    s.get("meas_noise_sigma", c.kalman.meas_noise_sigma);
    s.get("initial_velocity_sigma", c.kalman.initial_velocity_sigma);
    s.get("initial_accel_sigma", c.kalman.initial_accel_sigma);
    s.get("iou_gate", c.kalman.iou_gate);
  });
  root.child("lifecycle", [&](Section& s) {
    s.get("creation_score_threshold", c.lifecycle.creation_score_threshold);
    s.get("max_misses", c.lifecycle.max_misses);
    s.get("min_confidence", c.lifecycle.min_confidence);
    s.get("max_track_length", c.lifecycle.max_track_length);
  });
  root.child("eval", [&](Section& s) {
    s.child("mota", [&](Section& p) { read_policy(p, c.eval.mota); });
    s.child("s_mota", [&](Section& p) { read_policy(p, c.eval.s_mota); });
    s.child("vehicle_alpha", [&](Section& a) {
      a.get_threshold("velocity", c.eval.vehicle_alpha.velocity);
      a.get_threshold("acceleration", c.eval.vehicle_alpha.acceleration);
    });
    s.child("pedestrian_alpha", [&](Section& a) {
      a.get_threshold("velocity", c.eval.pedestrian_alpha.velocity);
      a.get_threshold("acceleration", c.eval.pedestrian_alpha.acceleration);
    });
    s.child("speed", [&](Section& a) {
      a.get("static_below", c.eval.speed.static_below);
      a.get("vehicle_fast_above", c.eval.speed.vehicle_fast_above);
      a.get("pedestrian_fast_above", c.eval.speed.pedestrian_fast_above);
    });
  });
  root.finish();

  // Quantities owned by one section and mirrored into another.
  const bool stt_has = j.contains("stt") && j.at("stt").is_object();
  if (!(stt_has && j.at("stt").contains("appearance_dim"))) c.stt.appearance_dim = c.sim.appearance_dim;
  if (!(stt_has && j.at("stt").contains("dt"))) c.stt.dt = c.sim.dt;
  const bool life_has = j.contains("lifecycle") && j.at("lifecycle").contains("max_track_length");
  if (!life_has) c.lifecycle.max_track_length = c.stt.max_track_length;

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(kSchema, std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kMissingFile, "config file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError(kSchema, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace stt::cli
