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

#include "stt/metrics/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stt::metrics {

using nlohmann::json;

void EvalConfig::validate() const {
  mota.validate();
  s_mota.validate();
  for (const ClassThresholds* a : {&vehicle_alpha, &pedestrian_alpha}) {
    if (!(a->velocity >= 0.0) || !(a->acceleration >= 0.0)) {
      throw std::invalid_argument("alpha thresholds must be >= 0");
    }
  }
}

ClassReport& ClassReport::operator+=(const ClassReport& other) {
  if (cls != other.cls) throw std::invalid_argument("cannot merge reports of different classes");
  mota += other.mota;
  s_mota += other.s_mota;
  position += other.position;
  velocity += other.velocity;
  acceleration += other.acceleration;
  return *this;
}

const ClassReport* MetricReport::find(ClassId cls) const {
  for (const ClassReport& c : classes) {
    if (c.cls == cls) return &c;
  }
  return nullptr;
}

MetricReport& MetricReport::operator+=(const MetricReport& other) {
  for (const ClassReport& c : other.classes) {
    bool merged = false;
    for (ClassReport& mine : classes) {
      if (mine.cls == c.cls) {
        mine += c;
        merged = true;
      }
    }
    if (!merged) classes.push_back(c);
  }
  std::sort(classes.begin(), classes.end(),
            [](const ClassReport& a, const ClassReport& b) { return a.cls < b.cls; });
  return *this;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json counts_json(const ClearCounts& c) {
  return {{"gt", c.gt},
          {"predictions", c.predictions},
          {"matches", c.matches},
          {"fp", c.false_positives},
          {"miss", c.misses},
          {"mismatch", c.mismatches},
          {"accuracy", optional_number(c.accuracy())},
          {"fp_pct", optional_number(c.percent_of_gt(c.false_positives))},
          {"miss_pct", optional_number(c.percent_of_gt(c.misses))},
          {"mismatch_pct", optional_number(c.percent_of_gt(c.mismatches))}};
}

ClearCounts counts_from(const json& j) {
  ClearCounts c;
  c.gt = j.at("gt").get<long long>();
  c.predictions = j.at("predictions").get<long long>();
  c.matches = j.at("matches").get<long long>();
  c.false_positives = j.at("fp").get<long long>();
  c.misses = j.at("miss").get<long long>();
  c.mismatches = j.at("mismatch").get<long long>();
  return c;
}

json stats_json(const ErrorStats& s) {
  return {{"count", s.count}, {"sum", s.sum}, {"mean", optional_number(s.mean())}};
}

ErrorStats stats_from(const json& j) {
  return {j.at("count").get<long long>(), j.at("sum").get<double>()};
}

json alpha_json(double alpha) { return std::isinf(alpha) ? json("inf") : json(alpha); }

double alpha_from(const json& j) {
  return j.is_string() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json state_json(const StateErrorStats& s) {
  return {{"static", stats_json(s.buckets[0])},
          {"slow", stats_json(s.buckets[1])},
          {"fast", stats_json(s.buckets[2])},
          {"all", stats_json(s.all)},
          {"alpha", alpha_json(s.alpha)},
          {"large_errors", s.large_errors}};
}

StateErrorStats state_from(const json& j) {
  StateErrorStats s;
  s.buckets[0] = stats_from(j.at("static"));
  s.buckets[1] = stats_from(j.at("slow"));
  s.buckets[2] = stats_from(j.at("fast"));
  s.all = stats_from(j.at("all"));
  s.alpha = alpha_from(j.at("alpha"));
  s.large_errors = j.at("large_errors").get<long long>();
  return s;
}

std::string fmt(const std::optional<double>& v, int precision = 4) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *v;
  return os.str();
}

}  // namespace

json MetricReport::to_json() const {
  json out = {{"persistence", persistence}, {"classes", json::array()}};
  for (const ClassReport& c : classes) {
    out["classes"].push_back({{"class", std::string(to_string(c.cls))},
                              {"mota", counts_json(c.mota)},
                              {"s_mota", counts_json(c.s_mota)},
                              {"motp_position", stats_json(c.position)},
                              {"motp_velocity", state_json(c.velocity)},
                              {"motp_acceleration", state_json(c.acceleration)}});
  }
  return out;
}

MetricReport MetricReport::from_json(const json& j) {
  MetricReport r;
  r.persistence = j.at("persistence").get<bool>();
  for (const json& c : j.at("classes")) {
    ClassReport cr;
    cr.cls = class_from_string(c.at("class").get<std::string>());
    cr.mota = counts_from(c.at("mota"));
    cr.s_mota = counts_from(c.at("s_mota"));
    cr.position = stats_from(c.at("motp_position"));
    cr.velocity = state_from(c.at("motp_velocity"));
    cr.acceleration = state_from(c.at("motp_acceleration"));
    r.classes.push_back(cr);
  }
  return r;
}

void MetricReport::write_csv(std::ostream& out) const {
  out << "class,s_mota,mota,fp_pct,miss_pct,mismatch_pct,motp_position,"
         "motp_velocity_static,motp_velocity_slow,motp_velocity_fast,motp_velocity_all,"
         "large_velocity_errors,motp_acceleration_static,motp_acceleration_slow,"
         "motp_acceleration_fast,motp_acceleration_all,large_acceleration_errors\n";
  for (const ClassReport& c : classes) {
    out << to_string(c.cls) << ',' << fmt(c.s_mota.accuracy(), 6) << ',' << fmt(c.mota.accuracy(), 6)
        << ',' << fmt(c.mota.percent_of_gt(c.mota.false_positives), 4) << ','
        << fmt(c.mota.percent_of_gt(c.mota.misses), 4) << ','
        << fmt(c.mota.percent_of_gt(c.mota.mismatches), 4) << ',' << fmt(c.position.mean(), 6);
    for (const StateErrorStats* s : {&c.velocity, &c.acceleration}) {
      for (const ErrorStats& b : s->buckets) out << ',' << fmt(b.mean(), 6);
      out << ',' << fmt(s->all.mean(), 6) << ',' << s->large_errors;
    }
    out << '\n';
  }
}

void MetricReport::write_table(std::ostream& out) const {
  out << "matching: " << (persistence ? "persistent (CLEAR)" : "per-frame") << '\n';
  for (const ClassReport& c : classes) {
    out << '[' << to_string(c.cls) << "]  GT " << c.mota.gt << "  predictions " << c.mota.predictions
        << '\n';
    out << "  S-MOTA " << fmt(c.s_mota.accuracy()) << "  MOTA " << fmt(c.mota.accuracy())
        << "  FP% " << fmt(c.mota.percent_of_gt(c.mota.false_positives), 2) << "  Miss% "
        << fmt(c.mota.percent_of_gt(c.mota.misses), 2) << "  Mismatch% "
        << fmt(c.mota.percent_of_gt(c.mota.mismatches), 2) << '\n';
    out << "  MOTP position " << fmt(c.position.mean()) << " m\n";
    out << "  " << std::left << std::setw(14) << "state" << std::setw(10) << "static" << std::setw(10)
        << "slow" << std::setw(10) << "fast" << std::setw(10) << "all" << "|err>alpha|\n";
    const std::pair<const char*, const StateErrorStats*> rows[] = {{"velocity", &c.velocity},
                                                                   {"acceleration", &c.acceleration}};
    for (const auto& [name, s] : rows) {
      out << "  " << std::setw(14) << name;
      for (const ErrorStats& b : s->buckets) out << std::setw(10) << fmt(b.mean());
      out << std::setw(10) << fmt(s->all.mean()) << s->large_errors << '\n';
    }
    out << std::right;
  }
}

Evaluator::Evaluator(EvalConfig config) : config_(config) {
  config_.validate();
  for (ClassId cls : {ClassId::kVehicle, ClassId::kPedestrian}) {
    ClassReport& r = classes_[static_cast<std::size_t>(cls)];
    r.cls = cls;
    const ClassThresholds& a = cls == ClassId::kVehicle ? config_.vehicle_alpha : config_.pedestrian_alpha;
    r.velocity.alpha = a.velocity;
    r.acceleration.alpha = a.acceleration;
  }
}

void Evaluator::add_sequence(const std::vector<std::vector<Prediction>>& predictions,
                             const std::vector<std::vector<Label>>& labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("prediction and label sequences have different frame counts");
  }
  ClearAccumulator plain(config_.mota);
  ClearAccumulator stateful(config_.s_mota);
  for (std::size_t f = 0; f < labels.size(); ++f) {
    const auto& preds = predictions[f];
    const auto& gts = labels[f];
    for (const Prediction& p : preds) seen_[static_cast<std::size_t>(p.cls)] = true;
    for (const Label& g : gts) seen_[static_cast<std::size_t>(g.cls)] = true;
    for (const auto& [g, p] : plain.add_frame(preds, gts)) {
      const Label& label = gts[g];
      const Prediction& pred = preds[p];
      ClassReport& r = classes_[static_cast<std::size_t>(label.cls)];
      const sim::SpeedBucket bucket =
          sim::speed_class(label.state.velocity.norm(), label.cls, config_.speed);
      r.position.add((pred.state.position - label.state.position).norm());
      r.velocity.add((pred.state.velocity - label.state.velocity).norm(), bucket);
      r.acceleration.add((pred.state.acceleration - label.state.acceleration).norm(), bucket);
    }
    stateful.add_frame(preds, gts);
  }
  for (ClassId cls : {ClassId::kVehicle, ClassId::kPedestrian}) {
    ClassReport& r = classes_[static_cast<std::size_t>(cls)];
    r.mota += plain.counts(cls);
    r.s_mota += stateful.counts(cls);
  }
}

MetricReport Evaluator::report() const {
  MetricReport out;
  out.persistence = config_.mota.persistence;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    if (seen_[c]) out.classes.push_back(classes_[c]);
  }
  return out;
}

std::vector<std::vector<Label>> labels_of(const sim::Scenario& scenario) {
  std::vector<std::vector<Label>> out(static_cast<std::size_t>(scenario.frames));
  for (const sim::GtTrack& track : scenario.gt_tracks) {
    for (const sim::GtFrame& f : track.frames) {
      out[static_cast<std::size_t>(f.frame)].push_back({track.object_id, track.cls, f.box, f.state});
    }
  }
  return out;
}

}  // namespace stt::metrics
