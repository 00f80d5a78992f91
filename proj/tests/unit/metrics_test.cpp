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

#include "stt/metrics/clear_mot.hpp"
#include "stt/metrics/report.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace stt::metrics {
namespace {

Box7 box_at(double x, double y) { return Box7({x, y, 0.8}, {2.0, 4.5, 1.6}, 0.0); }

Label label(int id, double x, double y, Eigen::Vector2d velocity = Eigen::Vector2d::Zero()) {
  Label l{id, ClassId::kVehicle, box_at(x, y), {}};
  l.state.position = {x, y};
  l.state.velocity = velocity;
  return l;
}

Prediction prediction(int track, double x, double y,
                      Eigen::Vector2d velocity = Eigen::Vector2d::Zero()) {
  Prediction p{track, ClassId::kVehicle, box_at(x, y), {}};
  p.state.position = {x, y};
  p.state.velocity = velocity;
  return p;
}

Prediction perfect(const Label& l, int track) {
  return {track, l.cls, l.box, l.state};
}

TEST(PairCost, IdenticalIsZero) {
  EXPECT_EQ(pair_cost(prediction(0, 1, 1), label(0, 1, 1), MatchingPolicy::s_mota()), 0.0);
}

TEST(PairCost, VelocityGateOnlyUnderStatefulPolicy) {
  // Shifted 0.1 m across the 2 m width: IoU = 1.9 / 2.1 > 0.9.
  const Label l = label(0, 0, 0);
  const Prediction p = prediction(0, 0, 0.1, {2.0, 0.0});
  EXPECT_EQ(pair_cost(p, l, MatchingPolicy::s_mota()), assign::kForbidden);
  EXPECT_NEAR(pair_cost(p, l, MatchingPolicy::mota()), 1.0 - 1.9 / 2.1, 1e-12);
}

TEST(PairCost, GatesAreStrict) {
  MatchingPolicy policy = MatchingPolicy::s_mota();
  const Label l = label(0, 0, 0);
  EXPECT_EQ(pair_cost(prediction(0, 0, 0, {1.0, 0.0}), l, policy), assign::kForbidden);
  EXPECT_NE(pair_cost(prediction(0, 0, 0, {0.999, 0.0}), l, policy), assign::kForbidden);
  policy.vehicle.iou = 1.0;
  EXPECT_EQ(pair_cost(prediction(0, 0, 0), l, policy), assign::kForbidden);
}

TEST(PairCost, ClassesNeverMatch) {
  Prediction p = prediction(0, 0, 0);
  p.cls = ClassId::kPedestrian;
  EXPECT_EQ(pair_cost(p, label(0, 0, 0), MatchingPolicy::mota()), assign::kForbidden);
}

// Three labels and three predictions with a crafted cost structure, checked
// against every feasible partial matching.
TEST(MatchFrame, CraftedMatrixIsOptimal) {
  const std::vector<Label> labels{label(0, 0, 0), label(1, 0, 3), label(2, 0, 6)};
  const std::vector<Prediction> preds{prediction(10, 0, 0.4), prediction(11, 0, 2.4),
                                      prediction(12, 0, 5.2)};
  const MatchingPolicy policy{{0.3, kNoGate, kNoGate}, {0.5, kNoGate, kNoGate}, false};
  const FrameMatches m = match_frame(preds, labels, policy, {});

  std::vector<std::size_t> perm{0, 1, 2};
  std::size_t best_n = 0;
  double best_cost = 0;
  do {
    std::size_t n = 0;
    double cost = 0;
    for (std::size_t g = 0; g < 3; ++g) {
      const double c = pair_cost(preds[perm[g]], labels[g], policy);
      if (c == assign::kForbidden) continue;
      ++n;
      cost += c;
    }
    if (n > best_n || (n == best_n && cost < best_cost)) {
      best_n = n;
      best_cost = cost;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  double cost = 0;
  for (const auto& [g, p] : m.pairs) cost += pair_cost(preds[p], labels[g], policy);
  EXPECT_EQ(m.pairs.size(), best_n);
  EXPECT_NEAR(cost, best_cost, 1e-12);
}

TEST(MatchFrame, PersistenceKeepsFeasiblePreviousPair) {
  const std::vector<Label> labels{label(0, 0, 0)};
  // Track 1 overlaps better, but track 0 was matched last frame and is still feasible.
  const std::vector<Prediction> preds{prediction(0, 0.8, 0), prediction(1, 0, 0)};
  const Correspondence previous{{0, 0}};
  MatchingPolicy policy = MatchingPolicy::mota();
  policy.vehicle.iou = 0.5;
  EXPECT_EQ(match_frame(preds, labels, policy, previous).correspondence.at(0), 0);
  policy.persistence = false;
  EXPECT_EQ(match_frame(preds, labels, policy, previous).correspondence.at(0), 1);
}

TEST(Clear, HandEnumeratedThreeFrames) {
  // Objects 0 and 1. Frame 1: both tracked. Frame 2: object 1 missed.
  // Frame 3: object 1 picked up by a new track.
  const std::vector<std::vector<Label>> labels{
      {label(0, 0, 0), label(1, 10, 0)},
      {label(0, 0, 1), label(1, 10, 1)},
      {label(0, 0, 2), label(1, 10, 2)}};
  const std::vector<std::vector<Prediction>> preds{
      {prediction(100, 0, 0), prediction(101, 10, 0)},
      {prediction(100, 0, 1)},
      {prediction(100, 0, 2), prediction(102, 10, 2)}};
  ClearAccumulator acc(MatchingPolicy::mota());
  for (std::size_t f = 0; f < 3; ++f) acc.add_frame(preds[f], labels[f]);
  const ClearCounts& c = acc.counts(ClassId::kVehicle);
  EXPECT_EQ(c.gt, 6);
  EXPECT_EQ(c.false_positives, 0);
  EXPECT_EQ(c.misses, 1);
  EXPECT_EQ(c.mismatches, 1);
  ASSERT_TRUE(c.accuracy().has_value());
  EXPECT_DOUBLE_EQ(*c.accuracy(), 1.0 - 2.0 / 6.0);
  EXPECT_NEAR(*c.accuracy(), 0.667, 5e-4);
}

TEST(Clear, SwapAcrossFramesIsTwoMismatches) {
  const std::vector<Label> labels{label(0, 0, 0), label(1, 10, 0)};
  ClearAccumulator acc(MatchingPolicy::mota());
  acc.add_frame(std::vector<Prediction>{prediction(1, 0, 0), prediction(2, 10, 0)}, labels);
  acc.add_frame(std::vector<Prediction>{prediction(2, 0, 0), prediction(1, 10, 0)}, labels);
  EXPECT_EQ(acc.counts(ClassId::kVehicle).mismatches, 2);
}

TEST(Clear, EmptyGroundTruthIsAbsent) {
  ClearCounts c;
  c.false_positives = 3;
  EXPECT_FALSE(c.accuracy().has_value());
  EXPECT_FALSE(c.percent_of_gt(3).has_value());
}

TEST(Clear, PerfectTrackerScoresOne) {
  sim::SimConfig sc;
  sc.frames = 50;
  const sim::Scenario s = sim::generate(sc, 3);
  const auto labels = labels_of(s);
  std::vector<std::vector<Prediction>> preds;
  for (const auto& frame : labels) {
    preds.emplace_back();
    for (const Label& l : frame) preds.back().push_back(perfect(l, 1000 + l.object_id));
  }
  Evaluator ev(EvalConfig{});
  ev.add_sequence(preds, labels);
  const MetricReport report = ev.report();
  const ClassReport* r = report.find(ClassId::kVehicle);
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(*r->mota.accuracy(), 1.0);
  EXPECT_EQ(*r->s_mota.accuracy(), 1.0);
  EXPECT_EQ(r->mota.false_positives + r->mota.misses + r->mota.mismatches, 0);
  for (const ErrorStats& b : r->velocity.buckets) {
    if (b.count > 0) {
      EXPECT_EQ(*b.mean(), 0.0);
    }
  }
  EXPECT_EQ(r->velocity.large_errors, 0);
  EXPECT_EQ(r->acceleration.large_errors, 0);
  EXPECT_EQ(*r->position.mean(), 0.0);
}

TEST(Clear, InfiniteStateGatesEqualBoxOnly) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    sim::SimConfig sc;
    sc.frames = 40;
    const sim::Scenario s = sim::generate(sc, seed);
    std::vector<std::vector<Prediction>> preds;
    for (const auto& row : s.detections) {
      preds.emplace_back();
      for (const auto& d : row) {
        Prediction p{d.detection.detection_id, d.detection.cls, d.detection.box, {}};
        p.state.velocity = {3 * n(rng), 3 * n(rng)};
        preds.back().push_back(p);
      }
    }
    EvalConfig cfg;
    cfg.s_mota.vehicle.velocity = kNoGate;
    cfg.s_mota.vehicle.acceleration = kNoGate;
    Evaluator ev(cfg);
    ev.add_sequence(preds, labels_of(s));
    const MetricReport report = ev.report();
    const ClassReport* r = report.find(ClassId::kVehicle);
    EXPECT_EQ(r->s_mota, r->mota);
  }
}

TEST(StateError, SingleMatchVelocityError) {
  const std::vector<std::vector<Label>> labels{{label(0, 0, 0)}};
  const std::vector<std::vector<Prediction>> preds{{prediction(0, 0, 0, {1.0, 0.0})}};
  for (double alpha : {0.5, 1.0}) {
    EvalConfig cfg;
    cfg.vehicle_alpha.velocity = alpha;
    Evaluator ev(cfg);
    ev.add_sequence(preds, labels);
    const MetricReport report = ev.report();
    const ClassReport* r = report.find(ClassId::kVehicle);
    EXPECT_EQ(*r->velocity.buckets[0].mean(), 1.0);
    EXPECT_EQ(r->velocity.large_errors, alpha < 1.0 ? 1 : 0);
  }
}

TEST(StateError, BucketsFollowGroundTruthSpeed) {
  const std::vector<std::vector<Label>> labels{
      {label(0, 0, 0), label(1, 10, 0, {1.0, 0.0}), label(2, 20, 0, {0.0, 8.0})}};
  const std::vector<std::vector<Prediction>> preds{
      {prediction(0, 0, 0, {0.5, 0}), prediction(1, 10, 0), prediction(2, 20, 0)}};
  Evaluator ev(EvalConfig{});
  ev.add_sequence(preds, labels);
  const MetricReport report = ev.report();
  const ClassReport* r = report.find(ClassId::kVehicle);
  EXPECT_EQ(*r->velocity.buckets[0].mean(), 0.5);
  EXPECT_EQ(*r->velocity.buckets[1].mean(), 1.0);
  EXPECT_EQ(*r->velocity.buckets[2].mean(), 8.0);
  EXPECT_NEAR(*r->velocity.all.mean(), 9.5 / 3, 1e-12);
}

TEST(StateError, PositionMatchesClassicMotp) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    sim::SimConfig sc;
    sc.frames = 60;
    const sim::Scenario s = sim::generate(sc, 40 + seed);
    const auto labels = labels_of(s);
    std::vector<std::vector<Prediction>> preds;
    for (const auto& row : s.detections) {
      preds.emplace_back();
      for (const auto& d : row) {
        Prediction p{d.detection.detection_id, d.detection.cls, d.detection.box, {}};
        p.state.position = d.detection.box.center().head<2>();
        preds.back().push_back(p);
      }
    }
    // Classic MOTP: mean center distance over the matches of the box-only policy.
    ClearAccumulator acc(MatchingPolicy::mota());
    double total = 0.0;
    long long n = 0;
    for (std::size_t f = 0; f < labels.size(); ++f) {
      for (const auto& [g, p] : acc.add_frame(preds[f], labels[f])) {
        total += (preds[f][p].box.center().head<2>() - labels[f][g].box.center().head<2>()).norm();
        ++n;
      }
    }
    Evaluator ev(EvalConfig{});
    ev.add_sequence(preds, labels);
    const MetricReport report = ev.report();
    const ClassReport* r = report.find(ClassId::kVehicle);
    ASSERT_GT(n, 0);
    EXPECT_NEAR(*r->position.mean(), total / static_cast<double>(n), 1e-12);
  }
}

TEST(Stateful, ZeroVelocityTrackerIsPenalized) {
  sim::SimConfig sc;
  sc.frames = 60;
  sc.mix = {0.0, 1.0, 0.0, 0.0};
  sc.min_speed = 5.0;
  const sim::Scenario s = sim::generate(sc, 4);
  const auto labels = labels_of(s);
  std::vector<std::vector<Prediction>> preds;
  for (const auto& frame : labels) {
    preds.emplace_back();
    for (const Label& l : frame) {
      Prediction p = perfect(l, l.object_id);
      p.state.velocity.setZero();
      p.state.acceleration.setZero();
      preds.back().push_back(p);
    }
  }
  Evaluator ev(EvalConfig{});
  ev.add_sequence(preds, labels);
  const MetricReport report = ev.report();
  const ClassReport* r = report.find(ClassId::kVehicle);
  EXPECT_LT(*r->s_mota.accuracy(), *r->mota.accuracy());
  EXPECT_EQ(r->s_mota.matches, 0);
}

TEST(Stateful, TighterGatesNeverAddMatches) {
  sim::SimConfig sc;
  sc.frames = 40;
  const sim::Scenario s = sim::generate(sc, 6);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto labels = labels_of(s);
  std::vector<std::vector<Prediction>> preds;
  for (const auto& frame : labels) {
    preds.emplace_back();
    for (const Label& l : frame) {
      Prediction p = perfect(l, l.object_id);
      p.state.velocity += Eigen::Vector2d(n(rng), n(rng));
      preds.back().push_back(p);
    }
  }
  long long last = std::numeric_limits<long long>::max();
  for (double gate : {kNoGate, 4.0, 2.0, 1.0, 0.5, 0.25, 1e-9}) {
    EvalConfig cfg;
    cfg.s_mota.vehicle.velocity = gate;
    Evaluator ev(cfg);
    ev.add_sequence(preds, labels);
    const long long m = ev.report().find(ClassId::kVehicle)->s_mota.matches;
    EXPECT_LE(m, last) << gate;
    last = m;
  }
  EXPECT_EQ(last, 0);
}

TEST(Report, JsonRoundTripAndSum) {
  const std::vector<std::vector<Label>> labels{{label(0, 0, 0)}, {label(0, 0, 1)}};
  const std::vector<std::vector<Prediction>> preds{{prediction(5, 0, 0, {0.3, 0})}, {}};
  Evaluator ev(EvalConfig{});
  ev.add_sequence(preds, labels);
  const MetricReport r = ev.report();
  EXPECT_EQ(MetricReport::from_json(r.to_json()).classes, r.classes);
  MetricReport twice = r;
  twice += r;
  EXPECT_EQ(twice.find(ClassId::kVehicle)->mota.gt, 4);
  std::ostringstream table, csv;
  r.write_table(table);
  r.write_csv(csv);
  EXPECT_NE(table.str().find("S-MOTA"), std::string::npos);
  EXPECT_FALSE(csv.str().empty());
}

TEST(Report, RejectsMismatchedSequenceLengths) {
  Evaluator ev(EvalConfig{});
  EXPECT_THROW(ev.add_sequence({{}, {}}, {{}}), std::invalid_argument);
}

}  // namespace
}  // namespace stt::metrics
