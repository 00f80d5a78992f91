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
#include "stt/model/network.hpp"
#include "stt/model/trainer.hpp"

#include "gradcheck.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace stt::model {
namespace {

SttConfig tiny() {
  SttConfig c;
  c.query_dim = 8;
  c.encoder_hidden = 16;
  c.ffn_hidden = 16;
  c.decoder_hidden = 16;
  c.pair_hidden = 8;
  c.max_track_length = 3;
  c.max_context = 4;
  return c;
}

Detection detection(std::mt19937_64& rng, double x, double y, int frame, int id) {
  std::normal_distribution<double> n(0.0, 1.0);
  Detection d;
  d.box = Box7({x, y, 0.8}, {1.9 + 0.1 * n(rng), 4.5 + 0.1 * n(rng), 1.6}, 0.3 * n(rng));
  d.appearance.resize(8);
  for (double& a : d.appearance) a = n(rng);
  d.motion = {n(rng), n(rng)};
  d.confidence = 0.7 + 0.1 * std::tanh(n(rng));
  d.frame_index = frame;
  d.detection_id = id;
  return d;
}

TrainingExample example(std::uint64_t seed, std::size_t history, std::size_t context) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3, 3);
  TrainingExample ex;
  for (std::size_t i = 0; i < history; ++i) {
    ex.history.push_back(detection(rng, 10 + 0.8 * i, -4 + 0.1 * i, static_cast<int>(i), 0));
  }
  const int frame = static_cast<int>(history);
  for (std::size_t i = 0; i < context; ++i) {
    ex.context.push_back(detection(rng, 10 + 0.8 * history + u(rng), -4 + u(rng), frame,
                                   static_cast<int>(i)));
    ex.labels.push_back(i == 1 ? 1 : 0);
  }
  ex.frame = frame;
  ex.target_current.position = {10 + 0.8 * history, -4 + 0.1 * history};
  ex.target_current.velocity = {8, 1};
  ex.target_current.acceleration = {0.5, -0.2};
  ex.target_previous.position = ex.history.back().box.center().head<2>();
  ex.target_previous.velocity = {8, 1};
  ex.target_previous.acceleration = {0.5, -0.2};
  return ex;
}

ad::Var& param(SttModel& model, const std::string& name) {
  for (auto& entry : const_cast<std::vector<std::pair<std::string, ad::Var>>&>(model.named_parameters())) {
    if (entry.first == name) return entry.second;
  }
  throw std::out_of_range(name);
}

// Makes a head emit a constant normalized output regardless of its input.
void pin_output(SttModel& model, const std::string& head, const ad::Tensor& value) {
  param(model, head + ".w2").mutable_value().fill(0.0);
  param(model, head + ".b2").mutable_value() = value;
}

ad::Tensor normalized(const SttConfig& c, const StateVector& s, const Anchor& anchor) {
  const Eigen::Vector2d rel = s.position - anchor.position;
  return ad::Tensor(1, 6, {rel.x() / c.position_scale, rel.y() / c.position_scale,
                           s.velocity.x() / c.velocity_scale, s.velocity.y() / c.velocity_scale,
                           s.acceleration.x() / c.acceleration_scale,
                           s.acceleration.y() / c.acceleration_scale});
}

TEST(Encoder, IdenticalDetectionsEmbedIdentically) {
  const SttModel model(tiny(), 1);
  std::mt19937_64 rng(2);
  const Detection d = detection(rng, 1, 2, 0, 0);
  const Anchor anchor{{0.5, 0.5}, 0};
  const std::vector<Detection> twice{d, d};
  const ad::Tensor e = model.encode(twice, anchor).value();
  for (std::size_t c = 0; c < e.cols(); ++c) EXPECT_EQ(e(0, c), e(1, c));
  EXPECT_EQ(model.encode_detection(d, anchor).value(), model.encode_detection(d, anchor).value());
}

TEST(Encoder, FeatureWidthFollowsConfig) {
  const SttModel model(tiny(), 1);
  std::mt19937_64 rng(2);
  const Detection d = detection(rng, 1, 2, 0, 0);
  EXPECT_EQ(model.detection_features(d, Anchor{}).size(),
            static_cast<std::size_t>(tiny().feature_dim()));
  Detection wrong = d;
  wrong.appearance.pop_back();
  EXPECT_THROW(model.detection_features(wrong, Anchor{}), std::invalid_argument);
}

TEST(TemporalFusion, PaddingLayoutDoesNotMatter) {
  const SttModel model(tiny(), 3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  const std::size_t q = 8;
  ad::Tensor rows(2, q);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = n(rng);

  const std::vector<int> compact_slots{1, 0};
  const std::vector<std::uint8_t> compact_mask{1, 1};
  const ad::Tensor compact =
      model.temporal_fuse(ad::constant(rows), compact_slots, compact_mask).value();

  // Same two rows with garbage padding interleaved.
  ad::Tensor padded(3, q);
  for (std::size_t c = 0; c < q; ++c) {
    padded(0, c) = 100.0 * n(rng);
    padded(1, c) = rows(0, c);
    padded(2, c) = rows(1, c);
  }
  const std::vector<int> padded_slots{2, 1, 0};
  const std::vector<std::uint8_t> padded_mask{0, 1, 1};
  const ad::Tensor out =
      model.temporal_fuse(ad::constant(padded), padded_slots, padded_mask).value();
  for (std::size_t c = 0; c < q; ++c) EXPECT_NEAR(out[c], compact[c], 1e-6);
}

TEST(TemporalFusion, SingleEntryIgnoresPadding) {
  const SttModel model(tiny(), 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  ad::Tensor a(3, 8), b(3, 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = n(rng);
    b[i] = n(rng);
  }
  for (std::size_t c = 0; c < 8; ++c) b(2, c) = a(2, c);
  const std::vector<int> slots{2, 1, 0};
  const std::vector<std::uint8_t> mask{0, 0, 1};
  EXPECT_EQ(model.temporal_fuse(ad::constant(a), slots, mask).value(),
            model.temporal_fuse(ad::constant(b), slots, mask).value());
}

TEST(Context, EmptyAndSingleton) {
  std::mt19937_64 rng(6);
  StateVector at;
  at.position = {5, 5};
  const std::vector<Detection> far{detection(rng, 50, 50, 0, 0)};
  EXPECT_TRUE(select_context(at, far, 5.0, 20).empty());
  const std::vector<Detection> one{detection(rng, 5, 5, 0, 0), detection(rng, 40, 5, 0, 1)};
  EXPECT_EQ(select_context(at, one, 5.0, 20), (std::vector<std::size_t>{0}));
}

TEST(Context, NearestKMatchFullSort) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.4, 3.4);
  StateVector at;
  at.position = {1, -1};
  std::vector<Detection> dets;
  for (int i = 0; i < 30; ++i) dets.push_back(detection(rng, 1 + u(rng), -1 + u(rng), 0, i));
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  auto dist = [&](std::size_t i) { return (dets[i].box.center().head<2>() - at.position).norm(); };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
  order.resize(20);
  EXPECT_EQ(select_context(at, dets, 5.0, 20), order);
}

TEST(Interaction, OnlyLiveSlotsScore) {
  const SttModel model(tiny(), 8);
  const TrainingExample ex = example(9, 3, 3);
  const Anchor anchor = Anchor::of(ex.history.back());
  const std::vector<std::uint8_t> mask{0, 1, 0};
  const InteractionOutput out =
      model.interact(model.track_query(ex.history), model.encode(ex.context, anchor), mask);
  EXPECT_EQ(out.scores.value()[0], 0.0);
  EXPECT_EQ(out.scores.value()[2], 0.0);
  EXPECT_EQ(out.logits.value()[0], 0.0);
  EXPECT_GT(out.scores.value()[1], 0.0);
}

TEST(Loss, UndecidedScoreWithPerfectStatesIsGammaLog2) {
  SttModel model(SttConfig{}, 10);
  TrainingExample ex = example(11, 4, 1);
  ex.labels = {1};
  const Anchor anchor = Anchor::of(ex.history.back());
  pin_output(model, "tdi.pair", ad::Tensor(1, 1, 0.0));
  pin_output(model, "tsd", normalized(model.config(), ex.target_previous, anchor));
  pin_output(model, "tdi.state", normalized(model.config(), ex.target_current, anchor));
  const LossTerms terms = model.loss(ex);
  EXPECT_NEAR(terms.total.item(), 10.0 * std::log(2.0), 1e-9);
  EXPECT_NEAR(terms.total.item(), 6.931, 5e-4);
}

TEST(Loss, ConfidentCorrectScoresWithPerfectStatesVanish) {
  SttModel model(SttConfig{}, 10);
  TrainingExample ex = example(11, 4, 1);
  ex.labels = {1};
  const Anchor anchor = Anchor::of(ex.history.back());
  pin_output(model, "tdi.pair", ad::Tensor(1, 1, 60.0));
  pin_output(model, "tsd", normalized(model.config(), ex.target_previous, anchor));
  pin_output(model, "tdi.state", normalized(model.config(), ex.target_current, anchor));
  EXPECT_LT(model.loss(ex).total.item(), 1e-12);
}

TEST(Loss, StateTermIsWeightedL1InPhysicalUnits) {
  SttModel model(SttConfig{}, 10);
  TrainingExample ex = example(11, 2, 2);
  const Anchor anchor = Anchor::of(ex.history.back());
  pin_output(model, "tsd", normalized(model.config(), ex.target_previous, anchor));
  StateVector off = ex.target_current;
  off.position.x() += 0.3;
  off.velocity.y() -= 2.0;
  off.acceleration.x() += 0.1;
  pin_output(model, "tdi.state", normalized(model.config(), off, anchor));
  const LossTerms terms = model.loss(ex);
  EXPECT_NEAR(terms.state_current, 0.3 + 2.0 + 10 * 0.1, 1e-9);
  EXPECT_NEAR(terms.state_previous, 0.0, 1e-9);
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  const SttModel model(tiny(), 12);
  const TrainingExample ex = example(13, 3, 4);
  const testing::GradCheckResult r =
      testing::gradcheck(model.parameters(), [&] { return model.loss(ex).total; });
  EXPECT_LE(r.worst, 1e-4) << model.named_parameters()[r.worst_param].first;
}

TEST(Model, TranslationEquivariance) {
  const SttModel model(SttConfig{}, 14);
  const TrainingExample ex = example(15, 5, 3);
  const Eigen::Vector3d shift(123.4, -56.7, 0.0);
  TrainingExample moved = ex;
  for (Detection& d : moved.history) d.box = d.box.with_center(d.box.center() + shift);
  for (Detection& d : moved.context) d.box = d.box.with_center(d.box.center() + shift);

  auto run = [&](const TrainingExample& e) {
    const Anchor anchor = Anchor::of(e.history.back());
    const ad::Var q = model.track_query(e.history);
    const std::vector<std::uint8_t> mask(e.context.size(), 1);
    const InteractionOutput out = model.interact(q, model.encode(e.context, anchor), mask);
    return std::make_tuple(model.to_state(model.decode_state(q).value(), anchor),
                           model.to_state(out.state.value(), anchor), out.scores.value());
  };
  const auto [prev_a, cur_a, scores_a] = run(ex);
  const auto [prev_b, cur_b, scores_b] = run(moved);
  for (const auto& [a, b] : {std::pair{prev_a, prev_b}, std::pair{cur_a, cur_b}}) {
    EXPECT_LT((b.position - a.position - shift.head<2>()).norm(), 1e-5);
    EXPECT_LT((b.velocity - a.velocity).norm(), 1e-5);
    EXPECT_LT((b.acceleration - a.acceleration).norm(), 1e-5);
  }
  for (std::size_t i = 0; i < scores_a.size(); ++i) EXPECT_NEAR(scores_a[i], scores_b[i], 1e-5);
}

TEST(Model, SameSeedSameParameters) {
  const SttModel a(tiny(), 21), b(tiny(), 21), c(tiny(), 22);
  ASSERT_EQ(a.named_parameters().size(), b.named_parameters().size());
  bool any_differs = false;
  for (std::size_t i = 0; i < a.named_parameters().size(); ++i) {
    EXPECT_EQ(a.named_parameters()[i].second.value(), b.named_parameters()[i].second.value());
    any_differs |= a.named_parameters()[i].second.value() != c.named_parameters()[i].second.value();
  }
  EXPECT_TRUE(any_differs);
}

TEST(Model, CheckpointRoundTrip) {
  const SttModel trained(tiny(), 30);
  std::stringstream buf;
  ad::write_checkpoint(buf, trained.to_checkpoint("{}"));
  SttModel fresh(tiny(), 31);
  fresh.load(ad::read_checkpoint(buf));
  const TrainingExample ex = example(32, 3, 2);
  EXPECT_NEAR(fresh.loss(ex).total.item(), trained.loss(ex).total.item(), 1e-4);
}

TEST(Model, CheckpointShapeMismatchIsRejected) {
  const SttModel small(tiny(), 30);
  SttModel big(SttConfig{}, 30);
  EXPECT_THROW(big.load(small.to_checkpoint("{}")), ad::CheckpointError);
}

TEST(Config, RejectsInvalid) {
  SttConfig c = tiny();
  c.heads = 3;
  EXPECT_THROW(SttModel(c, 1), std::invalid_argument);
  c = tiny();
  c.max_track_length = 0;
  EXPECT_THROW(SttModel(c, 1), std::invalid_argument);
}

TEST(Dataset, ExamplesAreWellFormed) {
  sim::SimConfig sc;
  sc.frames = 40;
  const sim::Scenario scenario = sim::generate(sc, 5);
  const SttConfig c;
  const std::vector<TrainingExample> examples = build_examples(scenario, c, 6);
  ASSERT_FALSE(examples.empty());
  std::size_t positives = 0;
  for (const TrainingExample& ex : examples) {
    ASSERT_NO_THROW(ex.validate(c));
    ASSERT_LE(ex.history.size(), static_cast<std::size_t>(c.max_track_length));
    ASSERT_LE(ex.context.size(), static_cast<std::size_t>(c.max_context));
    for (const Detection& d : ex.history) ASSERT_LT(d.frame_index, ex.frame);
    for (const Detection& d : ex.context) ASSERT_EQ(d.frame_index, ex.frame);
    positives += std::count(ex.labels.begin(), ex.labels.end(), 1);
  }
  // Misses and the context radius leave some examples without a positive.
  EXPECT_GT(positives, examples.size() * 8 / 10);
  const auto again = build_examples(scenario, c, 6);
  ASSERT_EQ(again.size(), examples.size());
  for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i].history, examples[i].history);
}

TEST(Dataset, StrideThinsExamples) {
  sim::SimConfig sc;
  sc.frames = 40;
  const sim::Scenario scenario = sim::generate(sc, 5);
  const auto all = build_examples(scenario, SttConfig{}, 6, true, 1);
  const auto thin = build_examples(scenario, SttConfig{}, 6, true, 4);
  EXPECT_LT(thin.size(), all.size() / 3);
  EXPECT_GT(thin.size(), all.size() / 5);
}

TEST(Training, DeterministicAndDecreasing) {
  std::vector<TrainingExample> data;
  for (std::uint64_t s = 0; s < 16; ++s) data.push_back(example(100 + s, 3, 4));
  TrainConfig tc;
  tc.steps = 40;
  tc.batch_size = 8;
  SttModel a(tiny(), 40), b(tiny(), 40);
  const TrainLogRow before = mean_loss(a, data);
  train(a, data, tc, 41);
  train(b, data, tc, 41);
  for (std::size_t i = 0; i < a.named_parameters().size(); ++i) {
    ASSERT_EQ(a.named_parameters()[i].second.value(), b.named_parameters()[i].second.value());
  }
  EXPECT_LT(mean_loss(a, data).total, before.total);
}

TEST(Training, LogHasOneRowPerStep) {
  std::vector<TrainingExample> data{example(1, 2, 2)};
  TrainConfig tc;
  tc.steps = 5;
  tc.batch_size = 2;
  SttModel m(tiny(), 1);
  int seen = 0;
  const auto log = train(m, data, tc, 2, [&](const TrainLogRow&) { ++seen; });
  EXPECT_EQ(log.size(), 5u);
  EXPECT_EQ(seen, 5);
  std::ostringstream csv;
  write_train_log_csv(csv, log);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "step,L_d,L_s_t,L_s_prev,total");
  EXPECT_THROW(train(m, {}, tc, 2), std::invalid_argument);
}

}  // namespace
}  // namespace stt::model
