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

#include "stt/model/trainer.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

namespace stt::model {

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("train.steps must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("train.batch_size must be >= 1");
  if (example_stride < 1) throw std::invalid_argument("train.example_stride must be >= 1");
  optimizer.validate();
}

TrainingDiverged::TrainingDiverged(int step)
    : std::runtime_error("training diverged: non-finite loss at step " + std::to_string(step)),
      step_(step) {}

std::vector<TrainLogRow> train(SttModel& model, std::span<const TrainingExample> examples,
                               const TrainConfig& config, std::uint64_t seed,
                               const std::function<void(const TrainLogRow&)>& on_step) {
  config.validate();
  if (examples.empty()) throw std::invalid_argument("train: empty dataset");

  ad::AdamWConfig schedule = config.optimizer;
  if (schedule.total_steps == 0) schedule.total_steps = config.steps;
  ad::AdamW optimizer(model.parameters(), schedule);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, examples.size() - 1);
  const double inv_batch = 1.0 / config.batch_size;

  std::vector<TrainLogRow> log;
  log.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 1; step <= config.steps; ++step) {
    optimizer.zero_grad();
    TrainLogRow row{.step = step};
    for (int b = 0; b < config.batch_size; ++b) {
      const LossTerms terms = model.loss(examples[pick(rng)]);
      const double total = terms.total.item();
      if (!std::isfinite(total)) throw TrainingDiverged(step);
      ad::scale(terms.total, inv_batch).backward();
      row.association += terms.association * inv_batch;
      row.state_current += terms.state_current * inv_batch;
      row.state_previous += terms.state_previous * inv_batch;
      row.total += total * inv_batch;
    }
    optimizer.step(step);
    for (const ad::Var& p : model.parameters()) {
      if (!p.value().all_finite()) throw TrainingDiverged(step);
    }
    if (on_step) on_step(row);
    log.push_back(row);
  }
  return log;
}

void write_train_log_csv(std::ostream& out, std::span<const TrainLogRow> rows) {
  out << "step,L_d,L_s_t,L_s_prev,total\n";
  out.precision(9);
  for (const TrainLogRow& r : rows) {
    out << r.step << ',' << r.association << ',' << r.state_current << ',' << r.state_previous
        << ',' << r.total << '\n';
  }
}

TrainLogRow mean_loss(const SttModel& model, std::span<const TrainingExample> examples) {
  ad::NoGradGuard no_grad;
  TrainLogRow row;
  if (examples.empty()) return row;
  for (const TrainingExample& ex : examples) {
    const LossTerms terms = model.loss(ex);
    row.association += terms.association;
    row.state_current += terms.state_current;
    row.state_previous += terms.state_previous;
    row.total += terms.total.item();
  }
  const double n = static_cast<double>(examples.size());
  row.association /= n;
  row.state_current /= n;
  row.state_previous /= n;
  row.total /= n;
  return row;
}

AssociationAccuracy evaluate_association(const SttModel& model,
                                         std::span<const TrainingExample> examples) {
  ad::NoGradGuard no_grad;
  AssociationAccuracy acc;
  for (const TrainingExample& ex : examples) {
    std::size_t positive = ex.labels.size();
    for (std::size_t i = 0; i < ex.labels.size(); ++i) {
      if (ex.labels[i] == 1) positive = i;
    }
    if (positive == ex.labels.size()) continue;
    const ad::Var query = model.track_query(ex.history);
    const Anchor anchor = Anchor::of(ex.history.back());
    const std::vector<std::uint8_t> mask(ex.context.size(), 1);
    const InteractionOutput out = model.interact(query, model.encode(ex.context, anchor), mask);
    const ad::Tensor& logits = out.logits.value();
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
      if (logits[i] > logits[best]) best = i;
    }
    ++acc.examples;
    if (best == positive) ++acc.top1;
  }
  return acc;
}

}  // namespace stt::model
