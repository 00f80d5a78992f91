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

#include "stt/core/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace stt::metrics {

MatchingPolicy MatchingPolicy::mota() { return MatchingPolicy{}; }

MatchingPolicy MatchingPolicy::s_mota() {
  MatchingPolicy p;
  p.vehicle.velocity = 1.0;
  p.vehicle.acceleration = 1.0;
  p.pedestrian.velocity = 0.5;
  p.pedestrian.acceleration = 0.5;
  return p;
}

void MatchingPolicy::validate() const {
  for (const ClassThresholds* t : {&vehicle, &pedestrian}) {
    if (!(t->iou >= 0.0 && t->iou < 1.0)) throw std::invalid_argument("iou threshold must be in [0, 1)");
    if (!(t->velocity > 0.0) || !(t->acceleration > 0.0)) {
      throw std::invalid_argument("state thresholds must be positive (inf disables gating)");
    }
  }
}

double pair_cost(const Prediction& prediction, const Label& label, const MatchingPolicy& policy) {
  if (prediction.cls != label.cls) return assign::kForbidden;
  const ClassThresholds& t = policy.for_class(label.cls);
  if (!((prediction.state.velocity - label.state.velocity).norm() < t.velocity)) {
    return assign::kForbidden;
  }
  if (!((prediction.state.acceleration - label.state.acceleration).norm() < t.acceleration)) {
    return assign::kForbidden;
  }
  const double iou = bev_iou(prediction.box, label.box);
  if (!(iou > t.iou)) return assign::kForbidden;
  return 1.0 - iou;
}

FrameMatches match_frame(std::span<const Prediction> predictions, std::span<const Label> labels,
                         const MatchingPolicy& policy, const Correspondence& previous) {
  FrameMatches out;
  std::vector<bool> label_used(labels.size(), false);
  std::vector<bool> pred_used(predictions.size(), false);

  if (policy.persistence) {
    for (std::size_t g = 0; g < labels.size(); ++g) {
      const auto it = previous.find(labels[g].object_id);
      if (it == previous.end()) continue;
      for (std::size_t p = 0; p < predictions.size(); ++p) {
        if (pred_used[p] || predictions[p].track_id != it->second) continue;
        if (pair_cost(predictions[p], labels[g], policy) != assign::kForbidden) {
          out.pairs.emplace_back(g, p);
          label_used[g] = true;
          pred_used[p] = true;
        }
        break;
      }
    }
  }

  std::vector<std::size_t> free_labels, free_preds;
  for (std::size_t g = 0; g < labels.size(); ++g) {
    if (!label_used[g]) free_labels.push_back(g);
  }
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    if (!pred_used[p]) free_preds.push_back(p);
  }
  assign::CostMatrix costs(free_labels.size(), free_preds.size());
  for (std::size_t i = 0; i < free_labels.size(); ++i) {
    for (std::size_t j = 0; j < free_preds.size(); ++j) {
      costs.set(i, j, pair_cost(predictions[free_preds[j]], labels[free_labels[i]], policy));
    }
  }
  for (const auto& [i, j] : assign::solve(costs)) {
    out.pairs.emplace_back(free_labels[static_cast<std::size_t>(i)], free_preds[static_cast<std::size_t>(j)]);
  }

  std::sort(out.pairs.begin(), out.pairs.end());
  for (const auto& [g, p] : out.pairs) out.correspondence[labels[g].object_id] = predictions[p].track_id;
  return out;
}

ClearCounts& ClearCounts::operator+=(const ClearCounts& other) {
  gt += other.gt;
  predictions += other.predictions;
  matches += other.matches;
  false_positives += other.false_positives;
  misses += other.misses;
  mismatches += other.mismatches;
  return *this;
}

std::optional<double> ClearCounts::accuracy() const {
  if (gt == 0) return std::nullopt;
  return 1.0 - static_cast<double>(false_positives + misses + mismatches) / static_cast<double>(gt);
}

std::optional<double> ClearCounts::percent_of_gt(long long count) const {
  if (gt == 0) return std::nullopt;
  return 100.0 * static_cast<double>(count) / static_cast<double>(gt);
}

ClearAccumulator::ClearAccumulator(MatchingPolicy policy) : policy_(policy) { policy_.validate(); }

std::vector<std::pair<std::size_t, std::size_t>> ClearAccumulator::add_frame(
    std::span<const Prediction> predictions, std::span<const Label> labels) {
  std::vector<std::pair<std::size_t, std::size_t>> all_pairs;
  for (ClassId cls : {ClassId::kVehicle, ClassId::kPedestrian}) {
    const auto c = static_cast<std::size_t>(cls);
    std::vector<Prediction> preds;
    std::vector<std::size_t> pred_index;
    std::vector<Label> gts;
    std::vector<std::size_t> gt_index;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      if (predictions[i].cls == cls) {
        preds.push_back(predictions[i]);
        pred_index.push_back(i);
      }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].cls == cls) {
        gts.push_back(labels[i]);
        gt_index.push_back(i);
      }
    }
    if (preds.empty() && gts.empty()) {
      previous_[c].clear();
      continue;
    }

    FrameMatches m = match_frame(preds, gts, policy_, previous_[c]);
    ClearCounts& counts = counts_[c];
    counts.gt += static_cast<long long>(gts.size());
    counts.predictions += static_cast<long long>(preds.size());
    counts.matches += static_cast<long long>(m.pairs.size());
    counts.misses += static_cast<long long>(gts.size() - m.pairs.size());
    counts.false_positives += static_cast<long long>(preds.size() - m.pairs.size());
    for (const auto& [g, p] : m.pairs) {
      const int object = gts[g].object_id;
      const int track = preds[p].track_id;
      auto [it, inserted] = last_matched_track_[c].try_emplace(object, track);
      if (!inserted && it->second != track) {
        ++counts.mismatches;
        it->second = track;
      }
      all_pairs.emplace_back(gt_index[g], pred_index[p]);
    }
    previous_[c] = std::move(m.correspondence);
  }
  std::sort(all_pairs.begin(), all_pairs.end());
  return all_pairs;
}

void StateErrorStats::add(double error, sim::SpeedBucket bucket) {
  buckets[static_cast<std::size_t>(bucket)].add(error);
  all.add(error);
  if (error > alpha) ++large_errors;
}

StateErrorStats& StateErrorStats::operator+=(const StateErrorStats& other) {
  for (std::size_t i = 0; i < buckets.size(); ++i) buckets[i] += other.buckets[i];
  all += other.all;
  large_errors += other.large_errors;
  return *this;
}

}  // namespace stt::metrics
