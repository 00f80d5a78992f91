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

#include "stt/cli/experiment.hpp"

#include "stt/tracker/kalman_backend.hpp"
#include "stt/tracker/stt_backend.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <iomanip>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace stt::cli {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void parallel_for(int count, int workers, const std::function<void(int)>& task) {
  if (count <= 0) return;
  const int threads = std::max(1, std::min(workers, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto run = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<sim::Scenario> generate_scenarios(const sim::SimConfig& config, std::uint64_t seed,
                                              int count, int workers) {
  std::vector<sim::Scenario> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(count, workers, [&](int i) {
    out[static_cast<std::size_t>(i)] = sim::generate(config, derive_seed(seed, static_cast<std::uint64_t>(i)));
  });
  return out;
}

std::vector<model::TrainingExample> examples_from(const std::vector<sim::Scenario>& scenarios,
                                                  const model::SttConfig& config, std::uint64_t seed,
                                                  bool random_history_length, int frame_stride) {
  std::vector<model::TrainingExample> out;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    auto part = model::build_examples(scenarios[i], config, derive_seed(seed, i), random_history_length,
                                     frame_stride);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

model::SttModel train_stt(const RunConfig& config, const std::vector<sim::Scenario>& scenarios,
                          std::uint64_t seed, std::vector<model::TrainLogRow>* log) {
  const auto examples =
      examples_from(scenarios, config.stt, derive_seed(seed, 0), true, config.train.example_stride);
  model::SttModel net(config.stt, derive_seed(seed, 1));
  auto rows = model::train(net, examples, config.train, derive_seed(seed, 2));
  if (log) log->insert(log->end(), rows.begin(), rows.end());
  return net;
}

tracker::TrackerOutput track_scenario(const RunConfig& config, const sim::Scenario& scenario,
                                      const model::SttModel* model) {
  if (config.backend == BackendKind::kKalman) {
    tracker::KalmanBackend backend(config.kalman, scenario.dt);
    return tracker::run_sequence(scenario, backend, config.lifecycle);
  }
  if (!model) throw CliError(kUsage, "the stt backend needs a trained model");
  tracker::SttBackend backend(*model, config.lifecycle.creation_score_threshold);
  return tracker::run_sequence(scenario, backend, config.lifecycle);
}

std::vector<tracker::TrackerOutput> track_all(const RunConfig& config,
                                              const std::vector<sim::Scenario>& scenarios,
                                              const model::SttModel* model, int workers) {
  std::vector<tracker::TrackerOutput> out(scenarios.size());
  parallel_for(static_cast<int>(scenarios.size()), workers, [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    out[idx] = track_scenario(config, scenarios[idx], model);
  });
  return out;
}

std::vector<std::vector<metrics::Prediction>> predictions_of(const tracker::TrackerOutput& output) {
  std::vector<std::vector<metrics::Prediction>> out;
  out.reserve(output.frames.size());
  for (const tracker::FrameOutput& frame : output.frames) {
    std::vector<metrics::Prediction> preds;
    preds.reserve(frame.tracks.size());
    for (const tracker::TrackEmission& t : frame.tracks) preds.push_back({t.track_id, t.cls, t.box, t.state});
    out.push_back(std::move(preds));
  }
  return out;
}

metrics::MetricReport evaluate(const metrics::EvalConfig& config,
                               const std::vector<sim::Scenario>& scenarios,
                               const std::vector<tracker::TrackerOutput>& outputs) {
  if (scenarios.size() != outputs.size()) throw std::invalid_argument("evaluate: size mismatch");
  metrics::Evaluator evaluator(config);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    evaluator.add_sequence(predictions_of(outputs[i]), metrics::labels_of(scenarios[i]));
  }
  return evaluator.report();
}

Suite suite_from_string(std::string_view name) {
  if (name == "joint") return Suite::kJoint;
  if (name == "track-length") return Suite::kTrackLength;
  if (name == "noise") return Suite::kNoise;
  if (name == "all") return Suite::kAll;
  throw std::invalid_argument("unknown suite '" + std::string(name) +
                              "' (expected joint, track-length, noise or all)");
}

namespace {

class Progress {
 public:
  explicit Progress(std::ostream* out) : out_(out), start_(std::chrono::steady_clock::now()) {}
  void operator()(const std::string& line) {
    if (!out_) return;
    const std::lock_guard<std::mutex> lock(mutex_);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    *out_ << "[" << std::fixed << std::setprecision(1) << s << "s] " << line << std::endl;
  }

 private:
  std::ostream* out_;
  std::chrono::steady_clock::time_point start_;
  std::mutex mutex_;
};

struct Data {
  std::vector<sim::Scenario> train;
  std::vector<sim::Scenario> test;
};

Data make_data(const RunConfig& config, int workers) {
  return {generate_scenarios(config.sim, derive_seed(config.seed, 1), config.train_scenarios, workers),
          generate_scenarios(config.sim, derive_seed(config.seed, 2), config.test_scenarios, workers)};
}

AblationRow kalman_row(const RunConfig& base, const Data& data, std::string group, int workers) {
  RunConfig c = base;
  c.backend = BackendKind::kKalman;
  const auto outputs = track_all(c, data.test, nullptr, workers);
  return {std::move(group), "kalman", evaluate(c.eval, data.test, outputs), std::nullopt};
}

AblationRow stt_row(const RunConfig& base, const Data& data, std::string group, std::string name,
                    int workers, Progress& progress) {
  RunConfig c = base;
  c.backend = BackendKind::kStt;
  progress("training " + group + " / " + name);
  const model::SttModel net = train_stt(c, data.train, derive_seed(c.seed, 3));
  const auto held_out = examples_from(data.test, c.stt, derive_seed(c.seed, 4));
  const double accuracy = model::evaluate_association(net, held_out).rate();
  progress("tracking " + group + " / " + name);
  const auto outputs = track_all(c, data.test, &net, workers);
  return {std::move(group), std::move(name), evaluate(c.eval, data.test, outputs), accuracy};
}

}  // namespace

std::vector<AblationRow> run_experiment(const RunConfig& config, Suite suite, int workers,
                                        std::ostream* log) {
  config.validate();
  Progress progress(log);
  const bool all = suite == Suite::kAll;

  // Rows are independent once their data exists, so they run as parallel
  // jobs; each job tracks its scenarios sequentially.
  std::vector<std::function<AblationRow()>> jobs;
  std::vector<std::shared_ptr<const Data>> keep_alive;

  if (all || suite == Suite::kJoint || suite == Suite::kTrackLength) {
    auto data = std::make_shared<const Data>(make_data(config, workers));
    keep_alive.push_back(data);
    if (all || suite == Suite::kJoint) {
      jobs.push_back([=] { return kalman_row(config, *data, "joint optimization", 1); });
      jobs.push_back([=, &progress] {
        return stt_row(config, *data, "joint optimization", "stt joint", 1, progress);
      });
      RunConfig assoc = config;
      assoc.stt.state_weight = 0.0;
      assoc.stt.previous_state_weight = 0.0;
      jobs.push_back([=, &progress] {
        return stt_row(assoc, *data, "joint optimization", "stt association-only", 1, progress);
      });
    }
    if (all || suite == Suite::kTrackLength) {
      for (int t : {3, 5, 10, 20}) {
        RunConfig c = config;
        c.stt.max_track_length = t;
        c.lifecycle.max_track_length = t;
        jobs.push_back([=, &progress] {
          return stt_row(c, *data, "track length", "T=" + std::to_string(t), 1, progress);
        });
      }
    }
  }

  if (all || suite == Suite::kNoise) {
    struct Variant {
      const char* name;
      double center, heading, fp, miss;
    };
    const double c0 = config.sim.noise.center_sigma;
    const Variant variants[] = {{"clean detector", 0.5 * c0, 0.01, 0.2, 0.01},
                                {"default detector", c0, config.sim.noise.heading_sigma,
                                 config.sim.noise.fp_rate, config.sim.noise.miss_prob},
                                {"noisy detector", 2.0 * c0, 0.05, 3.0, 0.1}};
    for (const Variant& v : variants) {
      RunConfig c = config;
      c.sim.noise.center_sigma = v.center;
      c.sim.noise.heading_sigma = v.heading;
      c.sim.noise.fp_rate = v.fp;
      c.sim.noise.miss_prob = v.miss;
      auto data = std::make_shared<const Data>(make_data(c, workers));
      keep_alive.push_back(data);
      const std::string group = v.name;
      jobs.push_back([=] { return kalman_row(c, *data, group, 1); });
      jobs.push_back([=, &progress] { return stt_row(c, *data, group, "stt joint", 1, progress); });
    }
  }

  std::vector<AblationRow> rows(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), workers,
               [&](int i) { rows[static_cast<std::size_t>(i)] = jobs[static_cast<std::size_t>(i)](); });
  progress("done");
  return rows;
}

namespace {

std::string cell(const std::optional<double>& v, int precision) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *v;
  return os.str();
}

std::optional<double> pct(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return 100.0 * *v;
}

}  // namespace

void write_ablation_table(std::ostream& out, const std::vector<AblationRow>& rows, ClassId cls) {
  out << std::left << std::setw(20) << "group" << std::setw(22) << "row" << std::right << std::setw(8)
      << "S-MOTA" << std::setw(8) << "dS-MOTA" << std::setw(8) << "MOTA" << std::setw(8) << "FP%"
      << std::setw(8) << "Miss%" << std::setw(10) << "Mismatch%" << std::setw(10) << "v static"
      << std::setw(8) << "v all" << std::setw(8) << "a all" << std::setw(10) << "assoc acc" << '\n';
  std::string group;
  std::optional<double> reference;
  for (const AblationRow& r : rows) {
    const metrics::ClassReport* c = r.report.find(cls);
    if (!c) continue;
    const std::optional<double> s = pct(c->s_mota.accuracy());
    if (r.group != group) {
      group = r.group;
      reference = s;
    }
    std::optional<double> delta;
    if (s && reference) delta = *s - *reference;
    out << std::left << std::setw(20) << r.group << std::setw(22) << r.name << std::right
        << std::setw(8) << cell(s, 1) << std::setw(8) << cell(delta, 1) << std::setw(8)
        << cell(pct(c->mota.accuracy()), 1) << std::setw(8)
        << cell(c->mota.percent_of_gt(c->mota.false_positives), 2) << std::setw(8)
        << cell(c->mota.percent_of_gt(c->mota.misses), 2) << std::setw(10)
        << cell(c->mota.percent_of_gt(c->mota.mismatches), 2) << std::setw(10)
        << cell(c->velocity.buckets[0].mean(), 3) << std::setw(8) << cell(c->velocity.all.mean(), 3)
        << std::setw(8) << cell(c->acceleration.all.mean(), 3) << std::setw(10)
        << cell(pct(r.association_accuracy), 1) << '\n';
  }
}

void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows, ClassId cls) {
  out << "group,row,s_mota,mota,fp_pct,miss_pct,mismatch_pct,motp_velocity_static,"
         "motp_velocity_all,motp_acceleration_all,association_accuracy\n";
  for (const AblationRow& r : rows) {
    const metrics::ClassReport* c = r.report.find(cls);
    if (!c) continue;
    out << r.group << ',' << r.name << ',' << cell(c->s_mota.accuracy(), 6) << ','
        << cell(c->mota.accuracy(), 6) << ',' << cell(c->mota.percent_of_gt(c->mota.false_positives), 4)
        << ',' << cell(c->mota.percent_of_gt(c->mota.misses), 4) << ','
        << cell(c->mota.percent_of_gt(c->mota.mismatches), 4) << ','
        << cell(c->velocity.buckets[0].mean(), 6) << ',' << cell(c->velocity.all.mean(), 6) << ','
        << cell(c->acceleration.all.mean(), 6) << ',' << cell(r.association_accuracy, 6) << '\n';
  }
}

}  // namespace stt::cli
