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

#include "stt/cli/commands.hpp"

#include "stt/autodiff/checkpoint.hpp"
#include "stt/cli/config.hpp"
#include "stt/cli/experiment.hpp"
#include "stt/cli/io.hpp"
#include "stt/kalman/kalman_filter.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

namespace stt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 1;
};

RunConfig resolve(const Common& common) {
  RunConfig c = common.config_path.empty() ? RunConfig::defaults_for(ClassId::kVehicle) : load_config(common.config_path);
  if (common.seed) c.seed = *common.seed;
  c.validate();
  return c;
}

void add_common(CLI::App* app, Common& common, bool out_required) {
  app->add_option("--config", common.config_path, "run configuration (JSON)");
  app->add_option("--seed", common.seed, "overrides the configured seed");
  auto* out = app->add_option("--out", common.out, "output directory");
  if (out_required) out->required();
  app->add_option("--workers", common.workers, "parallel workers across scenarios")->check(CLI::PositiveNumber);
}

std::string checkpoint_metadata(const RunConfig& config) {
  return json{{"schema_version", kSchemaVersion},
              {"kind", "checkpoint"},
              {"version", version_string()},
              {"stt", to_json(config.stt)},
              {"config", to_json(config)}}
      .dump();
}

model::SttModel load_model(const RunConfig& config, const fs::path& path) {
  if (!fs::exists(path)) throw CliError(kMissingFile, "checkpoint not found: " + path.string());
  ad::Checkpoint ckpt;
  try {
    ckpt = ad::read_checkpoint(path);
  } catch (const ad::CheckpointError& e) {
    throw CliError(kSchema, std::string("bad checkpoint: ") + e.what());
  }
  json meta;
  try {
    meta = json::parse(ckpt.metadata);
  } catch (const json::parse_error&) {
    throw CliError(kSchema, "checkpoint metadata is not JSON");
  }
  if (!meta.contains("stt")) throw CliError(kSchema, "checkpoint metadata lacks the model configuration");
  if (meta.at("stt") != to_json(config.stt)) {
    throw CliError(kMismatch, "checkpoint was trained with a different stt configuration");
  }
  model::SttModel net(config.stt, 0);
  try {
    net.load(ckpt);
  } catch (const ad::CheckpointError& e) {
    throw CliError(kMismatch, e.what());
  }
  return net;
}

int cmd_simulate(const Common& common, int count, const std::string& prefix, std::ostream& out) {
  const RunConfig config = resolve(common);
  const auto scenarios = generate_scenarios(config.sim, config.seed, count, common.workers);
  const json cfg = to_json(config);
  parallel_for(count, common.workers, [&](int i) {
    std::ostringstream name;
    name << prefix << '_' << std::setw(4) << std::setfill('0') << i;
    write_scenario(common.out, name.str(), scenarios[static_cast<std::size_t>(i)], cfg);
  });
  out << "wrote " << count << " scenario(s) to " << common.out << '\n';
  return kOk;
}

std::vector<sim::Scenario> read_all(const fs::path& dir, const std::vector<std::string>& names, int workers) {
  std::vector<sim::Scenario> scenarios(names.size());
  parallel_for(static_cast<int>(names.size()), workers, [&](int i) {
    scenarios[static_cast<std::size_t>(i)] = read_scenario(dir, names[static_cast<std::size_t>(i)]);
  });
  return scenarios;
}

int cmd_train(const Common& common, const std::string& data, std::ostream& out) {
  const RunConfig config = resolve(common);
  const auto names = list_scenarios(data);
  if (names.empty()) throw CliError(kMissingFile, "no scenarios in " + data);
  const auto scenarios = read_all(data, names, common.workers);
  std::vector<model::TrainLogRow> log;
  const model::SttModel net = train_stt(config, scenarios, config.seed, &log);
  fs::create_directories(common.out);
  ad::write_checkpoint(fs::path(common.out) / "model.ckpt", net.to_checkpoint(checkpoint_metadata(config)));
  std::ostringstream csv;
  model::write_train_log_csv(csv, log);
  write_text(fs::path(common.out) / "train_log.csv", csv.str());
  out << "trained " << net.parameter_count() << " parameters for " << log.size() << " steps; final loss "
      << log.back().total << '\n';
  return kOk;
}

int cmd_track(const Common& common, const std::string& data, const std::string& backend,
              const std::string& checkpoint, std::ostream& out) {
  RunConfig config = resolve(common);
  if (!backend.empty()) {
    try {
      config.backend = backend_from_string(backend);
    } catch (const std::invalid_argument& e) {
      throw CliError(kUsage, e.what());
    }
  }
  std::optional<model::SttModel> net;
  if (config.backend == BackendKind::kStt) {
    if (checkpoint.empty()) throw CliError(kUsage, "--checkpoint is required for the stt backend");
    net.emplace(load_model(config, checkpoint));
  }
  const auto names = list_scenarios(data);
  const auto scenarios = read_all(data, names, common.workers);
  const auto outputs = track_all(config, scenarios, net ? &*net : nullptr, common.workers);
  const json cfg = to_json(config);
  double seconds = 0.0;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    write_tracks(fs::path(common.out) / (names[i] + ".tracks.jsonl"), outputs[i], cfg);
    seconds += std::accumulate(outputs[i].frame_seconds.begin(), outputs[i].frame_seconds.end(), 0.0);
    frames += outputs[i].frame_seconds.size();
  }
  out << "tracked " << names.size() << " scenario(s), " << frames << " frames with " << to_string(config.backend)
      << "; " << std::fixed << std::setprecision(3) << (frames ? 1e3 * seconds / static_cast<double>(frames) : 0.0)
      << " ms/frame\n";
  return kOk;
}

int cmd_eval(const Common& common, const std::string& gt, const std::string& results, const std::string& policy,
             std::ostream& out) {
  RunConfig config = resolve(common);
  if (policy == "per-frame") {
    config.eval.mota.persistence = false;
    config.eval.s_mota.persistence = false;
  } else if (policy != "persistent") {
    throw CliError(kUsage, "--policy must be persistent or per-frame");
  }
  const auto names = list_scenarios(gt);
  metrics::Evaluator evaluator(config.eval);
  for (const std::string& name : names) {
    const sim::Scenario scenario = read_scenario(gt, name);
    const auto predictions = read_tracks(fs::path(results) / (name + ".tracks.jsonl"));
    if (predictions.size() != static_cast<std::size_t>(scenario.frames)) {
      throw CliError(kSchema, name + ": tracks file frame count differs from ground truth");
    }
    evaluator.add_sequence(predictions, metrics::labels_of(scenario));
  }
  const metrics::MetricReport report = evaluator.report();
  json doc = make_header("metrics", to_json(config), {{"scenarios", names.size()}, {"policy", policy}});
  doc["report"] = report.to_json();
  write_text(fs::path(common.out) / "metrics.json", doc.dump(2) + "\n");
  std::ostringstream csv;
  report.write_csv(csv);
  write_text(fs::path(common.out) / "metrics.csv", csv.str());
  report.write_table(out);
  return kOk;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& cls_name, const std::string& csv_path,
               const std::string& config_path, std::ostream& out) {
  ClassId cls;
  try {
    cls = class_from_string(cls_name);
  } catch (const std::invalid_argument& e) {
    throw CliError(kUsage, e.what());
  }
  std::vector<AblationRow> rows;
  for (const std::string& input : inputs) {
    std::string label;
    std::string path = input;
    if (const auto eq = input.find('='); eq != std::string::npos) {
      label = input.substr(0, eq);
      path = input.substr(eq + 1);
    }
    fs::path file = path;
    if (fs::is_directory(file)) file /= "metrics.json";
    if (label.empty()) label = file.parent_path().filename().string();
    std::ifstream in(file);
    if (!in) throw CliError(kMissingFile, "metrics file not found: " + file.string());
    json doc;
    try {
      doc = json::parse(in);
      if (doc.value("kind", std::string()) != "metrics" || doc.value("schema_version", -1) != kSchemaVersion) {
        throw CliError(kSchema, file.string() + " is not a metrics file");
      }
      rows.push_back({"runs", label, metrics::MetricReport::from_json(doc.at("report")), std::nullopt});
    } catch (const json::exception& e) {
      throw CliError(kSchema, file.string() + ": " + e.what());
    }
  }
  write_ablation_table(out, rows, cls);
  if (!csv_path.empty()) {
    std::ostringstream csv;
    write_ablation_csv(csv, rows, cls);
    write_text(csv_path, csv.str());
  }
  const RunConfig defaults = config_path.empty() ? RunConfig::defaults_for(cls) : load_config(config_path);
  out << "\nconfiguration:\n" << to_json(defaults).dump(2) << '\n';
  return kOk;
}

int cmd_experiment(const Common& common, const std::string& suite_name, std::ostream& out, std::ostream& err) {
  const RunConfig config = resolve(common);
  Suite suite;
  try {
    suite = suite_from_string(suite_name);
  } catch (const std::invalid_argument& e) {
    throw CliError(kUsage, e.what());
  }
  const auto rows = run_experiment(config, suite, common.workers, &err);
  std::ostringstream table, csv;
  write_ablation_table(table, rows, config.cls);
  write_ablation_csv(csv, rows, config.cls);
  json doc = make_header("experiment", to_json(config), {{"suite", suite_name}});
  doc["rows"] = json::array();
  for (const AblationRow& r : rows) {
    doc["rows"].push_back({{"group", r.group},
                           {"row", r.name},
                           {"report", r.report.to_json()},
                           {"association_accuracy", r.association_accuracy ? json(*r.association_accuracy) : json(nullptr)}});
  }
  write_text(fs::path(common.out) / "ablation.txt", table.str());
  write_text(fs::path(common.out) / "ablation.csv", csv.str());
  write_text(fs::path(common.out) / "ablation.json", doc.dump(2) + "\n");
  out << table.str();
  return kOk;
}

int cmd_tune_kf(const Common& common, std::ostream& out) {
  RunConfig config = resolve(common);
  config.backend = BackendKind::kKalman;
  const auto scenarios =
      generate_scenarios(config.sim, derive_seed(config.seed, 7), config.test_scenarios, common.workers);
  const double accel[] = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0};
  const double meas[] = {0.1, 0.2, 0.4, 0.8, 1.6};
  std::ostringstream csv;
  csv << "process_noise_accel_sigma,meas_noise_sigma,s_mota,mota,motp_velocity_all,motp_velocity_static\n";
  double best_score = -1e300, best_accel = 0.0, best_meas = 0.0;
  for (double a : accel) {
    for (double m : meas) {
      RunConfig c = config;
      c.kalman.process_noise_accel_sigma = a;
      c.kalman.meas_noise_sigma = m;
      const auto outputs = track_all(c, scenarios, nullptr, common.workers);
      const metrics::MetricReport report = evaluate(c.eval, scenarios, outputs);
      const metrics::ClassReport* r = report.find(c.cls);
      if (!r) continue;
      const double s = r->s_mota.accuracy().value_or(-1e300);
      const double v = r->velocity.all.mean().value_or(1e300);
      csv << a << ',' << m << ',' << s << ',' << r->mota.accuracy().value_or(0.0) << ',' << v << ','
          << r->velocity.buckets[0].mean().value_or(0.0) << '\n';
      // S-MOTA first; mean velocity error breaks near-ties.
      const double score = s - 1e-3 * v;
      if (score > best_score) {
        best_score = score;
        best_accel = a;
        best_meas = m;
      }
    }
  }
  write_text(fs::path(common.out) / "tune_kf.csv", csv.str());
  out << csv.str() << "best: process_noise_accel_sigma=" << best_accel << " meas_noise_sigma=" << best_meas << '\n';
  return kOk;
}

void print_error(std::ostream& err, int code, std::string_view kind, const std::string& message) {
  err << json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stateful 3D multi-object tracking toolkit", "stt"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Common common;
  int count = 1;
  std::string prefix = "scenario";
  std::string data, backend, checkpoint, gt, results, policy = "persistent", suite = "all";
  std::string cls = "vehicle", csv_path, defaults_config;
  std::vector<std::string> inputs;

  auto* simulate = app.add_subcommand("simulate", "generate synthetic scenarios");
  add_common(simulate, common, true);
  simulate->add_option("--count", count, "number of scenarios")->check(CLI::PositiveNumber);
  simulate->add_option("--prefix", prefix, "scenario name prefix");

  auto* train = app.add_subcommand("train", "train the stt model on a scenario directory");
  add_common(train, common, true);
  train->add_option("--data", data, "scenario directory")->required();

  auto* track = app.add_subcommand("track", "run a tracker over a scenario directory");
  add_common(track, common, true);
  track->add_option("--data", data, "scenario directory")->required();
  track->add_option("--backend", backend, "kalman or stt (overrides config)");
  track->add_option("--checkpoint", checkpoint, "model checkpoint for the stt backend");

  auto* eval = app.add_subcommand("eval", "score tracker output against ground truth");
  add_common(eval, common, true);
  eval->add_option("--gt", gt, "scenario directory")->required();
  eval->add_option("--results", results, "tracks directory")->required();
  eval->add_option("--policy", policy, "persistent (CLEAR) or per-frame matching");

  auto* report = app.add_subcommand("report", "compare metrics of several runs");
  report->add_option("inputs", inputs, "metrics.json files or eval directories, optionally label=path")->required();
  report->add_option("--class", cls, "vehicle or pedestrian");
  report->add_option("--emit-csv", csv_path, "also write the table as CSV");
  report->add_option("--config", defaults_config, "configuration to print (defaults if omitted)");

  auto* experiment = app.add_subcommand("experiment", "train and evaluate the ablation suite");
  add_common(experiment, common, true);
  experiment->add_option("--suite", suite, "joint, track-length, noise or all");

  auto* tune = app.add_subcommand("tune-kf", "grid-search Kalman noise parameters");
  add_common(tune, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, kUsage, "usage", e.what());
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(common, count, prefix, out);
    if (*train) return cmd_train(common, data, out);
    if (*track) return cmd_track(common, data, backend, checkpoint, out);
    if (*eval) return cmd_eval(common, gt, results, policy, out);
    if (*report) return cmd_report(inputs, cls, csv_path, defaults_config, out);
    if (*experiment) return cmd_experiment(common, suite, out, err);
    if (*tune) return cmd_tune_kf(common, out);
  } catch (const CliError& e) {
    const char* kinds[] = {"ok", "failure", "usage", "missing_file", "schema", "mismatch", "numerical"};
    print_error(err, e.code(), kinds[e.code()], e.what());
    return e.code();
  } catch (const model::TrainingDiverged& e) {
    print_error(err, kNumerical, "numerical", e.what());
    return kNumerical;
  } catch (const kalman::NumericalFailure& e) {
    print_error(err, kNumerical, "numerical", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    print_error(err, kFailure, "failure", e.what());
    return kFailure;
  }
  return kUsage;
}

}  // namespace stt::cli
