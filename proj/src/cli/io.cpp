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

#include "stt/cli/io.hpp"

#include "stt/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace stt::cli {

using nlohmann::json;

namespace {

json state_to_json(const StateVector& s) {
  return {{"px", s.position.x()},     {"py", s.position.y()},     {"vx", s.velocity.x()},
          {"vy", s.velocity.y()},     {"ax", s.acceleration.x()}, {"ay", s.acceleration.y()}};
}

StateVector state_from_json(const json& j) {
  StateVector s;
  s.position = {j.at("px").get<double>(), j.at("py").get<double>()};
  s.velocity = {j.at("vx").get<double>(), j.at("vy").get<double>()};
  s.acceleration = {j.at("ax").get<double>(), j.at("ay").get<double>()};
  return s;
}

void put_box(json& j, const Box7& b) {
  j["cx"] = b.center().x();
  j["cy"] = b.center().y();
  j["cz"] = b.center().z();
  j["w"] = b.width();
  j["l"] = b.length();
  j["h"] = b.height();
  j["heading"] = b.heading();
}

Box7 box_from_json(const json& j) {
  return Box7({j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("cz").get<double>()},
              {j.at("w").get<double>(), j.at("l").get<double>(), j.at("h").get<double>()},
              j.at("heading").get<double>());
}

// Line reader that turns every parse or schema problem into CliError(kSchema).
class JsonlReader {
 public:
  JsonlReader(const std::filesystem::path& path, std::string_view kind) : path_(path) {
    in_.open(path);
    if (!in_) throw CliError(kMissingFile, "file not found: " + path.string());
    json h;
    if (!next(h)) throw CliError(kSchema, path.string() + ": empty file");
    if (!h.is_object() || h.value("schema_version", -1) != kSchemaVersion ||
        h.value("kind", std::string()) != kind) {
      throw CliError(kSchema, path.string() + ": expected a '" + std::string(kind) +
                                  "' header with schema_version " + std::to_string(kSchemaVersion));
    }
    header_ = std::move(h);
  }

  const json& header() const { return header_; }

  bool next(json& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty()) continue;
      try {
        out = json::parse(line);
      } catch (const json::parse_error& e) {
        fail(e.what());
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw CliError(kSchema, path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  json header_;
  int line_no_ = 0;
};

template <typename F>
void read_records(JsonlReader& reader, F&& handle) {
  json record;
  while (reader.next(record)) {
    try {
      handle(record);
    } catch (const json::exception& e) {
      reader.fail(e.what());
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    } catch (const std::out_of_range& e) {
      reader.fail(e.what());
    }
  }
}

}  // namespace

json make_header(std::string_view kind, const json& config, const json& extra) {
  json h = {{"schema_version", kSchemaVersion},
            {"kind", std::string(kind)},
            {"version", version_string()},
            {"config", config}};
  for (const auto& item : extra.items()) h[item.key()] = item.value();
  return h;
}

json detection_to_json(const Detection& d, int provenance) {
  json j = {{"frame", d.frame_index}, {"id", d.detection_id}, {"class", std::string(to_string(d.cls))}};
  put_box(j, d.box);
  j["conf"] = d.confidence;
  j["appearance"] = d.appearance;
  j["motion"] = d.motion;
  j["provenance"] = provenance;
  return j;
}

Detection detection_from_json(const json& j, int* provenance) {
  Detection d;
  d.frame_index = j.at("frame").get<int>();
  d.detection_id = j.at("id").get<int>();
  d.cls = class_from_string(j.at("class").get<std::string>());
  d.box = box_from_json(j);
  d.confidence = j.at("conf").get<double>();
  d.appearance = j.at("appearance").get<std::vector<double>>();
  d.motion = j.at("motion").get<std::vector<double>>();
  if (provenance) *provenance = j.value("provenance", sim::kFalsePositive);
  return d;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CliError(kFailure, "cannot write " + path.string());
    out << text;
    if (!out) throw CliError(kFailure, "write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_scenario(const std::filesystem::path& dir, const std::string& name,
                    const sim::Scenario& scenario, const json& config) {
  const json extra = {{"frames", scenario.frames}, {"dt", scenario.dt}, {"name", name}};
  std::ostringstream gt;
  gt << make_header("ground_truth", config, extra).dump() << '\n';
  for (int f = 0; f < scenario.frames; ++f) {
    for (const sim::GtTrack& track : scenario.gt_tracks) {
      const sim::GtFrame& g = track.frames[static_cast<std::size_t>(f)];
      json j = {{"frame", g.frame}, {"object_id", track.object_id}, {"class", std::string(to_string(track.cls))}};
      put_box(j, g.box);
      j["state"] = state_to_json(g.state);
      gt << j.dump() << '\n';
    }
  }
  std::ostringstream det;
  det << make_header("detections", config, extra).dump() << '\n';
  for (const auto& frame : scenario.detections) {
    for (const sim::ScenarioDetection& d : frame) det << detection_to_json(d.detection, d.source_object).dump() << '\n';
  }
  write_text(dir / (name + ".gt.jsonl"), gt.str());
  write_text(dir / (name + ".det.jsonl"), det.str());
}

sim::Scenario read_scenario(const std::filesystem::path& dir, const std::string& name) {
  sim::Scenario s;
  JsonlReader gt(dir / (name + ".gt.jsonl"), "ground_truth");
  try {
    s.frames = gt.header().at("frames").get<int>();
    s.dt = gt.header().at("dt").get<double>();
  } catch (const json::exception& e) {
    gt.fail(e.what());
  }
  if (s.frames < 1 || !(s.dt > 0.0)) gt.fail("header needs frames >= 1 and dt > 0");

  std::map<int, std::size_t> index;
  read_records(gt, [&](const json& j) {
    const int frame = j.at("frame").get<int>();
    const int object = j.at("object_id").get<int>();
    if (frame < 0 || frame >= s.frames) throw std::invalid_argument("frame out of range");
    auto [it, inserted] = index.try_emplace(object, s.gt_tracks.size());
    if (inserted) {
      sim::GtTrack t;
      t.object_id = object;
      t.cls = class_from_string(j.at("class").get<std::string>());
      s.gt_tracks.push_back(std::move(t));
    }
    sim::GtTrack& track = s.gt_tracks[it->second];
    if (static_cast<int>(track.frames.size()) != frame) {
      throw std::invalid_argument("ground-truth frames of each object must be consecutive from 0");
    }
    track.frames.push_back({frame, box_from_json(j), state_from_json(j.at("state"))});
  });
  for (const sim::GtTrack& t : s.gt_tracks) {
    if (static_cast<int>(t.frames.size()) != s.frames) gt.fail("object " + std::to_string(t.object_id) + " does not cover every frame");
  }

  JsonlReader det(dir / (name + ".det.jsonl"), "detections");
  s.detections.assign(static_cast<std::size_t>(s.frames), {});
  read_records(det, [&](const json& j) {
    sim::ScenarioDetection d;
    d.detection = detection_from_json(j, &d.source_object);
    const int f = d.detection.frame_index;
    if (f < 0 || f >= s.frames) throw std::invalid_argument("frame out of range");
    s.detections[static_cast<std::size_t>(f)].push_back(std::move(d));
  });
  return s;
}

std::vector<std::string> list_scenarios(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw CliError(kMissingFile, "directory not found: " + dir.string());
  const std::string suffix = ".det.jsonl";
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    if (file.size() > suffix.size() && file.ends_with(suffix)) names.push_back(file.substr(0, file.size() - suffix.size()));
  }
  std::sort(names.begin(), names.end());
  return names;
}

void write_tracks(const std::filesystem::path& path, const tracker::TrackerOutput& output,
                  const json& config) {
  std::ostringstream out;
  out << make_header("tracks", config, {{"frames", output.frames.size()}}).dump() << '\n';
  for (const tracker::FrameOutput& frame : output.frames) {
    for (const tracker::TrackEmission& t : frame.tracks) {
      json j = {{"frame", frame.frame}, {"track_id", t.track_id}, {"class", std::string(to_string(t.cls))}};
      put_box(j, t.box);
      j["conf"] = t.confidence;
      j["detection_id"] = t.detection_id;
      j["state"] = state_to_json(t.state);
      out << j.dump() << '\n';
    }
  }
  write_text(path, out.str());
}

std::vector<std::vector<metrics::Prediction>> read_tracks(const std::filesystem::path& path) {
  JsonlReader reader(path, "tracks");
  int frames = 0;
  try {
    frames = reader.header().at("frames").get<int>();
  } catch (const json::exception& e) {
    reader.fail(e.what());
  }
  std::vector<std::vector<metrics::Prediction>> out(static_cast<std::size_t>(std::max(frames, 0)));
  read_records(reader, [&](const json& j) {
    const int f = j.at("frame").get<int>();
    if (f < 0 || f >= frames) throw std::invalid_argument("frame out of range");
    metrics::Prediction p;
    p.track_id = j.at("track_id").get<int>();
    p.cls = class_from_string(j.at("class").get<std::string>());
    p.box = box_from_json(j);
    p.state = state_from_json(j.at("state"));
    out[static_cast<std::size_t>(f)].push_back(p);
  });
  return out;
}

}  // namespace stt::cli
