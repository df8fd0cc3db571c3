// Copyright 2026 The lapvqa Authors
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

#include "lapvqa/serialize.hpp"

#include "lapvqa/io.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace lapvqa {

namespace {

template <typename T>
T get_field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

DistortionKind kind_field(const Json& j, const char* what) {
  const auto name = get_field<std::string>(j, "kind", what);
  const auto kind = parse_kind(name);
  if (!kind) throw FormatError(std::string(what) + ": unknown distortion kind '" + name + "'");
  return *kind;
}

}  // namespace

Json params_to_json(const DistortionParams& params) {
  struct Visitor {
    Json operator()(const NoiseParams& p) const { return {{"variance", p.variance}}; }
    Json operator()(const DefocusParams& p) const { return {{"sigma", p.sigma}, {"ksize", p.ksize}}; }
    Json operator()(const MotionParams& p) const { return {{"length", p.length}, {"angle_deg", p.angle_deg}}; }
    Json operator()(const IlluminationParams& p) const {
      return {{"radius_frac", p.radius_frac},     {"floor", p.floor},
              {"falloff_frac", p.falloff_frac},   {"center_x_frac", p.center_x_frac},
              {"center_y_frac", p.center_y_frac}};
    }
    Json operator()(const SmokeParams& p) const { return {{"opacity", p.opacity}}; }
  };
  return std::visit(Visitor{}, params);
}

DistortionParams params_from_json(DistortionKind kind, const Json& j) {
  constexpr const char* what = "distortion params";
  DistortionParams out;
  switch (kind) {
    case DistortionKind::Noise: out = NoiseParams{get_field<double>(j, "variance", what)}; break;
    case DistortionKind::DefocusBlur:
      out = DefocusParams{get_field<double>(j, "sigma", what), get_field<int>(j, "ksize", what)};
      break;
    case DistortionKind::MotionBlur:
      out = MotionParams{get_field<double>(j, "length", what), j.value("angle_deg", 0.0)};
      break;
    case DistortionKind::UnevenIllumination: {
      IlluminationParams p;
      p.radius_frac = get_field<double>(j, "radius_frac", what);
      p.floor = get_field<double>(j, "floor", what);
      p.falloff_frac = j.value("falloff_frac", p.falloff_frac);
      p.center_x_frac = j.value("center_x_frac", p.center_x_frac);
      p.center_y_frac = j.value("center_y_frac", p.center_y_frac);
      out = p;
      break;
    }
    case DistortionKind::Smoke: out = SmokeParams{get_field<double>(j, "opacity", what)}; break;
  }
  try {
    validate(out);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string(what) + " for " + std::string(to_string(kind)) + ": " + e.what());
  }
  return out;
}

Json manifest_to_json(const Manifest& manifest) {
  Json arr = Json::array();
  for (const auto& e : manifest) {
    arr.push_back({{"id", e.id},
                   {"reference_label", e.reference_label},
                   {"content_category", std::string(to_string(e.category))},
                   {"kind", std::string(to_string(e.spec.kind))},
                   {"level", e.spec.level},
                   {"params", params_to_json(e.spec.params)},
                   {"seed", e.seed},
                   {"path", e.path}});
  }
  return arr;
}

Manifest manifest_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("manifest must be a JSON array");
  Manifest m;
  std::set<std::string> ids;
  for (const auto& item : j) {
    constexpr const char* what = "manifest entry";
    ManifestEntry e;
    e.id = get_field<std::string>(item, "id", what);
    if (!ids.insert(e.id).second) throw FormatError("manifest repeats id " + e.id);
    e.reference_label = get_field<std::string>(item, "reference_label", what);
    const auto cat = get_field<std::string>(item, "content_category", what);
    const auto parsed = parse_category(cat);
    if (!parsed) throw FormatError("manifest entry " + e.id + ": unknown content category '" + cat + "'");
    e.category = *parsed;
    e.spec.kind = kind_field(item, what);
    e.spec.level = get_field<int>(item, "level", what);
    if (e.spec.level < 1 || e.spec.level > kLevelCount) {
      throw FormatError("manifest entry " + e.id + ": level must be in 1..4");
    }
    if (!item.contains("params")) throw FormatError("manifest entry " + e.id + ": missing field 'params'");
    e.spec.params = params_from_json(e.spec.kind, item.at("params"));
    e.seed = get_field<std::uint64_t>(item, "seed", what);
    e.path = get_field<std::string>(item, "path", what);
    m.push_back(std::move(e));
  }
  return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  write_json_file(path, manifest_to_json(manifest));
}

Manifest read_manifest(const std::filesystem::path& path) { return manifest_from_json(read_json_file(path)); }

Json level_table_to_json(const LevelTable& table) {
  Json j = Json::object();
  for (DistortionKind k : kAllKinds) {
    Json levels = Json::object();
    for (int l = 1; l <= kLevelCount; ++l) {
      if (table.contains(k, l)) levels[std::to_string(l)] = params_to_json(table.at(k, l));
    }
    j[std::string(to_string(k))] = levels;
  }
  return j;
}

LevelTable level_table_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("level_table must be an object keyed by distortion kind");
  LevelTable t;
  for (const auto& [name, levels] : j.items()) {
    const auto kind = parse_kind(name);
    if (!kind) throw FormatError("level_table: unknown distortion kind '" + name + "'");
    if (!levels.is_object()) throw FormatError("level_table." + name + " must be an object keyed by level");
    for (const auto& [lvl, params] : levels.items()) {
      int level = 0;
      try {
        level = std::stoi(lvl);
      } catch (const std::exception&) {
        throw FormatError("level_table." + name + ": bad level key '" + lvl + "'");
      }
      if (level < 1 || level > kLevelCount) throw FormatError("level_table." + name + ": level must be in 1..4");
      t.set(*kind, level, params_from_json(*kind, params));
    }
  }
  return t;
}

Json thresholds_to_json(const ClassifierThresholds& t) {
  return {{"pbi_blur", t.pbi_blur},   {"pbi_motion_vs_defocus", t.pbi_motion_vs_defocus},
          {"smoke_tc", t.smoke_tc},   {"noise_sigma", t.noise_sigma},
          {"lmr", t.lmr},             {"pbi_bins", t.pbi_bins},
          {"saturation_bins", t.saturation_bins}};
}

ClassifierThresholds thresholds_from_json(const Json& j, ClassifierThresholds t) {
  if (!j.is_object()) throw FormatError("thresholds must be an object");
  try {
    t.pbi_blur = j.value("pbi_blur", t.pbi_blur);
    t.pbi_motion_vs_defocus = j.value("pbi_motion_vs_defocus", t.pbi_motion_vs_defocus);
    t.smoke_tc = j.value("smoke_tc", t.smoke_tc);
    t.noise_sigma = j.value("noise_sigma", t.noise_sigma);
    t.lmr = j.value("lmr", t.lmr);
    t.pbi_bins = j.value("pbi_bins", t.pbi_bins);
    t.saturation_bins = j.value("saturation_bins", t.saturation_bins);
    t.validate();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("thresholds: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("thresholds: ") + e.what());
  }
  return t;
}

Json classification_to_json(const VideoClassification& v) {
  const FrameIndices& f = v.report.video;
  return {{"id", v.id},
          {"pbi", f.pbi},
          {"p_smoke", f.p_smoke},
          {"sigma_n", f.sigma_n},
          {"lmr", f.lmr},
          {"anisotropy", f.anisotropy},
          {"decision", v.report.decision ? Json(std::string(to_string(*v.report.decision))) : Json(nullptr)}};
}

Json scores_to_json(const std::vector<VideoScore>& scores) {
  Json arr = Json::array();
  for (const auto& s : scores) {
    Json per_frame = Json::array();
    for (double v : s.score.per_frame) per_frame.push_back(number_or_null(v));
    Json item = {{"video_id", s.video_id},
                 {"metric", std::string(to_string(s.score.metric))},
                 {"video_score", number_or_null(s.score.video_score)},
                 {"per_frame", per_frame}};
    if (s.score.identical()) item["identical"] = true;
    arr.push_back(std::move(item));
  }
  return arr;
}

std::vector<VideoScore> scores_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("scores must be a JSON array");
  std::vector<VideoScore> out;
  for (const auto& item : j) {
    constexpr const char* what = "score entry";
    VideoScore s;
    s.video_id = get_field<std::string>(item, "video_id", what);
    const auto name = get_field<std::string>(item, "metric", what);
    const auto metric = parse_metric(name);
    if (!metric) throw FormatError("score entry " + s.video_id + ": unknown metric '" + name + "'");
    s.score.metric = *metric;
    const auto read_value = [&](const Json& v) {
      if (v.is_null()) return kPsnrIdentical;
      if (!v.is_number()) throw FormatError("score entry " + s.video_id + ": non-numeric score");
      return v.get<double>();
    };
    if (!item.contains("video_score")) throw FormatError("score entry " + s.video_id + ": missing video_score");
    s.score.video_score = read_value(item.at("video_score"));
    if (item.contains("per_frame")) {
      for (const auto& v : item.at("per_frame")) s.score.per_frame.push_back(read_value(v));
    }
    out.push_back(std::move(s));
  }
  return out;
}

ScoreTable to_score_table(const std::vector<VideoScore>& scores) {
  ScoreTable t;
  for (const auto& s : scores) t[s.video_id][s.score.metric] = s.score.video_score;
  return t;
}

Json plan_to_json(const SessionPlan& plan) {
  Json trials = Json::array();
  for (const auto& t : plan.trials) trials.push_back({{"idx", t.idx}, {"a", t.a}, {"b", t.b}, {"group", t.group}});
  return {{"observer_id", plan.observer_id}, {"seed", plan.seed}, {"trials", trials}};
}

SessionPlan plan_from_json(const Json& j) {
  constexpr const char* what = "session plan";
  SessionPlan plan;
  plan.observer_id = get_field<std::string>(j, "observer_id", what);
  plan.seed = get_field<std::uint64_t>(j, "seed", what);
  const auto trials = get_field<Json>(j, "trials", what);
  if (!trials.is_array()) throw FormatError("session plan: trials must be an array");
  std::set<int> seen;
  for (const auto& t : trials) {
    Trial trial{get_field<int>(t, "idx", "trial"), get_field<std::string>(t, "a", "trial"),
                get_field<std::string>(t, "b", "trial"), get_field<std::string>(t, "group", "trial")};
    if (!seen.insert(trial.idx).second) throw FormatError("session plan: duplicate trial idx " + std::to_string(trial.idx));
    plan.trials.push_back(std::move(trial));
  }
  return plan;
}

Json record_to_json(const PreferenceRecord& record) {
  Json results = Json::array();
  for (const auto& r : record.results) results.push_back({{"idx", r.idx}, {"choice", std::string(to_string(r.choice))}});
  return {{"observer_id", record.observer_id}, {"results", results}};
}

PreferenceRecord record_from_json(const Json& j) {
  constexpr const char* what = "preference record";
  PreferenceRecord record;
  record.observer_id = get_field<std::string>(j, "observer_id", what);
  const auto results = get_field<Json>(j, "results", what);
  if (!results.is_array()) throw FormatError("preference record: results must be an array");
  for (const auto& r : results) {
    const auto name = get_field<std::string>(r, "choice", "result");
    const auto choice = parse_choice(name);
    if (!choice) throw FormatError("preference record: unknown choice '" + name + "'");
    record.results.push_back({get_field<int>(r, "idx", "result"), *choice});
  }
  return record;
}

std::string mos_to_csv(const MosTable& table) {
  std::ostringstream os;
  os << "video_id,mos,mos_normalized,n_observers,cohort\n";
  char buf[64];
  for (const auto& e : table.entries) {
    os << e.video_id << ',';
    std::snprintf(buf, sizeof buf, "%.17g", e.mos);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", e.mos_normalized);
    os << buf << ',' << e.n_observers << ',' << to_string(e.cohort) << '\n';
  }
  return os.str();
}

MosTable mos_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("video_id,mos,mos_normalized,n_observers,cohort", 0) != 0) {
    throw FormatError("MOS CSV: unexpected header");
  }
  MosTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw FormatError("MOS CSV line " + std::to_string(lineno) + ": expected 5 columns");
    MosEntry e;
    e.video_id = cells[0];
    try {
      e.mos = std::stod(cells[1]);
      e.mos_normalized = std::stod(cells[2]);
      e.n_observers = std::stoi(cells[3]);
    } catch (const std::exception&) {
      throw FormatError("MOS CSV line " + std::to_string(lineno) + ": bad number");
    }
    const auto cohort = parse_cohort(cells[4]);
    if (!cohort) throw FormatError("MOS CSV line " + std::to_string(lineno) + ": unknown cohort '" + cells[4] + "'");
    e.cohort = *cohort;
    table.entries.push_back(std::move(e));
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const MosEntry& a, const MosEntry& b) { return a.video_id < b.video_id; });
  return table;
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace lapvqa
