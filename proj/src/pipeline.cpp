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

#include "lapvqa/pipeline.hpp"

#include "lapvqa/random.hpp"
#include "lapvqa/refgen.hpp"
#include "lapvqa/server.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace lapvqa {

namespace fs = std::filesystem;

namespace {

/// Bad input data (as opposed to bad command-line usage); maps to kExitData.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double v, int precision = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

// ---- config --------------------------------------------------------------

PipelineConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  static const std::set<std::string> known = {"seed",          "levels",       "level_overrides", "thresholds",
                                              "corpus_format", "frame_stride", "metrics",         "cohort"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw FormatError("config: unknown key '" + key + "'");
  }
  PipelineConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("frame_stride")) c.frame_stride = j.at("frame_stride").get<int>();
    if (j.contains("corpus_format")) {
      const auto f = j.at("corpus_format").get<std::string>();
      if (f == "y4m") c.corpus_format = ClipFormat::Y4m;
      else if (f == "png") c.corpus_format = ClipFormat::PngDir;
      else throw FormatError("config: corpus_format must be 'y4m' or 'png'");
    }
    if (j.contains("metrics")) {
      c.metrics.clear();
      for (const auto& m : j.at("metrics")) {
        const auto parsed = parse_metric(m.get<std::string>());
        if (!parsed) throw FormatError("config: unknown metric '" + m.get<std::string>() + "'");
        c.metrics.push_back(*parsed);
      }
    }
    if (j.contains("cohort")) {
      const auto parsed = parse_cohort(j.at("cohort").get<std::string>());
      if (!parsed) throw FormatError("config: cohort must be 'expert' or 'nonexpert'");
      c.cohort = *parsed;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (c.frame_stride < 1) throw FormatError("config: frame_stride must be >= 1");
  if (j.contains("levels")) c.levels = level_table_from_json(j.at("levels"));
  if (j.contains("level_overrides")) {
    const LevelTable overrides = level_table_from_json(j.at("level_overrides"));
    for (DistortionKind k : kAllKinds) {
      for (int l = 1; l <= kLevelCount; ++l) {
        if (overrides.contains(k, l)) c.levels.set(k, l, overrides.at(k, l));
      }
    }
  }
  if (j.contains("thresholds")) c.thresholds = thresholds_from_json(j.at("thresholds"));
  return c;
}

PipelineConfig load_config(const fs::path& path) { return config_from_json(read_json_file(path)); }

// ---- references ----------------------------------------------------------

std::vector<ReferenceEntry> list_references(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(IoErrc::NotFound, "reference directory not found: " + dir.string());
  std::vector<ReferenceEntry> out;
  const fs::path index = dir / kReferenceIndexName;
  if (fs::exists(index)) {
    const Json j = read_json_file(index);
    if (!j.is_array()) throw FormatError(index.string() + ": expected an array");
    for (const auto& item : j) {
      ReferenceEntry e;
      e.label = item.at("label").get<std::string>();
      const auto cat = parse_category(item.at("content_category").get<std::string>());
      if (!cat) throw FormatError(index.string() + ": unknown content category for " + e.label);
      e.category = *cat;
      e.path = item.at("path").get<std::string>();
      out.push_back(std::move(e));
    }
    return out;
  }
  std::vector<fs::path> candidates;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".y4m") candidates.push_back(entry.path());
    if (entry.is_directory() && fs::exists(entry.path() / png_frame_name(1))) candidates.push_back(entry.path());
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto& p : candidates) {
    ReferenceEntry e;
    e.label = p.stem().string();
    const auto cat = parse_category(e.label.substr(0, 2));
    if (!cat) {
      throw FormatError("cannot infer the content category of reference '" + e.label +
                        "'; name it with a category prefix or add " + std::string(kReferenceIndexName));
    }
    e.category = *cat;
    e.path = p.filename().string();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ReferenceVideo> open_references(const fs::path& dir) {
  std::vector<ReferenceVideo> refs;
  for (const auto& e : list_references(dir)) refs.push_back(ReferenceVideo::from_file(e.label, e.category, dir / e.path));
  return refs;
}

std::vector<ReferenceEntry> write_generated_references(const fs::path& dir, int count, int frames, int width,
                                                       int height, std::uint64_t seed) {
  fs::create_directories(dir);
  const ReferenceOptions opts{width, height, frames, {25, 1}};
  std::vector<ReferenceEntry> entries;
  Json index = Json::array();
  for (const auto& ref : gen_reference_set(count, opts, seed)) {
    const std::string file = ref.label + ".y4m";
    write_clip(ref.load(), dir / file, ClipFormat::Y4m);
    entries.push_back({ref.label, ref.category, file});
    index.push_back({{"label", ref.label}, {"content_category", std::string(to_string(ref.category))}, {"path", file}});
  }
  write_json_file(dir / kReferenceIndexName, index);
  return entries;
}

// ---- classify ------------------------------------------------------------

VideoClip every_nth_frame(const VideoClip& clip, int stride) {
  if (stride < 1) throw std::invalid_argument("frame stride must be >= 1");
  if (stride == 1) return clip;
  std::vector<Frame> frames;
  for (std::size_t i = 0; i < clip.size(); i += static_cast<std::size_t>(stride)) frames.push_back(clip.frame(i));
  return with_frames(clip, std::move(frames));
}

ClassifyRun classify_corpus(const fs::path& corpus_dir, const Manifest& manifest,
                            const ClassifierThresholds& thresholds, int frame_stride) {
  if (manifest.empty()) throw DataError("corpus manifest is empty");
  ClassifyRun run;
  for (const auto& e : manifest) {
    try {
      const fs::path p = corpus_dir / e.path;
      const VideoClip clip = every_nth_frame(read_clip(p, detect_format(p)), frame_stride);
      VideoClassification v{e.id, classify_video(clip, thresholds)};
      run.accuracy.add(e.spec.kind, v.report.decision);
      run.videos.push_back(std::move(v));
    } catch (const IoError& err) {
      run.failures.push_back({e.id, err.what()});
    }
  }
  return run;
}

Json classify_run_to_json(const ClassifyRun& run, const ClassifierThresholds& thresholds) {
  Json videos = Json::array();
  for (const auto& v : run.videos) videos.push_back(classification_to_json(v));
  Json failures = Json::array();
  for (const auto& f : run.failures) failures.push_back({{"id", f.id}, {"error", f.error}});
  Json accuracy = Json::object();
  Json confusion = Json::object();
  for (DistortionKind k : kAllKinds) {
    const auto name = std::string(to_string(k));
    const double acc = run.accuracy.accuracy(k);
    accuracy[name] = std::isfinite(acc) ? Json(acc) : Json(nullptr);
    Json row = Json::object();
    for (std::size_t c = 0; c < 6; ++c) {
      const std::string col = c < 5 ? std::string(to_string(kAllKinds[c])) : "None";
      row[col] = run.accuracy.confusion[static_cast<std::size_t>(k)][c];
    }
    confusion[name] = row;
  }
  return {{"thresholds", thresholds_to_json(thresholds)},
          {"videos", videos},
          {"failures", failures},
          {"accuracy", accuracy},
          {"confusion", confusion}};
}

std::string accuracy_table(const AccuracySummary& a) {
  std::ostringstream os;
  os << "kind                  videos  correct  accuracy\n";
  for (DistortionKind k : kAllKinds) {
    const auto i = static_cast<std::size_t>(k);
    char line[96];
    const double acc = a.accuracy(k);
    std::snprintf(line, sizeof line, "%-20s %7d %8d  %s\n", std::string(to_string(k)).c_str(), a.totals[i],
                  a.confusion[i][i], std::isfinite(acc) ? (format_double(100.0 * acc, 1) + "%").c_str() : "n/a");
    os << line;
  }
  return os.str();
}

// ---- score ---------------------------------------------------------------

ScoreRun score_corpus(const fs::path& corpus_dir, const Manifest& manifest, const fs::path& refs_dir,
                      const std::vector<Metric>& metrics, int frame_stride) {
  if (manifest.empty()) throw DataError("corpus manifest is empty");
  std::map<std::string, fs::path> ref_paths;
  for (const auto& r : list_references(refs_dir)) ref_paths[r.label] = refs_dir / r.path;

  ScoreRun run;
  std::string cached_label;
  std::optional<VideoClip> cached_ref;
  for (const auto& e : manifest) {
    const auto it = ref_paths.find(e.reference_label);
    if (it == ref_paths.end()) {
      throw DataError("video " + e.id + " refers to reference '" + e.reference_label + "' not found in " +
                      refs_dir.string());
    }
    try {
      if (cached_label != e.reference_label) {
        cached_ref.reset();
        cached_label.clear();
        cached_ref = every_nth_frame(read_clip(it->second, detect_format(it->second)), frame_stride);
        cached_label = e.reference_label;
      }
      const fs::path p = corpus_dir / e.path;
      const VideoClip dist = every_nth_frame(read_clip(p, detect_format(p)), frame_stride);
      for (Metric m : metrics) run.scores.push_back({e.id, score_clip(m, *cached_ref, dist)});
    } catch (const IoError& err) {
      run.failures.push_back({e.id, err.what()});
    }
  }
  return run;
}

// ---- simulated observers -------------------------------------------------

PreferenceRecord simulate_record(const SessionPlan& plan, const Manifest& manifest,
                                 const SimulatedObserver& obs, std::uint64_t seed) {
  std::map<std::string, int> level;
  for (const auto& e : manifest) level[e.id] = e.spec.level;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PreferenceRecord record;
  record.observer_id = plan.observer_id;
  for (const auto& t : plan.trials) {
    Choice choice;
    if (obs.random) {
      choice = unit(rng) < 0.5 ? Choice::A : Choice::B;
    } else {
      const auto la = level.find(t.a), lb = level.find(t.b);
      if (la == level.end() || lb == level.end()) throw SubjectiveError("plan video missing from manifest");
      const double gap = static_cast<double>(lb->second - la->second);  // > 0 when A is milder
      const double p_equal = obs.equal_rate * std::exp(-gap * gap);
      const double p_a = 1.0 / (1.0 + std::exp(-obs.sharpness * gap));
      const double u = unit(rng);
      if (u < p_equal) choice = Choice::Equal;
      else choice = unit(rng) < p_a ? Choice::A : Choice::B;
    }
    record.results.push_back({t.idx, choice});
  }
  return record;
}

std::string plan_file_name(std::string_view observer_id) { return std::string(observer_id) + ".plan.json"; }
std::string record_file_name(std::string_view observer_id) { return std::string(observer_id) + ".record.json"; }

std::vector<ObserverSession> load_sessions(const fs::path& plans_dir, const fs::path& records_dir) {
  if (!fs::is_directory(records_dir)) throw IoError(IoErrc::NotFound, "records directory not found: " + records_dir.string());
  constexpr std::string_view suffix = ".record.json";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(records_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ObserverSession> sessions;
  for (const auto& f : files) {
    ObserverSession s;
    s.record = record_from_json(read_json_file(f));
    const fs::path plan_path = plans_dir / plan_file_name(s.record.observer_id);
    if (!fs::exists(plan_path)) {
      throw DataError("record " + f.filename().string() + " has no matching plan " + plan_path.string());
    }
    s.plan = plan_from_json(read_json_file(plan_path));
    sessions.push_back(std::move(s));
  }
  if (sessions.empty()) throw DataError("no records found in " + records_dir.string());
  return sessions;
}

// ---- command line --------------------------------------------------------

namespace {

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void add(CLI::App* cmd, bool with_seed) {
    cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    if (with_seed) seed_opt = cmd->add_option("--seed", seed, "master seed (default from config)");
  }

  PipelineConfig resolve() const {
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed_opt && seed_opt->count() > 0) c.seed = seed;
    return c;
  }
};

fs::path manifest_path(const std::string& manifest, const std::string& corpus) {
  if (!manifest.empty()) return manifest;
  if (corpus.empty()) throw CLI::ValidationError("--manifest", "give --manifest or --corpus");
  return fs::path(corpus) / kManifestFileName;
}

ClipFormat parse_format(const std::string& s) {
  if (s == "y4m") return ClipFormat::Y4m;
  if (s == "png") return ClipFormat::PngDir;
  throw CLI::ValidationError("--format", "must be y4m or png");
}

Cohort parse_cohort_flag(const std::string& s) {
  const auto c = parse_cohort(s);
  if (!c) throw CLI::ValidationError("--cohort", "must be expert or nonexpert");
  return *c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quality assessment toolkit for distorted laparoscopic video", "lapvqa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lapvqa 1.0.0");

  std::function<int()> action;

  // gen-refs
  auto* gen = app.add_subcommand("gen-refs", "write procedural reference clips");
  Common gen_common;
  gen_common.add(gen, true);
  std::string gen_out;
  int gen_count = 10, gen_frames = 250, gen_width = 512, gen_height = 288;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--count", gen_count, "number of references")->check(CLI::PositiveNumber);
  gen->add_option("--frames", gen_frames, "frames per clip")->check(CLI::PositiveNumber);
  gen->add_option("--width", gen_width)->check(CLI::Range(16, 8192));
  gen->add_option("--height", gen_height)->check(CLI::Range(16, 8192));
  gen->callback([&] {
    action = [&] {
      const PipelineConfig c = gen_common.resolve();
      const auto refs = write_generated_references(gen_out, gen_count, gen_frames, gen_width, gen_height, c.seed);
      out << "wrote " << refs.size() << " reference clips to " << gen_out << "\n";
      return int(kExitOk);
    };
  });

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize the distorted corpus and its manifest");
  Common synth_common;
  synth_common.add(synth, true);
  std::string synth_refs, synth_out, synth_format;
  synth->add_option("--refs", synth_refs, "reference clip directory")->required();
  synth->add_option("--out", synth_out, "corpus output directory")->required();
  auto* synth_format_opt = synth->add_option("--format", synth_format, "y4m or png");
  synth->callback([&] {
    action = [&] {
      PipelineConfig c = synth_common.resolve();
      if (synth_format_opt->count() > 0) c.corpus_format = parse_format(synth_format);
      c.levels.validate_complete();
      const auto refs = open_references(synth_refs);
      if (refs.empty()) throw DataError("no reference clips found in " + synth_refs);
      const Manifest m = synthesize_corpus(refs, c.levels, c.seed, synth_out, c.corpus_format,
                                           [&](const ManifestEntry& e, std::size_t done, std::size_t total) {
                                             out << "[" << done << "/" << total << "] " << e.id << "\n";
                                           });
      out << "wrote " << m.size() << " videos and " << kManifestFileName << " to " << synth_out << "\n";
      return int(kExitOk);
    };
  });

  // classify
  auto* classify = app.add_subcommand("classify", "identify the distortion of every corpus video");
  Common cls_common;
  cls_common.add(classify, false);
  std::string cls_corpus, cls_manifest, cls_out;
  int cls_stride = 1;
  double t_pbi = 0, t_aniso = 0, t_noise = 0, t_lmr = 0;
  classify->add_option("--corpus", cls_corpus, "corpus directory")->required();
  classify->add_option("--manifest", cls_manifest, "manifest (default <corpus>/manifest.json)");
  classify->add_option("--out", cls_out, "report JSON (default <corpus>/classification.json)");
  auto* cls_stride_opt = classify->add_option("--stride", cls_stride, "use every n-th frame")->check(CLI::PositiveNumber);
  auto* o_pbi = classify->add_option("--pbi-blur", t_pbi, "PBI blur threshold");
  auto* o_aniso = classify->add_option("--anisotropy", t_aniso, "motion vs defocus anisotropy threshold");
  auto* o_noise = classify->add_option("--noise-sigma", t_noise, "noise sigma threshold");
  auto* o_lmr = classify->add_option("--lmr", t_lmr, "LMR threshold");
  classify->callback([&] {
    action = [&] {
      PipelineConfig c = cls_common.resolve();
      if (cls_stride_opt->count() > 0) c.frame_stride = cls_stride;
      if (o_pbi->count() > 0) c.thresholds.pbi_blur = t_pbi;
      if (o_aniso->count() > 0) c.thresholds.pbi_motion_vs_defocus = t_aniso;
      if (o_noise->count() > 0) c.thresholds.noise_sigma = t_noise;
      if (o_lmr->count() > 0) c.thresholds.lmr = t_lmr;
      c.thresholds.validate();
      const Manifest m = read_manifest(manifest_path(cls_manifest, cls_corpus));
      const ClassifyRun run = classify_corpus(cls_corpus, m, c.thresholds, c.frame_stride);
      const fs::path dest = cls_out.empty() ? fs::path(cls_corpus) / "classification.json" : fs::path(cls_out);
      write_json_file(dest, classify_run_to_json(run, c.thresholds));
      out << accuracy_table(run.accuracy);
      for (const auto& f : run.failures) err << "failed: " << f.id << ": " << f.error << "\n";
      out << "wrote " << dest.string() << "\n";
      return run.videos.empty() ? int(kExitData) : int(kExitOk);
    };
  });

  // score
  auto* score = app.add_subcommand("score", "full-reference metric scores for every corpus video");
  Common score_common;
  score_common.add(score, false);
  std::string sc_corpus, sc_manifest, sc_refs, sc_out;
  std::vector<std::string> sc_metrics;
  int sc_stride = 1;
  score->add_option("--corpus", sc_corpus, "corpus directory")->required();
  score->add_option("--refs", sc_refs, "reference clip directory")->required();
  score->add_option("--manifest", sc_manifest, "manifest (default <corpus>/manifest.json)");
  score->add_option("--out", sc_out, "scores JSON (default <corpus>/scores.json)");
  auto* sc_metrics_opt = score->add_option("--metrics", sc_metrics, "subset of PSNR SSIM VIF")->delimiter(',');
  auto* sc_stride_opt = score->add_option("--stride", sc_stride, "use every n-th frame")->check(CLI::PositiveNumber);
  score->callback([&] {
    action = [&] {
      PipelineConfig c = score_common.resolve();
      if (sc_stride_opt->count() > 0) c.frame_stride = sc_stride;
      if (sc_metrics_opt->count() > 0) {
        c.metrics.clear();
        for (const auto& s : sc_metrics) {
          const auto m = parse_metric(s);
          if (!m) throw CLI::ValidationError("--metrics", "unknown metric " + s);
          c.metrics.push_back(*m);
        }
      }
      const Manifest m = read_manifest(manifest_path(sc_manifest, sc_corpus));
      const ScoreRun run = score_corpus(sc_corpus, m, sc_refs, c.metrics, c.frame_stride);
      const fs::path dest = sc_out.empty() ? fs::path(sc_corpus) / "scores.json" : fs::path(sc_out);
      write_json_file(dest, scores_to_json(run.scores));
      for (const auto& f : run.failures) err << "failed: " << f.id << ": " << f.error << "\n";
      out << "wrote " << run.scores.size() << " scores to " << dest.string() << "\n";
      return run.scores.empty() ? int(kExitData) : int(kExitOk);
    };
  });

  // plan
  auto* plan = app.add_subcommand("plan", "pairwise-comparison session plans, one per observer");
  Common plan_common;
  plan_common.add(plan, true);
  std::string pl_corpus, pl_manifest, pl_out;
  std::vector<std::string> pl_observers;
  plan->add_option("--corpus", pl_corpus, "corpus directory");
  plan->add_option("--manifest", pl_manifest, "manifest (default <corpus>/manifest.json)");
  plan->add_option("--observer", pl_observers, "observer id (repeatable)")->required();
  plan->add_option("--out", pl_out, "plan directory")->required();
  plan->callback([&] {
    action = [&] {
      const PipelineConfig c = plan_common.resolve();
      const Manifest m = read_manifest(manifest_path(pl_manifest, pl_corpus));
      for (const auto& id : pl_observers) {
        if (!valid_observer_id(id)) throw CLI::ValidationError("--observer", "invalid observer id '" + id + "'");
        const SessionPlan p = plan_session(m, id, c.seed);
        write_json_file(fs::path(pl_out) / plan_file_name(id), plan_to_json(p));
        out << id << ": " << p.trials.size() << " trials\n";
      }
      return int(kExitOk);
    };
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "answer plans with simulated observers");
  Common sim_common;
  sim_common.add(simulate, true);
  std::string sim_plans, sim_corpus, sim_manifest, sim_out;
  std::vector<std::string> sim_random;
  double sim_sharpness = 2.5;
  simulate->add_option("--plans", sim_plans, "plan directory")->required();
  simulate->add_option("--corpus", sim_corpus, "corpus directory");
  simulate->add_option("--manifest", sim_manifest, "manifest (default <corpus>/manifest.json)");
  simulate->add_option("--out", sim_out, "record directory")->required();
  simulate->add_option("--random-observer", sim_random, "observer ids that answer at random");
  simulate->add_option("--sharpness", sim_sharpness, "logistic slope of simulated preference");
  simulate->callback([&] {
    action = [&] {
      const PipelineConfig c = sim_common.resolve();
      const Manifest m = read_manifest(manifest_path(sim_manifest, sim_corpus));
      std::vector<fs::path> plans;
      for (const auto& entry : fs::directory_iterator(sim_plans)) {
        if (entry.path().filename().string().ends_with(".plan.json")) plans.push_back(entry.path());
      }
      std::sort(plans.begin(), plans.end());
      if (plans.empty()) throw DataError("no plans found in " + sim_plans);
      for (const auto& p : plans) {
        const SessionPlan sp = plan_from_json(read_json_file(p));
        SimulatedObserver obs;
        obs.sharpness = sim_sharpness;
        obs.random = std::find(sim_random.begin(), sim_random.end(), sp.observer_id) != sim_random.end();
        const std::uint64_t s = derive_seed(c.seed, {std::hash<std::string>{}(sp.observer_id)});
        write_json_file(fs::path(sim_out) / record_file_name(sp.observer_id), record_to_json(simulate_record(sp, m, obs, s)));
      }
      out << "wrote " << plans.size() << " records to " << sim_out << "\n";
      return int(kExitOk);
    };
  });

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "screen observers and compute per-video MOS");
  Common agg_common;
  agg_common.add(aggregate, false);
  std::string ag_plans, ag_records, ag_out, ag_cohort;
  bool ag_no_screen = false;
  aggregate->add_option("--plans", ag_plans, "plan directory")->required();
  aggregate->add_option("--records", ag_records, "record directory")->required();
  aggregate->add_option("--out", ag_out, "MOS CSV")->required();
  auto* ag_cohort_opt = aggregate->add_option("--cohort", ag_cohort, "expert or nonexpert");
  aggregate->add_flag("--no-screen", ag_no_screen, "keep intransitive observers");
  aggregate->callback([&] {
    action = [&] {
      PipelineConfig c = agg_common.resolve();
      if (ag_cohort_opt->count() > 0) c.cohort = parse_cohort_flag(ag_cohort);
      const auto sessions = load_sessions(ag_plans, ag_records);
      std::vector<ObserverSession> kept = sessions;
      if (!ag_no_screen) {
        const OutlierReport screen = detect_outliers(sessions);
        for (const auto& w : screen.warnings) err << "warning: " << w << "\n";
        kept = without_outliers(sessions, screen.flagged);
        for (const auto& id : screen.flagged) {
          out << "excluded " << id << " (" << screen.triads.at(id) << " circular triads, threshold "
              << format_double(screen.threshold, 2) << ")\n";
        }
      }
      const MosTable mos = aggregate_mos(kept, c.cohort);
      write_text_atomic(ag_out, mos_to_csv(mos));
      out << "MOS for " << mos.entries.size() << " videos from " << kept.size() << " observers -> " << ag_out << "\n";
      return int(kExitOk);
    };
  });

  // report
  auto* report = app.add_subcommand("report", "PLCC/SROCC of each metric against MOS");
  Common rep_common;
  rep_common.add(report, false);
  std::string rp_scores, rp_mos, rp_corpus, rp_manifest, rp_out, rp_cohort;
  report->add_option("--scores", rp_scores, "scores JSON")->required();
  report->add_option("--mos", rp_mos, "MOS CSV")->required();
  report->add_option("--corpus", rp_corpus, "corpus directory");
  report->add_option("--manifest", rp_manifest, "manifest (default <corpus>/manifest.json)");
  report->add_option("--out", rp_out, "output prefix; writes <out>.csv and <out>.md")->required();
  auto* rp_cohort_opt = report->add_option("--cohort", rp_cohort, "expert or nonexpert");
  report->callback([&] {
    action = [&] {
      PipelineConfig c = rep_common.resolve();
      if (rp_cohort_opt->count() > 0) c.cohort = parse_cohort_flag(rp_cohort);
      const Manifest m = read_manifest(manifest_path(rp_manifest, rp_corpus));
      const ScoreTable scores = to_score_table(scores_from_json(read_json_file(rp_scores)));
      const MosTable mos = mos_from_csv(read_text(rp_mos));
      const CorrelationReport r = build_report(scores, mos, m, c.cohort);
      write_text_atomic(rp_out + ".csv", r.to_csv());
      const std::string md = r.to_markdown();
      write_text_atomic(rp_out + ".md", md);
      out << md;
      return int(kExitOk);
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "session endpoint for the study UI");
  std::string sv_plans, sv_records, sv_static, sv_host = "127.0.0.1";
  int sv_port = 8080;
  serve->add_option("--plans", sv_plans, "plan directory")->required();
  serve->add_option("--records", sv_records, "record directory")->required();
  serve->add_option("--static", sv_static, "directory served under /media/");
  serve->add_option("--host", sv_host);
  serve->add_option("--port", sv_port)->check(CLI::Range(1, 65535));
  serve->callback([&] {
    action = [&] {
      SessionServer server(sv_plans, sv_records,
                           sv_static.empty() ? std::nullopt : std::optional<fs::path>(sv_static));
      if (!server.bind(sv_host, sv_port)) throw DataError("cannot bind " + sv_host + ":" + std::to_string(sv_port));
      out << "serving on http://" << sv_host << ":" << sv_port << std::endl;
      return server.listen_after_bind() ? int(kExitOk) : int(kExitData);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? int(kExitOk) : int(kExitUsage);
  }

  try {
    return action ? action() : int(kExitUsage);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IncompleteLevelTable& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace lapvqa
