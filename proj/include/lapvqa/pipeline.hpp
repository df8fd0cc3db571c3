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

#ifndef LAPVQA_PIPELINE_HPP
#define LAPVQA_PIPELINE_HPP

#include "lapvqa/classify.hpp"
#include "lapvqa/evalcorr.hpp"
#include "lapvqa/io.hpp"
#include "lapvqa/metrics.hpp"
#include "lapvqa/serialize.hpp"
#include "lapvqa/subjective.hpp"
#include "lapvqa/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Orchestration behind the `lapvqa` command line. Every stage reads and
// writes plain files so the stages can be run, inspected and rerun alone.

namespace lapvqa {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Settings shared by all commands. A JSON config file fills these in and
/// command-line flags override individual fields.
struct PipelineConfig {
  std::uint64_t seed = 7;
  LevelTable levels = LevelTable::defaults();
  ClassifierThresholds thresholds = ClassifierThresholds::defaults();
  ClipFormat corpus_format = ClipFormat::Y4m;
  int frame_stride = 1;  // classify and score every n-th frame
  std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  Cohort cohort = Cohort::NonExpert;
};

/// Keys: seed, levels (full table, replaces the defaults), level_overrides
/// (merged over the defaults), thresholds, corpus_format, frame_stride,
/// metrics, cohort. Unknown keys are rejected so typos do not pass silently.
PipelineConfig config_from_json(const Json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// ---- references ----------------------------------------------------------

inline constexpr std::string_view kReferenceIndexName = "references.json";

struct ReferenceEntry {
  std::string label;
  ContentCategory category = ContentCategory::BL;
  std::string path;  // relative to the reference directory
};

/// Reads `references.json` when present, otherwise lists `*.y4m` files and
/// PNG frame directories, taking the content category from the first two
/// letters of each label.
std::vector<ReferenceEntry> list_references(const std::filesystem::path& dir);
std::vector<ReferenceVideo> open_references(const std::filesystem::path& dir);

/// Writes procedurally generated reference clips plus `references.json`.
std::vector<ReferenceEntry> write_generated_references(const std::filesystem::path& dir, int count,
                                                       int frames, int width, int height,
                                                       std::uint64_t seed);

// ---- stages --------------------------------------------------------------

VideoClip every_nth_frame(const VideoClip& clip, int stride);

struct ClassifyFailure {
  std::string id;
  std::string error;
};

struct ClassifyRun {
  std::vector<VideoClassification> videos;
  std::vector<ClassifyFailure> failures;
  AccuracySummary accuracy;
};

ClassifyRun classify_corpus(const std::filesystem::path& corpus_dir, const Manifest& manifest,
                            const ClassifierThresholds& thresholds, int frame_stride);
Json classify_run_to_json(const ClassifyRun& run, const ClassifierThresholds& thresholds);
std::string accuracy_table(const AccuracySummary& accuracy);

struct ScoreRun {
  std::vector<VideoScore> scores;
  std::vector<ClassifyFailure> failures;
};

ScoreRun score_corpus(const std::filesystem::path& corpus_dir, const Manifest& manifest,
                      const std::filesystem::path& refs_dir, const std::vector<Metric>& metrics,
                      int frame_stride);

/// Stand-in for a human observer. Latent quality falls with severity level;
/// P(prefer A) is logistic in the quality gap, and near-ties sometimes come
/// back as Equal. A random observer ignores quality altogether.
struct SimulatedObserver {
  double sharpness = 2.5;    // logistic slope per level of quality gap
  double equal_rate = 0.15;  // chance of Equal when the gap is zero
  bool random = false;
};

PreferenceRecord simulate_record(const SessionPlan& plan, const Manifest& manifest,
                                 const SimulatedObserver& observer, std::uint64_t seed);

/// Pairs `<id>.plan.json` with `<id>.record.json` across two directories.
std::vector<ObserverSession> load_sessions(const std::filesystem::path& plans_dir,
                                           const std::filesystem::path& records_dir);

std::string plan_file_name(std::string_view observer_id);
std::string record_file_name(std::string_view observer_id);

// ---- command line --------------------------------------------------------

/// Parses `args` (without the program name), runs one subcommand and returns
/// an ExitCode. Messages go to `out`; diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lapvqa

#endif  // LAPVQA_PIPELINE_HPP
