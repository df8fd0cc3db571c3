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

#ifndef LAPVQA_SERIALIZE_HPP
#define LAPVQA_SERIALIZE_HPP

#include "lapvqa/classify.hpp"
#include "lapvqa/evalcorr.hpp"
#include "lapvqa/metrics.hpp"
#include "lapvqa/subjective.hpp"
#include "lapvqa/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

// JSON and CSV wire formats shared with the study UI and between pipeline
// stages. Parsers throw FormatError with the offending field named.

namespace lapvqa {

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

Json params_to_json(const DistortionParams& params);
DistortionParams params_from_json(DistortionKind kind, const Json& j);

Json manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const Json& j);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// {"Noise": {"1": {...}, ..., "4": {...}}, ...}; cells are not checked for completeness here.
Json level_table_to_json(const LevelTable& table);
LevelTable level_table_from_json(const Json& j);

Json thresholds_to_json(const ClassifierThresholds& t);
/// Fields present in `j` override `base`.
ClassifierThresholds thresholds_from_json(const Json& j, ClassifierThresholds base = ClassifierThresholds::defaults());

struct VideoClassification {
  std::string id;
  ClassificationReport report;
};

Json classification_to_json(const VideoClassification& v);

struct VideoScore {
  std::string video_id;
  MetricScore score;
};

/// Infinite PSNR is written as null with "identical": true.
Json scores_to_json(const std::vector<VideoScore>& scores);
std::vector<VideoScore> scores_from_json(const Json& j);
ScoreTable to_score_table(const std::vector<VideoScore>& scores);

Json plan_to_json(const SessionPlan& plan);
SessionPlan plan_from_json(const Json& j);
Json record_to_json(const PreferenceRecord& record);
PreferenceRecord record_from_json(const Json& j);

std::string mos_to_csv(const MosTable& table);
MosTable mos_from_csv(const std::string& text);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace lapvqa

#endif  // LAPVQA_SERIALIZE_HPP
