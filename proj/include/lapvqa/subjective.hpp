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

#ifndef LAPVQA_SUBJECTIVE_HPP
#define LAPVQA_SUBJECTIVE_HPP

#include "lapvqa/synth.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lapvqa {

// Pairwise-comparison protocol. Each group is one (reference, kind); its four
// severity levels give C(4,2) = 6 trials. A preferred video earns one point,
// an Equal answer half a point to each side.

enum class Choice { A, B, Equal };

std::string_view to_string(Choice c);
std::optional<Choice> parse_choice(std::string_view s);

enum class Cohort { Expert, NonExpert };

std::string_view to_string(Cohort c);
std::optional<Cohort> parse_cohort(std::string_view s);

struct Trial {
  int idx = 0;
  std::string a;      // video id shown first
  std::string b;
  std::string group;  // "<reference>|<kind>"
  bool operator==(const Trial&) const = default;
};

struct SessionPlan {
  std::string observer_id;
  std::uint64_t seed = 0;
  std::vector<Trial> trials;
  bool operator==(const SessionPlan&) const = default;
};

struct TrialResult {
  int idx = 0;
  Choice choice = Choice::Equal;
  bool operator==(const TrialResult&) const = default;
};

struct PreferenceRecord {
  std::string observer_id;
  std::vector<TrialResult> results;
  bool operator==(const PreferenceRecord&) const = default;
};

/// A plan together with the observer's answers to it.
struct ObserverSession {
  SessionPlan plan;
  PreferenceRecord record;
};

/// Thrown for incomplete manifests, sessions or cohorts.
class SubjectiveError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string group_key(std::string_view reference_label, DistortionKind kind);

/// Every within-group pair once, shuffled, with randomized A/B sides.
SessionPlan plan_session(const Manifest& manifest, std::string observer_id, std::uint64_t seed);

using VideoScores = std::map<std::string, double>;

/// Raw per-video points for one observer. Throws SubjectiveError when the record
/// misses, repeats or adds trials, or belongs to another observer.
VideoScores score_observer(const SessionPlan& plan, const PreferenceRecord& record);

/// Directed 3-cycles in one group's strict-preference digraph.
int count_circular_triads(const SessionPlan& plan, const PreferenceRecord& record, std::string_view group);

struct OutlierReport {
  std::vector<std::string> flagged;
  std::map<std::string, int> triads;  // per observer, summed over groups
  double threshold = 0.0;             // mean + 2 * stddev of triad counts
  std::vector<std::string> warnings;
};

/// Flags observers whose circular-triad total exceeds mean + 2 stddev
/// (population) of the cohort. Fewer than three observers: nothing flagged.
OutlierReport detect_outliers(std::span<const ObserverSession> sessions);

struct MosEntry {
  std::string video_id;
  double mos = 0.0;             // in [0, 3]
  double mos_normalized = 0.0;  // mos / 3
  int n_observers = 0;
  Cohort cohort = Cohort::NonExpert;
  bool operator==(const MosEntry&) const = default;
};

struct MosTable {
  std::vector<MosEntry> entries;  // sorted by video id

  const MosEntry* find(std::string_view video_id) const;
};

/// Mean of raw per-observer scores. Throws SubjectiveError for an empty cohort.
MosTable aggregate_mos(std::span<const ObserverSession> sessions, Cohort cohort);

/// Sessions whose observer is not in `flagged`.
std::vector<ObserverSession> without_outliers(std::span<const ObserverSession> sessions,
                                              const std::vector<std::string>& flagged);

}  // namespace lapvqa

#endif  // LAPVQA_SUBJECTIVE_HPP
