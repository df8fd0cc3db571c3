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

#include "lapvqa/subjective.hpp"

#include "lapvqa/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

namespace lapvqa {

std::string_view to_string(Choice c) {
  switch (c) {
    case Choice::A: return "A";
    case Choice::B: return "B";
    case Choice::Equal: return "Equal";
  }
  return "?";
}

std::optional<Choice> parse_choice(std::string_view s) {
  if (s == "A") return Choice::A;
  if (s == "B") return Choice::B;
  if (s == "Equal") return Choice::Equal;
  return std::nullopt;
}

std::string_view to_string(Cohort c) { return c == Cohort::Expert ? "expert" : "nonexpert"; }

std::optional<Cohort> parse_cohort(std::string_view s) {
  if (s == "expert") return Cohort::Expert;
  if (s == "nonexpert") return Cohort::NonExpert;
  return std::nullopt;
}

std::string group_key(std::string_view reference_label, DistortionKind kind) {
  return std::string(reference_label) + "|" + std::string(to_string(kind));
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SessionPlan plan_session(const Manifest& manifest, std::string observer_id, std::uint64_t seed) {
  std::map<std::string, std::array<const ManifestEntry*, kLevelCount>> groups;
  for (const auto& e : manifest) {
    if (e.spec.level < 1 || e.spec.level > kLevelCount) {
      throw SubjectiveError("manifest entry " + e.id + " has level outside 1..4");
    }
    auto& slots = groups[group_key(e.reference_label, e.spec.kind)];
    auto& slot = slots[static_cast<std::size_t>(e.spec.level - 1)];
    if (slot != nullptr) throw SubjectiveError("manifest repeats level " + std::to_string(e.spec.level) + " for " + e.id);
    slot = &e;
  }
  if (groups.empty()) throw SubjectiveError("manifest is empty");

  SessionPlan plan;
  plan.observer_id = std::move(observer_id);
  plan.seed = seed;
  for (const auto& [key, slots] : groups) {
    for (int l = 0; l < kLevelCount; ++l) {
      if (slots[static_cast<std::size_t>(l)] == nullptr) {
        throw SubjectiveError("incomplete manifest: group " + key + " lacks level " + std::to_string(l + 1));
      }
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
      for (std::size_t j = i + 1; j < slots.size(); ++j) {
        plan.trials.push_back({0, slots[i]->id, slots[j]->id, key});
      }
    }
  }

  std::mt19937_64 rng(derive_seed(seed, {fnv1a(plan.observer_id)}));
  std::shuffle(plan.trials.begin(), plan.trials.end(), rng);
  std::bernoulli_distribution swap(0.5);
  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    auto& t = plan.trials[i];
    if (swap(rng)) std::swap(t.a, t.b);
    t.idx = static_cast<int>(i);
  }
  return plan;
}

namespace {

/// Trial results in plan order; throws on any mismatch.
std::vector<Choice> align_results(const SessionPlan& plan, const PreferenceRecord& record) {
  if (record.observer_id != plan.observer_id) {
    throw SubjectiveError("record observer '" + record.observer_id + "' does not match plan observer '" +
                          plan.observer_id + "'");
  }
  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < plan.trials.size(); ++i) position[plan.trials[i].idx] = i;
  std::vector<std::optional<Choice>> slots(plan.trials.size());
  for (const auto& r : record.results) {
    const auto it = position.find(r.idx);
    if (it == position.end()) {
      throw SubjectiveError(plan.observer_id + ": result for unknown trial " + std::to_string(r.idx));
    }
    if (slots[it->second]) {
      throw SubjectiveError(plan.observer_id + ": duplicate result for trial " + std::to_string(r.idx));
    }
    slots[it->second] = r.choice;
  }
  std::vector<Choice> out;
  out.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      throw SubjectiveError(plan.observer_id + ": missing result for trial " + std::to_string(plan.trials[i].idx));
    }
    out.push_back(*slots[i]);
  }
  return out;
}

}  // namespace

VideoScores score_observer(const SessionPlan& plan, const PreferenceRecord& record) {
  const std::vector<Choice> choices = align_results(plan, record);
  VideoScores scores;
  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const Trial& t = plan.trials[i];
    double& a = scores[t.a];
    double& b = scores[t.b];
    switch (choices[i]) {
      case Choice::A: a += 1.0; break;
      case Choice::B: b += 1.0; break;
      case Choice::Equal:
        a += 0.5;
        b += 0.5;
        break;
    }
  }
  return scores;
}

int count_circular_triads(const SessionPlan& plan, const PreferenceRecord& record, std::string_view group) {
  const std::vector<Choice> choices = align_results(plan, record);
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;  // winner -> loser
  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const Trial& t = plan.trials[i];
    if (t.group != group) continue;
    for (const auto* v : {&t.a, &t.b}) {
      if (std::find(nodes.begin(), nodes.end(), *v) == nodes.end()) nodes.push_back(*v);
    }
    if (choices[i] == Choice::A) edges.emplace_back(t.a, t.b);
    else if (choices[i] == Choice::B) edges.emplace_back(t.b, t.a);
  }
  const std::size_t n = nodes.size();
  std::vector<std::vector<char>> beats(n, std::vector<char>(n, 0));
  auto index = [&](const std::string& v) {
    return static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), v) - nodes.begin());
  };
  for (const auto& [w, l] : edges) beats[index(w)][index(l)] = 1;
  int triads = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if ((beats[i][j] && beats[j][k] && beats[k][i]) || (beats[i][k] && beats[k][j] && beats[j][i])) ++triads;
      }
    }
  }
  return triads;
}

OutlierReport detect_outliers(std::span<const ObserverSession> sessions) {
  OutlierReport report;
  std::vector<double> counts;
  for (const auto& s : sessions) {
    std::set<std::string> groups;
    for (const auto& t : s.plan.trials) groups.insert(t.group);
    int total = 0;
    for (const auto& g : groups) total += count_circular_triads(s.plan, s.record, g);
    report.triads[s.plan.observer_id] = total;
    counts.push_back(total);
  }
  if (sessions.size() < 3) {
    report.warnings.push_back("outlier screening needs at least 3 observers, got " + std::to_string(sessions.size()) +
                              "; nobody flagged");
    return report;
  }
  // Sum in a fixed order so the threshold does not depend on observer order.
  std::sort(counts.begin(), counts.end());
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= static_cast<double>(counts.size());
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= static_cast<double>(counts.size());
  report.threshold = mean + 2.0 * std::sqrt(var);
  for (const auto& [id, count] : report.triads) {
    if (count > report.threshold) report.flagged.push_back(id);
  }
  return report;
}

const MosEntry* MosTable::find(std::string_view video_id) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), video_id,
                                   [](const MosEntry& e, std::string_view id) { return e.video_id < id; });
  return it != entries.end() && it->video_id == video_id ? &*it : nullptr;
}

MosTable aggregate_mos(std::span<const ObserverSession> sessions, Cohort cohort) {
  if (sessions.empty()) throw SubjectiveError("cannot aggregate MOS over an empty cohort");
  std::map<std::string, std::pair<double, int>> totals;
  for (const auto& s : sessions) {
    for (const auto& [video, score] : score_observer(s.plan, s.record)) {
      auto& t = totals[video];
      t.first += score;
      t.second += 1;
    }
  }
  MosTable table;
  table.entries.reserve(totals.size());
  for (const auto& [video, t] : totals) {
    const double mos = t.first / t.second;
    table.entries.push_back({video, mos, mos / 3.0, t.second, cohort});
  }
  return table;
}

std::vector<ObserverSession> without_outliers(std::span<const ObserverSession> sessions,
                                              const std::vector<std::string>& flagged) {
  std::vector<ObserverSession> kept;
  for (const auto& s : sessions) {
    if (std::find(flagged.begin(), flagged.end(), s.plan.observer_id) == flagged.end()) kept.push_back(s);
  }
  return kept;
}

}  // namespace lapvqa
