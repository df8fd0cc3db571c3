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
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace lapvqa;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const fs::path& path) { return path.string(); }

// Two tiny references and their corpus, shared by the tests below.
class TinyCorpus {
public:
  TinyCorpus() : dir_("cli") {
    REQUIRE(cli({"gen-refs", "--out", p(refs()), "--count", "2", "--frames", "3", "--width", "64", "--height", "48",
                 "--seed", "5"})
                .code == kExitOk);
    REQUIRE(cli({"synth", "--refs", p(refs()), "--out", p(corpus()), "--seed", "7"}).code == kExitOk);
  }
  fs::path refs() const { return dir_ / "refs"; }
  fs::path corpus() const { return dir_ / "corpus"; }
  fs::path operator/(const std::string& leaf) const { return dir_ / leaf; }

private:
  test::TempDir dir_;
};

}  // namespace

TEST_CASE("help exits 0 and usage errors exit 1") {
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"synth", "--help"}).code == kExitOk);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"synth", "--refs", "x"}).code == kExitUsage);  // --out is required
  CHECK(cli({"classify", "--corpus", "c", "--stride", "0"}).code == kExitUsage);
}

TEST_CASE("missing inputs are data errors") {
  test::TempDir dir("cli-missing");
  const Run r = cli({"classify", "--corpus", p(dir / "nothing")});
  CHECK(r.code == kExitData);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("synth names the missing level cell and fails") {
  test::TempDir dir("cli-levels");
  REQUIRE(cli({"gen-refs", "--out", p(dir / "refs"), "--count", "1", "--frames", "1", "--width", "32", "--height",
               "32"})
              .code == kExitOk);
  std::ofstream(dir / "cfg.json") << R"({"levels": {"Noise": {"1": {"variance": 0.001}}}})";
  const Run r = cli({"synth", "--refs", p(dir / "refs"), "--out", p(dir / "c"), "--config", p(dir / "cfg.json")});
  CHECK(r.code != kExitOk);
  CHECK(r.err.find("(Noise, level 2)") != std::string::npos);
}

TEST_CASE("the whole pipeline runs on a tiny corpus") {
  TinyCorpus t;
  const Manifest m = read_manifest(t.corpus() / kManifestFileName);
  CHECK(m.size() == 40);

  SUBCASE("synth is deterministic") {
    REQUIRE(cli({"synth", "--refs", p(t.refs()), "--out", p(t / "again"), "--seed", "7"}).code == kExitOk);
    CHECK(read_text(t.corpus() / kManifestFileName) == read_text(t / "again" / kManifestFileName));
  }

  SUBCASE("classify writes a report and a five-row accuracy table") {
    const Run r = cli({"classify", "--corpus", p(t.corpus())});
    REQUIRE(r.code == kExitOk);
    const Json j = read_json_file(t.corpus() / "classification.json");
    CHECK(j.at("videos").size() == 40);
    CHECK(j.at("accuracy").size() == 5);
    CHECK(j.at("confusion").size() == 5);
    int rows = 0;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) rows += line.find('%') != std::string::npos;
    CHECK(rows == 5);
  }

  SUBCASE("an unreadable clip is a recorded failure, not a crash") {
    fs::resize_file(t.corpus() / m[3].path, 100);
    const Run r = cli({"classify", "--corpus", p(t.corpus()), "--out", p(t / "cls.json")});
    CHECK(r.code == kExitOk);
    const Json j = read_json_file(t / "cls.json");
    CHECK(j.at("videos").size() == 39);
    REQUIRE(j.at("failures").size() == 1);
    CHECK(j.at("failures")[0].at("id") == m[3].id);
    CHECK(r.err.find(m[3].id) != std::string::npos);
  }

  SUBCASE("an empty manifest is an error") {
    write_manifest({}, t / "empty.json");
    CHECK(cli({"classify", "--corpus", p(t.corpus()), "--manifest", p(t / "empty.json")}).code == kExitData);
  }

  SUBCASE("threshold flags override the defaults") {
    REQUIRE(cli({"classify", "--corpus", p(t.corpus()), "--out", p(t / "c.json"), "--noise-sigma", "1e6", "--lmr",
                 "1e-9", "--pbi-blur", "-1e6"})
                .code == kExitOk);
    const Json j = read_json_file(t / "c.json");
    CHECK(j.at("thresholds").at("noise_sigma") == 1e6);
    for (const auto& v : j.at("videos")) {
      if (v.at("p_smoke").get<double>() <= 0.5) CHECK(v.at("decision").is_null());
    }
  }

  SUBCASE("score, plan, simulate, aggregate and report chain together") {
    REQUIRE(cli({"score", "--corpus", p(t.corpus()), "--refs", p(t.refs()), "--out", p(t / "scores.json")}).code ==
            kExitOk);
    CHECK(read_json_file(t / "scores.json").size() == 120);

    std::vector<std::string> plan_args{"plan", "--corpus", p(t.corpus()), "--out", p(t / "plans"), "--seed", "3"};
    for (int i = 0; i < 8; ++i) {
      plan_args.push_back("--observer");
      plan_args.push_back("obs" + std::to_string(i));
    }
    REQUIRE(cli(plan_args).code == kExitOk);
    CHECK(plan_from_json(read_json_file(t / "plans" / "obs0.plan.json")).trials.size() == 60);

    REQUIRE(cli({"simulate", "--plans", p(t / "plans"), "--corpus", p(t.corpus()), "--out", p(t / "records"),
                 "--random-observer", "obs7", "--seed", "2"})
                .code == kExitOk);
    const Run agg = cli({"aggregate", "--plans", p(t / "plans"), "--records", p(t / "records"), "--out",
                         p(t / "mos.csv"), "--cohort", "expert"});
    REQUIRE(agg.code == kExitOk);
    const MosTable mos = mos_from_csv(read_text(t / "mos.csv"));
    CHECK(mos.entries.size() == 40);
    CHECK(mos.entries.front().cohort == Cohort::Expert);

    const Run rep = cli({"report", "--scores", p(t / "scores.json"), "--mos", p(t / "mos.csv"), "--corpus",
                         p(t.corpus()), "--cohort", "expert", "--out", p(t / "table")});
    REQUIRE(rep.code == kExitOk);
    CHECK(fs::exists(t / "table.csv"));
    CHECK(read_text(t / "table.md").find("Defocus Blur") != std::string::npos);

    // MOS for one cohort cannot be reported as the other.
    CHECK(cli({"report", "--scores", p(t / "scores.json"), "--mos", p(t / "mos.csv"), "--corpus", p(t.corpus()),
               "--cohort", "nonexpert", "--out", p(t / "x")})
              .code == kExitData);
  }
}

TEST_CASE("plans refuse observer ids that are not safe file names") {
  TinyCorpus t;
  CHECK(cli({"plan", "--corpus", p(t.corpus()), "--out", p(t / "plans"), "--observer", "../evil"}).code == kExitUsage);
}

TEST_CASE("reference listing falls back to the category prefix") {
  test::TempDir dir("refs-scan");
  write_clip(VideoClip({Frame(8, 8)}), dir / "GB07.y4m", ClipFormat::Y4m);
  write_clip(VideoClip({Frame(8, 8)}), dir / "SA02", ClipFormat::PngDir);
  const auto refs = list_references(dir.path());
  REQUIRE(refs.size() == 2);
  CHECK(refs[0].label == "GB07");
  CHECK(refs[0].category == ContentCategory::GB);
  CHECK(refs[1].category == ContentCategory::SA);
  write_clip(VideoClip({Frame(8, 8)}), dir / "zz.y4m", ClipFormat::Y4m);
  CHECK_THROWS_AS(list_references(dir.path()), FormatError);
}

TEST_CASE("every nth frame keeps the first frame and the rate") {
  const VideoClip clip = test::textured_clip(8, 8, 7, 1);
  const VideoClip s = every_nth_frame(clip, 3);
  REQUIRE(s.size() == 3);
  CHECK(s.frame(1) == clip.frame(3));
  CHECK(s.fps() == clip.fps());
  CHECK(every_nth_frame(clip, 1) == clip);
  CHECK_THROWS(every_nth_frame(clip, 0));
}

TEST_CASE("simulated observers prefer milder videos more often as the gap grows") {
  const Manifest m = test::make_manifest(10);
  std::map<std::string, int> lv;
  for (const auto& e : m) lv[e.id] = e.spec.level;
  std::array<int, 4> agree{}, total{};
  for (int o = 0; o < 20; ++o) {
    const SessionPlan plan = plan_session(m, "o" + std::to_string(o), 1);
    const PreferenceRecord r = simulate_record(plan, m, SimulatedObserver{}, 100 + o);
    for (std::size_t i = 0; i < plan.trials.size(); ++i) {
      const int gap = std::abs(lv[plan.trials[i].a] - lv[plan.trials[i].b]);
      const bool a_milder = lv[plan.trials[i].a] < lv[plan.trials[i].b];
      const Choice c = r.results[i].choice;
      total[gap] += 1;
      agree[gap] += (c == Choice::A && a_milder) || (c == Choice::B && !a_milder);
    }
  }
  const double g1 = static_cast<double>(agree[1]) / total[1];
  const double g2 = static_cast<double>(agree[2]) / total[2];
  const double g3 = static_cast<double>(agree[3]) / total[3];
  CHECK(g1 > 0.6);
  CHECK(g2 > g1);
  CHECK(g3 > g2);
}
