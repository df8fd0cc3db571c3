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
#include "lapvqa/server.hpp"
#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <sstream>
#include <thread>

using namespace lapvqa;

namespace {

class RunningServer {
public:
  RunningServer(const std::filesystem::path& plans, const std::filesystem::path& records,
                std::optional<std::filesystem::path> media = std::nullopt)
      : server_(plans, records, media) {
    port_ = server_.bind_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~RunningServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

private:
  SessionServer server_;
  int port_ = -1;
  std::thread thread_;
};

}  // namespace

TEST_CASE("observer ids are restricted to safe file names") {
  CHECK(valid_observer_id("obs_01-a.b"));
  CHECK_FALSE(valid_observer_id(""));
  CHECK_FALSE(valid_observer_id(".hidden"));
  CHECK_FALSE(valid_observer_id("a/b"));
  CHECK_FALSE(valid_observer_id("a b"));
  CHECK_FALSE(valid_observer_id(std::string(129, 'x')));
}

TEST_CASE("REST session endpoint serves plans and stores records") {
  test::TempDir dir("server");
  const Manifest m = test::make_manifest(1, {DistortionKind::Noise});
  const SessionPlan plan = plan_session(m, "alice", 4);
  write_json_file(dir / "plans" / plan_file_name("alice"), plan_to_json(plan));
  write_text_atomic(dir / "media" / "hello.txt", "hi");

  RunningServer server(dir / "plans", dir / "records", dir / "media");
  httplib::Client c = server.client();

  auto got = c.Get("/plan/alice");
  REQUIRE(got);
  CHECK(got->status == 200);
  CHECK(plan_from_json(Json::parse(got->body)) == plan);

  CHECK(c.Get("/plan/bob")->status == 404);
  CHECK(c.Get("/plan/.secret")->status == 400);
  CHECK(c.Get("/media/hello.txt")->body == "hi");

  CHECK(c.Post("/record", "{oops", "application/json")->status == 400);

  PreferenceRecord short_record{"alice", {{plan.trials[0].idx, Choice::A}}};
  CHECK(c.Post("/record", record_to_json(short_record).dump(), "application/json")->status == 409);

  PreferenceRecord stranger{"bob", {}};
  CHECK(c.Post("/record", record_to_json(stranger).dump(), "application/json")->status == 404);

  // A scripted six-trial session: A, B, Equal, A, B, Equal.
  PreferenceRecord r{"alice", {}};
  const Choice script[] = {Choice::A, Choice::B, Choice::Equal, Choice::A, Choice::B, Choice::Equal};
  REQUIRE(plan.trials.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) r.results.push_back({plan.trials[i].idx, script[i]});
  auto posted = c.Post("/record", record_to_json(r).dump(), "application/json");
  REQUIRE(posted);
  CHECK(posted->status == 201);
  const PreferenceRecord stored = record_from_json(read_json_file(dir / "records" / record_file_name("alice")));
  CHECK(stored == r);

  // The stored record aggregates without warnings and keeps every choice.
  std::ostringstream out, err;
  const int code = run_cli({"aggregate", "--plans", (dir / "plans").string(), "--records", (dir / "records").string(),
                            "--out", (dir / "mos.csv").string(), "--no-screen"},
                           out, err);
  CHECK(code == kExitOk);
  CHECK(err.str().empty());
  const auto sessions = load_sessions(dir / "plans", dir / "records");
  REQUIRE(sessions.size() == 1);
  for (std::size_t i = 0; i < 6; ++i) CHECK(sessions[0].record.results[i].choice == script[i]);
  const MosTable mos = mos_from_csv(read_text(dir / "mos.csv"));
  const VideoScores raw = score_observer(plan, r);
  for (const auto& e : mos.entries) CHECK(e.mos == raw.at(e.video_id));
}
