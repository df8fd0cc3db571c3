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

#include "lapvqa/server.hpp"

#include "lapvqa/pipeline.hpp"
#include "lapvqa/serialize.hpp"

#include <httplib.h>

#include <mutex>

namespace lapvqa {

namespace fs = std::filesystem;

bool valid_observer_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

struct SessionServer::Impl {
  fs::path plans;
  fs::path records;
  httplib::Server http;
  std::mutex write_mutex;

  static void reply_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(Json{{"error", message}}.dump(), "application/json");
  }

  void get_plan(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!valid_observer_id(id)) return reply_error(res, 400, "invalid observer id");
    const fs::path file = plans / plan_file_name(id);
    if (!fs::exists(file)) return reply_error(res, 404, "no plan for observer " + id);
    try {
      const SessionPlan plan = plan_from_json(read_json_file(file));
      res.set_content(plan_to_json(plan).dump(), "application/json");
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  }

  void post_record(const httplib::Request& req, httplib::Response& res) {
    PreferenceRecord record;
    try {
      record = record_from_json(Json::parse(req.body));
    } catch (const std::exception& e) {
      return reply_error(res, 400, e.what());
    }
    if (!valid_observer_id(record.observer_id)) return reply_error(res, 400, "invalid observer id");
    const fs::path plan_file = plans / plan_file_name(record.observer_id);
    if (!fs::exists(plan_file)) return reply_error(res, 404, "no plan for observer " + record.observer_id);
    try {
      const SessionPlan plan = plan_from_json(read_json_file(plan_file));
      score_observer(plan, record);  // throws on any mismatch with the plan
    } catch (const std::exception& e) {
      return reply_error(res, 409, e.what());
    }
    std::lock_guard lock(write_mutex);
    fs::create_directories(records);
    write_json_file(records / record_file_name(record.observer_id), record_to_json(record));
    res.status = 201;
    res.set_content(Json{{"stored", record_file_name(record.observer_id)}}.dump(), "application/json");
  }
};

SessionServer::SessionServer(fs::path plans_dir, fs::path records_dir, std::optional<fs::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->plans = std::move(plans_dir);
  impl_->records = std::move(records_dir);
  Impl* self = impl_.get();
  impl_->http.Get(R"(/plan/([^/]+))",
                  [self](const httplib::Request& req, httplib::Response& res) { self->get_plan(req, res); });
  impl_->http.Post("/record",
                   [self](const httplib::Request& req, httplib::Response& res) { self->post_record(req, res); });
  if (static_dir) impl_->http.set_mount_point("/media", static_dir->string());
}

SessionServer::~SessionServer() { stop(); }

int SessionServer::bind_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }

bool SessionServer::bind(const std::string& host, int port) { return impl_->http.bind_to_port(host, port); }

bool SessionServer::listen_after_bind() { return impl_->http.listen_after_bind(); }

void SessionServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void SessionServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace lapvqa
