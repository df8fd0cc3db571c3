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

#ifndef LAPVQA_SERVER_HPP
#define LAPVQA_SERVER_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace lapvqa {

/// Minimal session endpoint for the study UI, one observer at a time.
///
///   GET  /plan/{observer}  -> the observer's plan JSON, 404 if none
///   POST /record           -> validates the record against its plan and
///                             stores it; 201 on success, 400/404/409 otherwise
///
/// When `static_dir` is set, its files (renditions, UI bundle) are served
/// under `/media/`.
class SessionServer {
public:
  SessionServer(std::filesystem::path plans_dir, std::filesystem::path records_dir,
                std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  /// Binds to an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Blocks until stop() is called from another thread.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Observer ids become file names, so only [A-Za-z0-9._-] is accepted and
/// leading dots are refused.
bool valid_observer_id(std::string_view id);

}  // namespace lapvqa

#endif  // LAPVQA_SERVER_HPP
