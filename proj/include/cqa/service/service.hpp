// Copyright 2026-present the cqa-engine authors
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
#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include <json.hpp>

#include "cqa/router/engine.hpp"

namespace httplib {
class Server;
}
namespace spdlog {
class logger;
}

namespace cqa {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> snapshot_path;
  // 0 disables periodic saving; the snapshot is still written on stop().
  double autosave_interval_s = 0.0;
};

struct ServiceCounters {
  std::size_t requests = 0;  // successful /ask calls
  std::map<Path, std::size_t> per_path;
  double latency_sum_s = 0.0;
};

// HTTP front end:
//   POST /ask       {question, reference?}
//   POST /feedback  {question_id, score}
//   GET  /stats
//   POST /snapshot  save now
//   GET  /healthz
// Handlers are also callable directly, without a socket.
class Service {
 public:
  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  Service(Engine& engine, ServiceOptions opts, std::shared_ptr<spdlog::logger> logger = nullptr);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle_ask(std::string_view body);
  Response handle_feedback(std::string_view body);
  Response handle_stats() const;
  Response handle_snapshot();

  // Binds (port 0 picks a free port), serves on a background thread, and
  // returns the bound port.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();

  ServiceCounters counters() const;

 private:
  void install_routes();
  void autosave_loop();
  void log_request(const std::string& endpoint, int status, double latency_s,
                   const nlohmann::json& extra) const;

  Engine& engine_;
  ServiceOptions opts_;
  std::shared_ptr<spdlog::logger> logger_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;

  mutable std::mutex counters_mu_;
  ServiceCounters counters_;

  std::mutex autosave_mu_;
  std::condition_variable autosave_cv_;
  bool stopping_ = false;
  std::thread autosave_thread_;
  std::atomic<bool> stopped_{false};
};

}  // namespace cqa
