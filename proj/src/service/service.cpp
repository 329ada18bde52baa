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
#include "cqa/service/service.hpp"

#include <chrono>
#include <cmath>

#include <httplib.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "cqa/core/errors.hpp"

namespace cqa {
namespace {

using nlohmann::json;

constexpr std::size_t kSnippetChars = 200;

json error_body(const std::string& message) { return json{{"error", message}}; }

json similarity_json(double s) { return std::isfinite(s) ? json(s) : json(nullptr); }

json tier_stats_json(const TierStats& s) {
  return json{{"member_count", s.member_count},
              {"cluster_count", s.cluster_count},
              {"mean_cluster_size", s.mean_cluster_size}};
}

json answer_json(const AnswerResult& r) {
  json evidence = json::array();
  for (const auto& e : r.decision.evidence_qa) {
    evidence.push_back({{"id", e.record.id},
                        {"question", e.record.question},
                        {"answer", e.record.answer},
                        {"score", e.record.score},
                        {"similarity", e.similarity}});
  }
  for (const auto& d : r.decision.evidence_docs) {
    evidence.push_back({{"doc_id", d.chunk.id},
                        {"snippet", d.chunk.text.substr(0, kSnippetChars)},
                        {"similarity", d.similarity}});
  }
  json out = {{"answer", r.answer},
              {"path", std::string(to_string(r.decision.path))},
              {"best_similarity", similarity_json(r.decision.best_similarity)},
              {"score", r.score},
              {"latency_s", r.latency_seconds},
              {"parse_fallback", r.parse_fallback},
              {"evidence", evidence}};
  out["temperature"] = r.decision.temperature_used ? json(*r.decision.temperature_used) : json(nullptr);
  out["question_id"] = r.record_id ? json(*r.record_id) : json(nullptr);
  if (r.update) out["update"] = std::string(to_string(r.update->kind));
  return out;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Service::Service(Engine& engine, ServiceOptions opts, std::shared_ptr<spdlog::logger> logger)
    : engine_(engine), opts_(std::move(opts)), logger_(std::move(logger)) {
  if (!logger_) {
    logger_ = spdlog::get("cqa.service");
    if (!logger_) {
      logger_ = spdlog::stderr_logger_mt("cqa.service");
      logger_->set_pattern("%v");
    }
  }
  counters_.per_path = {{Path::kReuseHigh, 0}, {Path::kGenerateWithHigh, 0},
                        {Path::kGenerateWithLowAndKb, 0}};
}

Service::~Service() { stop(); }

Service::Response Service::handle_ask(std::string_view body) {
  const auto t0 = std::chrono::steady_clock::now();
  auto req = json::parse(body, nullptr, /*allow_exceptions=*/false);
  auto reject = [&](int status, const std::string& msg) {
    log_request("/ask", status, since(t0), json{{"error", msg}});
    return Response{status, error_body(msg)};
  };
  if (req.is_discarded() || !req.is_object()) return reject(400, "body must be a JSON object");
  if (!req.contains("question") || !req["question"].is_string() ||
      req["question"].get<std::string>().find_first_not_of(" \t\r\n") == std::string::npos) {
    return reject(400, "question must be a non-empty string");
  }
  std::optional<std::string> reference;
  if (req.contains("reference") && req["reference"].is_string()) {
    reference = req["reference"].get<std::string>();
  }

  try {
    AnswerResult r = engine_.process(req["question"].get<std::string>(), reference,
                                     [this](const AnswerResult& res) {
                                       std::lock_guard<std::mutex> lock(counters_mu_);
                                       ++counters_.requests;
                                       ++counters_.per_path[res.decision.path];
                                     });
    {
      std::lock_guard<std::mutex> lock(counters_mu_);
      counters_.latency_sum_s += r.latency_seconds;
    }
    log_request("/ask", 200, since(t0),
                json{{"decision", std::string(to_string(r.decision.path))},
                     {"best_similarity", similarity_json(r.decision.best_similarity)},
                     {"score", r.score}});
    return Response{200, answer_json(r)};
  } catch (const UpstreamError& e) {
    return reject(502, e.what());
  } catch (const InvalidArgument& e) {
    return reject(400, e.what());
  } catch (const DegenerateEmbedding& e) {
    return reject(400, e.what());
  } catch (const std::exception& e) {
    return reject(500, e.what());
  }
}

Service::Response Service::handle_feedback(std::string_view body) {
  const auto t0 = std::chrono::steady_clock::now();
  auto req = json::parse(body, nullptr, /*allow_exceptions=*/false);
  auto reject = [&](int status, const std::string& msg) {
    log_request("/feedback", status, since(t0), json{{"error", msg}});
    return Response{status, error_body(msg)};
  };
  if (req.is_discarded() || !req.is_object()) return reject(400, "body must be a JSON object");
  if (!req.contains("question_id") || !req["question_id"].is_number_unsigned()) {
    return reject(400, "question_id must be a non-negative integer");
  }
  if (!req.contains("score") || !req["score"].is_number()) {
    return reject(400, "score must be a number");
  }
  const double score = req["score"].get<double>();
  if (!(score >= 0.0 && score <= 1.0)) return reject(400, "score must lie in [0,1]");

  try {
    const FeedbackResult f = engine_.apply_feedback(req["question_id"].get<RecordId>(), score);
    json out = {{"applied", f.applied},
                {"retiered", f.retiered},
                {"tier", std::string(to_string(f.tier))}};
    out["question_id"] = f.record_id ? json(*f.record_id) : json(nullptr);
    log_request("/feedback", 200, since(t0), json{{"retiered", f.retiered}});
    return Response{200, out};
  } catch (const NotFound& e) {
    return reject(404, e.what());
  } catch (const InvalidArgument& e) {
    return reject(400, e.what());
  } catch (const std::exception& e) {
    return reject(500, e.what());
  }
}

Service::Response Service::handle_stats() const {
  json out;
  engine_.inspect([&](const CqaMemory& memory) {
    std::lock_guard<std::mutex> lock(counters_mu_);
    out["high"] = tier_stats_json(memory.high().stats());
    out["low"] = tier_stats_json(memory.low().stats());
    json paths = json::object();
    for (const auto& [path, n] : counters_.per_path) paths[std::string(to_string(path))] = n;
    out["path_counts"] = paths;
    out["requests"] = counters_.requests;
    const double n = static_cast<double>(counters_.requests);
    out["reuse_ratio"] = counters_.requests == 0 ? 0.0 : counters_.per_path.at(Path::kReuseHigh) / n;
    out["avg_latency_s"] = counters_.requests == 0 ? 0.0 : counters_.latency_sum_s / n;
  });
  out["kb_size"] = engine_.knowledge_size();
  return Response{200, out};
}

Service::Response Service::handle_snapshot() {
  if (!opts_.snapshot_path) return Response{400, error_body("no snapshot path configured")};
  try {
    engine_.save_snapshot(*opts_.snapshot_path);
    return Response{200, json{{"saved", opts_.snapshot_path->string()}}};
  } catch (const std::exception& e) {
    return Response{500, error_body(e.what())};
  }
}

ServiceCounters Service::counters() const {
  std::lock_guard<std::mutex> lock(counters_mu_);
  return counters_;
}

void Service::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->Post("/ask", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_ask(req.body));
  });
  server_->Post("/feedback", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_feedback(req.body));
  });
  server_->Get("/stats", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_stats());
  });
  server_->Post("/snapshot", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_snapshot());
  });
  server_->Get("/healthz", [reply](const httplib::Request&, httplib::Response& res) {
    reply(res, Response{200, json{{"ok", true}}});
  });
}

int Service::start() {
  install_routes();
  int port = opts_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(opts_.host);
  } else if (!server_->bind_to_port(opts_.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error("cannot bind " + opts_.host + ":" + std::to_string(opts_.port));
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  if (opts_.snapshot_path && opts_.autosave_interval_s > 0.0) {
    autosave_thread_ = std::thread([this] { autosave_loop(); });
  }
  server_->wait_until_ready();
  logger_->info(json{{"event", "listening"}, {"host", opts_.host}, {"port", port}}.dump());
  return port;
}

void Service::run() {
  start();
  if (server_thread_.joinable()) server_thread_.join();
}

void Service::stop() {
  if (stopped_.exchange(true)) return;
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  {
    std::lock_guard<std::mutex> lock(autosave_mu_);
    stopping_ = true;
  }
  autosave_cv_.notify_all();
  if (autosave_thread_.joinable()) autosave_thread_.join();
  if (opts_.snapshot_path && server_) {
    try {
      engine_.save_snapshot(*opts_.snapshot_path);
    } catch (const std::exception& e) {
      logger_->error(json{{"event", "snapshot_failed"}, {"error", e.what()}}.dump());
    }
  }
}

void Service::autosave_loop() {
  std::unique_lock<std::mutex> lock(autosave_mu_);
  const auto interval = std::chrono::duration<double>(opts_.autosave_interval_s);
  while (!autosave_cv_.wait_for(lock, interval, [this] { return stopping_; })) {
    try {
      engine_.save_snapshot(*opts_.snapshot_path);
    } catch (const std::exception& e) {
      logger_->error(json{{"event", "autosave_failed"}, {"error", e.what()}}.dump());
    }
  }
}

void Service::log_request(const std::string& endpoint, int status, double latency_s,
                          const json& extra) const {
  json line = {{"endpoint", endpoint}, {"status", status}, {"latency_s", latency_s}};
  for (const auto& [k, v] : extra.items()) line[k] = v;
  logger_->info(line.dump());
}

}  // namespace cqa
