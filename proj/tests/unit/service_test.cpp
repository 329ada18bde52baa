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
#include <gtest/gtest.h>

#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "cqa/backends/mock.hpp"
#include "cqa/backends/scorer.hpp"
#include "cqa/service/service.hpp"
#include "fakes.hpp"

namespace cqa {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { build(std::make_shared<OverlapScorer>()); }

  void build(std::shared_ptr<Scorer> scorer, ServiceOptions opts = {}) {
    service_.reset();
    EngineConfig cfg;
    cfg.embedding_dim = 64;
    engine_ = std::make_unique<Engine>(
        cfg, Backends{std::make_shared<MockEmbedder>(64), std::make_shared<MockGenerator>(), std::move(scorer)});
    log_ = std::make_shared<std::ostringstream>();
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(*log_);
    auto logger = std::make_shared<spdlog::logger>("test", sink);
    logger->set_pattern("%v");
    service_ = std::make_unique<Service>(*engine_, opts, logger);
  }

  json ask(const std::string& q) {
    const auto r = service_->handle_ask(json{{"question", q}}.dump());
    EXPECT_EQ(r.status, 200) << r.body.dump();
    return r.body;
  }

  std::unique_ptr<Engine> engine_;
  std::shared_ptr<std::ostringstream> log_;
  std::unique_ptr<Service> service_;
};

TEST_F(ServiceTest, FreshStatsAreZero) {
  const auto r = service_->handle_stats();
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["requests"], 0);
  EXPECT_EQ(r.body["reuse_ratio"], 0.0);
  EXPECT_EQ(r.body["avg_latency_s"], 0.0);
  EXPECT_EQ(r.body["high"]["member_count"], 0);
  EXPECT_EQ(r.body["low"]["member_count"], 0);
  EXPECT_EQ(r.body["kb_size"], 0);
  EXPECT_EQ(r.body["path_counts"]["reuse_high"], 0);
}

TEST_F(ServiceTest, NovelQuestionGoesToLowAndKb) {
  engine_->add_knowledge(1, "Backups are retained for seven days.");
  const auto body = ask("How long are backups retained?");
  EXPECT_EQ(body["path"], "generate_low_kb");
  EXPECT_TRUE(body["best_similarity"].is_null());
  EXPECT_FALSE(body["parse_fallback"].get<bool>());
  ASSERT_EQ(body["evidence"].size(), 1u);
  EXPECT_EQ(body["evidence"][0]["doc_id"], 1);
  EXPECT_EQ(body["evidence"][0]["snippet"], "Backups are retained for seven days.");
  EXPECT_TRUE(body["temperature"].is_number());
  EXPECT_TRUE(body["question_id"].is_number_unsigned());
}

TEST_F(ServiceTest, StoredDuplicateIsReused) {
  engine_->seed("How do I enable audit logs?", "Turn on auditing in settings.", 1.0);
  const auto body = ask("How do I enable audit logs?");
  EXPECT_EQ(body["path"], "reuse_high");
  EXPECT_EQ(body["answer"], "Turn on auditing in settings.");
  EXPECT_GE(body["latency_s"].get<double>(), 0.0);
  EXPECT_TRUE(body["temperature"].is_null());
  EXPECT_EQ(body["evidence"][0]["question"], "How do I enable audit logs?");
}

TEST_F(ServiceTest, BadRequests) {
  EXPECT_EQ(service_->handle_ask("").status, 400);
  EXPECT_EQ(service_->handle_ask("{").status, 400);
  EXPECT_EQ(service_->handle_ask(R"({"question": ""})").status, 400);
  EXPECT_EQ(service_->handle_ask(R"({"question": "   "})").status, 400);
  EXPECT_EQ(service_->handle_ask(R"({"question": 5})").status, 400);
  EXPECT_EQ(service_->handle_feedback("").status, 400);
  EXPECT_EQ(service_->handle_feedback(R"({"question_id": 1})").status, 400);
  EXPECT_EQ(service_->handle_feedback(R"({"question_id": -1, "score": 0.5})").status, 400);
  EXPECT_EQ(service_->counters().requests, 0u);
}

TEST_F(ServiceTest, ReuseRatioAfterFourAsks) {
  engine_->seed("seeded question about quotas", "Quotas are per region.", 1.0);
  ask("first unrelated thing");
  ask("second unrelated matter");
  ask("seeded question about quotas");
  ask("third unrelated topic");
  const auto s = service_->handle_stats().body;
  EXPECT_EQ(s["requests"], 4);
  EXPECT_DOUBLE_EQ(s["reuse_ratio"].get<double>(), 0.25);
  EXPECT_EQ(s["path_counts"]["reuse_high"], 1);
  const auto st = engine_->stats();
  EXPECT_EQ(s["high"]["member_count"], st.high.member_count);
  EXPECT_EQ(s["low"]["member_count"], st.low.member_count);
  EXPECT_EQ(s["high"]["cluster_count"], st.high.cluster_count);
  EXPECT_EQ(s["low"]["cluster_count"], st.low.cluster_count);
}

TEST_F(ServiceTest, FeedbackRetiersAcrossGamma) {
  auto scorer = std::make_shared<testing::FixedScorer>(0.65);
  build(scorer);
  const auto body = ask("why is replication lagging");
  const auto id = body["question_id"].get<RecordId>();
  EXPECT_EQ(engine_->stats().low.member_count, 1u);

  const auto r = service_->handle_feedback(json{{"question_id", id}, {"score", 0.9}}.dump());
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_TRUE(r.body["applied"].get<bool>());
  EXPECT_TRUE(r.body["retiered"].get<bool>());
  EXPECT_EQ(r.body["tier"], "high");
  EXPECT_EQ(engine_->stats().low.member_count, 0u);
  EXPECT_EQ(engine_->stats().high.member_count, 1u);

  const auto new_id = r.body["question_id"].get<RecordId>();
  const auto same = service_->handle_feedback(json{{"question_id", new_id}, {"score", 0.8}}.dump());
  EXPECT_EQ(same.status, 200);
  EXPECT_FALSE(same.body["retiered"].get<bool>());
  EXPECT_EQ(same.body["tier"], "high");
  EXPECT_EQ(engine_->find_record(new_id)->score, 0.8);

  EXPECT_EQ(service_->handle_feedback(json{{"question_id", new_id}, {"score", 1.5}}.dump()).status, 400);
  EXPECT_EQ(service_->handle_feedback(json{{"question_id", 424242}, {"score", 0.5}}.dump()).status, 404);
}

TEST_F(ServiceTest, UpstreamFailureIs502) {
  EngineConfig cfg;
  cfg.embedding_dim = 64;
  Engine failing(cfg, Backends{std::make_shared<MockEmbedder>(64), std::make_shared<FailingGenerator>(),
                               std::make_shared<OverlapScorer>()});
  Service svc(failing, {}, std::make_shared<spdlog::logger>("quiet"));
  EXPECT_EQ(svc.handle_ask(R"({"question": "anything"})").status, 502);
  EXPECT_EQ(svc.counters().requests, 0u);
}

TEST_F(ServiceTest, OneJsonLogLinePerRequest) {
  ask("first question here");
  service_->handle_ask("");
  service_->handle_stats();
  std::istringstream in(log_->str());
  std::string line;
  int asks = 0;
  while (std::getline(in, line)) {
    const auto j = json::parse(line);
    if (j.value("endpoint", "") == "/ask") {
      ++asks;
      EXPECT_TRUE(j.contains("latency_s"));
      EXPECT_TRUE(j.contains("status"));
      if (j["status"] == 200) EXPECT_EQ(j["decision"], "generate_low_kb");
    }
  }
  EXPECT_EQ(asks, 2);
}

TEST_F(ServiceTest, SnapshotEndpoint) {
  EXPECT_EQ(service_->handle_snapshot().status, 400);
  const auto path = std::filesystem::path(::testing::TempDir()) / "svc.snap";
  std::filesystem::remove(path);
  ServiceOptions opts;
  opts.snapshot_path = path;
  build(std::make_shared<OverlapScorer>(), opts);
  ask("something to store");
  EXPECT_EQ(service_->handle_snapshot().status, 200);
  EXPECT_TRUE(std::filesystem::exists(path));
}

TEST_F(ServiceTest, ConcurrentRequestsOverSockets) {
  ServiceOptions opts;
  opts.port = 0;
  build(std::make_shared<OverlapScorer>(), opts);
  engine_->add_knowledge(1, "general product documentation");
  for (int i = 0; i < 4; ++i) {
    engine_->seed("seeded topic number " + std::to_string(i), "seeded answer " + std::to_string(i), 1.0);
  }
  // Seeds this similar collapse under the mock embedder; count what stuck.
  const std::size_t seeded = engine_->stats().high.member_count;
  const int port = service_->start();
  ASSERT_GT(port, 0);

  constexpr int kRequests = 32;
  std::vector<json> responses(kRequests);
  std::vector<int> statuses(kRequests, 0);
  std::vector<std::thread> threads;
  for (int i = 0; i < kRequests; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client cli("127.0.0.1", port);
      const std::string q = i % 4 == 0 ? "seeded topic number " + std::to_string(i % 16 / 4)
                                       : "concurrent question " + std::to_string(i % 20);
      auto res = cli.Post("/ask", json{{"question", q}, {"reference", "reference " + q}}.dump(),
                          "application/json");
      if (!res) {
        ADD_FAILURE() << "request " << i << ": " << httplib::to_string(res.error());
      } else {
        statuses[i] = res->status;
        responses[i] = json::parse(res->body);
      }
    });
  }
  for (auto& t : threads) t.join();

  std::size_t reused = 0, stored = 0;
  for (int i = 0; i < kRequests; ++i) {
    ASSERT_EQ(statuses[i], 200) << i;
    if (responses[i]["path"] == "reuse_high") ++reused;
    const std::string update = responses[i].value("update", "");
    if (update == "inserted" || update == "new_cluster") ++stored;
  }
  EXPECT_GE(reused, 8u);

  httplib::Client cli("127.0.0.1", port);
  auto stats_res = cli.Get("/stats");
  ASSERT_TRUE(stats_res);
  const auto s = json::parse(stats_res->body);
  EXPECT_EQ(s["requests"], kRequests);
  std::size_t path_sum = 0;
  for (const auto& [k, v] : s["path_counts"].items()) path_sum += v.get<std::size_t>();
  EXPECT_EQ(path_sum, static_cast<std::size_t>(kRequests));
  EXPECT_EQ(s["path_counts"]["reuse_high"], reused);
  const std::size_t members = s["high"]["member_count"].get<std::size_t>() + s["low"]["member_count"].get<std::size_t>();
  EXPECT_EQ(members, seeded + stored);
  EXPECT_DOUBLE_EQ(s["reuse_ratio"].get<double>(), static_cast<double>(reused) / kRequests);

  auto health = cli.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);

  auto fb = cli.Post("/feedback", R"({"question_id": 999999, "score": 0.5})", "application/json");
  ASSERT_TRUE(fb);
  EXPECT_EQ(fb->status, 404);
  service_->stop();
  engine_->inspect([](const CqaMemory& m) {
    m.high().check_invariants();
    m.low().check_invariants();
  });
}

}  // namespace
}  // namespace cqa
