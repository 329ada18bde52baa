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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cqa/backends/factory.hpp"
#include "cqa/backends/mock.hpp"
#include "cqa/backends/scorer.hpp"
#include "cqa/core/errors.hpp"
#include "cqa/replay/dataset.hpp"
#include "cqa/replay/replay.hpp"
#include "cqa/replay/report.hpp"
#include "cqa/replay/synthetic.hpp"
#include "fakes.hpp"
#include "oracles.hpp"

namespace cqa {
namespace {

using nlohmann::json;

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::path(::testing::TempDir()) / name;
  std::filesystem::remove_all(p);
  return p;
}

EngineConfig mock_config(std::size_t dim) {
  EngineConfig cfg;
  cfg.embedding_dim = dim;
  return cfg;
}

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.stream_topics = 120;
  spec.seed_topics = 12;
  return spec;
}

TEST(Dataset, RoundTrip) {
  const ReplayDataset ds = make_synthetic_dataset(small_spec());
  std::stringstream buf;
  write_dataset(buf, ds);
  const ReplayDataset back = parse_dataset(buf, true);
  EXPECT_EQ(back.name, ds.name);
  EXPECT_EQ(back.dim_hint, ds.dim_hint);
  ASSERT_EQ(back.kb.size(), ds.kb.size());
  ASSERT_EQ(back.seed.size(), ds.seed.size());
  ASSERT_EQ(back.iterations.size(), ds.iterations.size());
  for (std::size_t i = 0; i < ds.iterations.size(); ++i) {
    ASSERT_EQ(back.iterations[i].size(), ds.iterations[i].size());
    for (std::size_t j = 0; j < ds.iterations[i].size(); ++j) {
      EXPECT_EQ(back.iterations[i][j].question, ds.iterations[i][j].question);
      EXPECT_EQ(back.iterations[i][j].reference, ds.iterations[i][j].reference);
    }
  }
  EXPECT_EQ(back.question_count(), ds.question_count());
}

TEST(Dataset, ValidationListsEveryProblem) {
  std::istringstream in(R"({"name": "bad"}
{"kind": "kb", "id": 1}
{"kind": "seed", "question": "q"}
{"kind": "question", "iteration": 1, "question": "fine", "reference": "r"}
{"kind": "question", "iteration": 3, "question": "gap", "reference": "r"}
{"kind": "question", "iteration": 1, "question": "no reference"}
{"kind": "mystery"}
not json
)");
  try {
    parse_dataset(in, true);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    for (const char* expected : {"line 2", "line 3", "line 6", "line 7", "line 8", "iteration 2"}) {
      EXPECT_NE(msg.find(expected), std::string::npos) << expected << "\n" << msg;
    }
    EXPECT_EQ(msg.find("line 4"), std::string::npos);
  }
}

TEST(Dataset, ReferencesOptionalWhenNotRequired) {
  std::istringstream in(R"({"name": "ok", "dim_hint": 32}
{"kind": "question", "iteration": 1, "question": "no reference"}
)");
  const auto ds = parse_dataset(in, false);
  EXPECT_EQ(ds.dim_hint, 32u);
  EXPECT_FALSE(ds.iterations.at(0).at(0).reference);
}

TEST(Dataset, EmptyStreamRejected) {
  std::istringstream in(R"({"name": "empty"}
)");
  EXPECT_THROW(parse_dataset(in, true), ValidationError);
}

TEST(Synthetic, DeterministicAndCalibrated) {
  const SyntheticSpec spec = small_spec();
  std::stringstream a, b;
  write_dataset(a, make_synthetic_dataset(spec));
  write_dataset(b, make_synthetic_dataset(spec));
  EXPECT_EQ(a.str(), b.str());

  const ReplayDataset ds = make_synthetic_dataset(spec);
  EXPECT_EQ(ds.iterations.size(), spec.iterations);
  EXPECT_EQ(ds.seed.size(), spec.seed_topics);
  EXPECT_EQ(ds.kb.size(), spec.seed_topics + spec.stream_topics);
  const double paraphrases = static_cast<double>(ds.question_count() - spec.stream_topics);
  EXPECT_NEAR(paraphrases / ds.question_count(), spec.paraphrase_rate, 0.01);
  for (const auto& it : ds.iterations) EXPECT_FALSE(it.empty());
}

TEST(Synthetic, ParaphraseStaysAboveSimilarityFloor) {
  std::mt19937_64 rng(3);
  const MockEmbedder e(256);
  const std::string text = "alpha bravo charlie delta echo foxtrot golf hotel";
  for (int i = 0; i < 100; ++i) {
    const std::string p = paraphrase(text, e, 0.85, rng);
    EXPECT_NE(p, text);
    EXPECT_GE(cosine_similarity(e.embed(text), e.embed(p)), 0.85);
  }
  EXPECT_THROW(paraphrase("single", e, 0.5, rng), InvalidArgument);
  EXPECT_THROW(paraphrase("ab cd", e, 0.9999, rng), InvalidState);
}

TEST(Replay, DuplicatesOfSeedsAlwaysReuse) {
  ReplayDataset ds;
  ds.name = "dups";
  for (int i = 0; i < 5; ++i) {
    ds.seed.push_back({"seed topic " + std::string(1, static_cast<char>('k' + 3 * i)) + " alpha beta",
                       "answer " + std::to_string(i)});
  }
  for (int it = 0; it < 4; ++it) {
    std::vector<DatasetQuestion> batch;
    for (const auto& s : ds.seed) batch.push_back({s.question, s.answer});
    ds.iterations.push_back(batch);
  }
  const auto r = run_replay(ds, mock_config(256), make_backends);
  ASSERT_EQ(r.metrics.size(), 4u);
  for (const auto& m : r.metrics) {
    EXPECT_EQ(m.reuse_ratio, 1.0);
    EXPECT_EQ(m.growth_rate_pct, 0.0);
    EXPECT_EQ(m.generation_calls, 0u);
    EXPECT_EQ(m.total_chunks, r.initial_chunks);
  }
}

TEST(Replay, OrthogonalNovelQuestionsAlwaysGrow) {
  constexpr std::size_t kDim = 64;
  auto embedder = std::make_shared<testing::TableEmbedder>(kDim);
  ReplayDataset ds;
  ds.name = "novel";
  std::size_t axis = 0;
  auto next_text = [&] {
    const std::string t = "topic " + std::to_string(axis);
    embedder->set(t, testing::basis(kDim, axis++));
    return t;
  };
  ds.seed.push_back({next_text(), "seed answer"});
  for (int it = 0; it < 5; ++it) {
    std::vector<DatasetQuestion> batch;
    for (int i = 0; i < 6; ++i) batch.push_back({next_text(), std::string("reference")});
    ds.iterations.push_back(batch);
  }
  const BackendFactory factory = [&](const EngineConfig&) {
    return Backends{embedder, std::make_shared<MockGenerator>(), std::make_shared<OverlapScorer>()};
  };
  const auto r = run_replay(ds, mock_config(kDim), factory);
  std::size_t previous = r.initial_chunks;
  for (const auto& m : r.metrics) {
    EXPECT_EQ(m.reuse_ratio, 0.0);
    EXPECT_GT(m.growth_rate_pct, 0.0);
    EXPECT_EQ(m.path_counts.at(Path::kGenerateWithLowAndKb), 6u);
    EXPECT_EQ(m.total_chunks, previous + 6);
    previous = m.total_chunks;
  }
}

TEST(Replay, SyntheticStreamGrowthPeaksFirstAndDecays) {
  const ReplayDataset ds = make_synthetic_dataset(SyntheticSpec{});
  const auto r = run_replay(ds, mock_config(256), make_backends);
  ASSERT_EQ(r.metrics.size(), 10u);
  const double peak = r.metrics.front().growth_rate_pct;
  for (std::size_t i = 1; i < r.metrics.size(); ++i) EXPECT_LT(r.metrics[i].growth_rate_pct, peak);
  EXPECT_LT(r.metrics.back().growth_rate_pct, peak / 3.0);
  EXPECT_GT(r.metrics.back().reuse_ratio, r.metrics.front().reuse_ratio);
}

TEST(Replay, ReuseNonDecreasingWhenLaterIterationsParaphraseEarlierOnes) {
  SyntheticSpec spec;
  spec.seed = 99;
  const ReplayDataset base = make_synthetic_dataset(spec);
  // Iteration 1: originals. Later iterations: paraphrases of iteration-1
  // questions only, each iteration paraphrasing a growing share.
  ReplayDataset ds;
  ds.name = "paraphrase_only";
  ds.dim_hint = base.dim_hint;
  ds.kb = base.kb;
  std::vector<DatasetQuestion> first;
  for (const auto& q : base.iterations[0]) first.push_back(q);
  ds.iterations.push_back(first);
  std::mt19937_64 rng(4);
  const MockEmbedder e(256);
  for (std::size_t it = 1; it < 6; ++it) {
    std::vector<DatasetQuestion> batch;
    for (std::size_t j = 0; j < first.size(); ++j) {
      if (j * 5 < first.size() * it) {
        batch.push_back({paraphrase(first[j].question, e, 0.85, rng), first[j].reference});
      } else {
        batch.push_back({"unseen filler question number " + std::to_string(it * 100 + j), std::string("x")});
      }
    }
    ds.iterations.push_back(batch);
  }
  EngineConfig cfg = mock_config(256);
  cfg.thresholds.gamma = 0.0;  // everything stored lands in the reusable tier
  const auto r = run_replay(ds, cfg, make_backends);
  for (std::size_t i = 1; i < r.metrics.size(); ++i) {
    EXPECT_GE(r.metrics[i].reuse_ratio, r.metrics[i - 1].reuse_ratio) << "iteration " << i + 1;
  }
  EXPECT_GT(r.metrics.back().reuse_ratio, 0.5);
}

TEST(Replay, GenerationCallsEqualNonReuseCount) {
  const ReplayDataset ds = make_synthetic_dataset(small_spec());
  std::shared_ptr<MockGenerator> gen;
  const BackendFactory factory = [&](const EngineConfig& cfg) {
    Backends b = make_backends(cfg);
    gen = std::dynamic_pointer_cast<MockGenerator>(b.generator);
    return b;
  };
  const auto r = run_replay(ds, mock_config(256), factory);
  std::size_t reuse = 0;
  for (const auto& t : r.trace) reuse += t.path == Path::kReuseHigh;
  EXPECT_EQ(gen->call_count(), ds.question_count() - reuse);
}

TEST(Replay, DeterministicTraceExcludingLatency) {
  const ReplayDataset ds = make_synthetic_dataset(small_spec());
  ReplayOptions opts;
  opts.seed = 17;
  opts.shuffle_within_iterations = true;
  std::ostringstream a, b, c;
  write_trace_jsonl(a, run_replay(ds, mock_config(256), make_backends, opts).trace, false);
  write_trace_jsonl(b, run_replay(ds, mock_config(256), make_backends, opts).trace, false);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().find("latency"), std::string::npos);
  opts.seed = 18;
  write_trace_jsonl(c, run_replay(ds, mock_config(256), make_backends, opts).trace, false);
  EXPECT_NE(a.str(), c.str());
}

TEST(Replay, BackendFailureAbortsWithPartialResults) {
  const ReplayDataset ds = make_synthetic_dataset(small_spec());
  class FlakyGenerator : public GenerationProvider {
   public:
    std::string generate(std::string_view prompt, double t) override {
      if (++calls_ > 30) throw UpstreamError("upstream went away", 503);
      return inner_.generate(prompt, t);
    }

   private:
    int calls_ = 0;
    MockGenerator inner_;
  };
  const BackendFactory factory = [](const EngineConfig& cfg) {
    Backends b = make_backends(cfg);
    b.generator = std::make_shared<FlakyGenerator>();
    return b;
  };
  try {
    run_replay(ds, mock_config(256), factory);
    FAIL() << "expected ReplayAborted";
  } catch (const ReplayAborted& e) {
    EXPECT_FALSE(e.partial().metrics.empty());
    EXPECT_LT(e.partial().metrics.size(), ds.iterations.size());
    std::size_t gens = 0;
    for (const auto& t : e.partial().trace) gens += t.generation_called;
    EXPECT_EQ(gens, 30u);
  }
}

TEST(Replay, DimMismatchInKbRejected) {
  ReplayDataset ds = make_synthetic_dataset(small_spec());
  ds.kb[0].embedding = std::vector<double>{1.0, 0.0};
  EXPECT_THROW(run_replay(ds, mock_config(256), make_backends), ValidationError);
}

// Independent aggregation of the written trace, compared with metrics.tsv.
TEST(Report, FilesMatchIndependentAggregation) {
  const ReplayDataset ds = make_synthetic_dataset(small_spec());
  const auto r = run_replay(ds, mock_config(256), make_backends);
  const auto dir = temp_dir("report");
  emit_report(dir, r);

  for (const auto& name : metric_names()) {
    std::ifstream in(dir / (name + ".dat"));
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 10) << name;
  }

  struct Agg {
    std::size_t n = 0, reuse = 0, gens = 0;
    std::map<std::string, std::size_t> paths;
    double score = 0, latency = 0;
    long delta = 0;
  };
  std::map<std::size_t, Agg> agg;
  std::ifstream trace(dir / "trace.jsonl");
  for (std::string line; std::getline(trace, line);) {
    const auto j = json::parse(line);
    Agg& a = agg[j["iteration"].get<std::size_t>()];
    ++a.n;
    a.reuse += j["path"] == "reuse_high";
    a.gens += j["generation_called"].get<bool>();
    ++a.paths[j["path"].get<std::string>()];
    a.score += j["score"].get<double>();
    a.latency += j["latency_s"].get<double>();
    a.delta += j["chunk_delta"].get<long>();
  }
  const auto summary = json::parse(std::ifstream(dir / "summary.json"));
  std::size_t chunks = summary["initial_chunks"].get<std::size_t>();
  EXPECT_EQ(chunks, ds.seed.size());

  std::ifstream tsv(dir / "metrics.tsv");
  std::string header;
  std::getline(tsv, header);
  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    for (std::string c; std::getline(hs, c, '\t');) cols.push_back(c);
  }
  for (std::size_t it = 1; it <= 10; ++it) {
    std::string row;
    ASSERT_TRUE(std::getline(tsv, row));
    std::istringstream rs(row);
    std::map<std::string, std::string> v;
    std::size_t c = 0;
    for (std::string cell; std::getline(rs, cell, '\t');) v[cols.at(c++)] = cell;
    Agg& a = agg.at(it);
    const double n = static_cast<double>(a.n);
    const std::size_t next = static_cast<std::size_t>(static_cast<long>(chunks) + a.delta);
    EXPECT_EQ(std::stoul(v["iteration"]), it);
    EXPECT_EQ(std::stoul(v["questions"]), a.n);
    EXPECT_NEAR(std::stod(v["reuse_ratio"]), a.reuse / n, 1e-12);
    EXPECT_NEAR(std::stod(v["mean_score"]), a.score / n, 1e-12);
    EXPECT_NEAR(std::stod(v["avg_time_s"]), a.latency / n, 1e-9);
    EXPECT_EQ(std::stoul(v["generation_calls"]), a.gens);
    EXPECT_EQ(std::stoul(v["total_chunks"]), next);
    EXPECT_NEAR(std::stod(v["growth_rate_pct"]),
                100.0 * (static_cast<double>(next) - static_cast<double>(chunks)) / static_cast<double>(chunks),
                1e-9);
    EXPECT_EQ(std::stoul(v["path_reuse_high"]), a.paths["reuse_high"]);
    EXPECT_EQ(std::stoul(v["path_generate_high"]), a.paths["generate_high"]);
    EXPECT_EQ(std::stoul(v["path_generate_low_kb"]), a.paths["generate_low_kb"]);
    chunks = next;
  }

  std::ifstream growth(dir / "growth_rate_pct.dat");
  std::string first;
  std::getline(growth, first);
  const double expected =
      100.0 * (static_cast<double>(r.metrics[0].total_chunks) - ds.seed.size()) / ds.seed.size();
  EXPECT_NEAR(std::stod(first.substr(first.find('\t') + 1)), expected, 1e-9);
}

TEST(Report, GrowthFromEmptyStartIsNan) {
  ReplayDataset ds;
  ds.name = "no_seed";
  ds.iterations = {{{"a lone question here", std::string("ref")}}};
  const auto r = run_replay(ds, mock_config(64), make_backends);
  EXPECT_TRUE(std::isnan(r.metrics[0].growth_rate_pct));
  const auto dir = temp_dir("nan_report");
  emit_report(dir, r);
  const auto summary = json::parse(std::ifstream(dir / "summary.json"));
  EXPECT_TRUE(summary["iterations"][0]["growth_rate_pct"].is_null());
}

TEST(Sweep, ExpandGrid) {
  const Thresholds base{0.75, 0.8, 0.7};
  SweepGrid grid;
  grid.gamma = {0.6, 0.7, 0.6};
  grid.delta = {0.8, 0.9};
  const auto pts = expand_grid(grid, base);
  ASSERT_EQ(pts.size(), 3u);  // delta=0.8 and gamma=0.7 are both the base point
  EXPECT_EQ(pts[0].label, "delta=0.8");
  EXPECT_EQ(pts[1].thresholds.delta, 0.9);
  EXPECT_EQ(pts[2].thresholds.gamma, 0.6);

  grid.cartesian = true;
  EXPECT_EQ(expand_grid(grid, base).size(), 4u);
  EXPECT_EQ(expand_grid(SweepGrid{}, base).size(), 1u);
}

TEST(Sweep, InvalidPointsSkipped) {
  SweepGrid grid;
  grid.tau = {0.7, 0.85};
  const auto entries = run_sweep(make_synthetic_dataset(small_spec()), mock_config(256), grid, make_backends);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_TRUE(entries[0].result);
  EXPECT_FALSE(entries[1].result);
  EXPECT_FALSE(entries[1].skipped_reason.empty());
}

TEST(Sweep, SinglePointMatchesReplay) {
  const ReplayDataset ds = make_synthetic_dataset(small_spec());
  const auto entries = run_sweep(ds, mock_config(256), SweepGrid{}, make_backends);
  ASSERT_EQ(entries.size(), 1u);
  std::ostringstream a, b;
  write_trace_jsonl(a, entries[0].result->trace, false);
  write_trace_jsonl(b, run_replay(ds, mock_config(256), make_backends).trace, false);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, GammaAndDeltaDirections) {
  const ReplayDataset ds = make_synthetic_dataset(SyntheticSpec{});
  SweepGrid grid;
  grid.gamma = {0.6, 0.8};
  grid.delta = {0.8, 0.85, 0.9};
  const auto entries = run_sweep(ds, mock_config(256), grid, make_backends);
  std::map<std::string, double> final_reuse;
  for (const auto& e : entries) final_reuse[e.point.label] = e.result->metrics.back().reuse_ratio;
  EXPECT_GT(final_reuse.at("gamma=0.6"), final_reuse.at("gamma=0.8"));
  EXPECT_GE(final_reuse.at("delta=0.8"), final_reuse.at("delta=0.85"));
  EXPECT_GE(final_reuse.at("delta=0.85"), final_reuse.at("delta=0.9"));

  const auto dir = temp_dir("sweep");
  emit_sweep_report(dir, entries);
  std::ifstream in(dir / "sweep.tsv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 1 + static_cast<int>(entries.size()));
  EXPECT_TRUE(std::filesystem::exists(dir / "gamma=0.6" / "metrics.tsv"));
}

}  // namespace
}  // namespace cqa
