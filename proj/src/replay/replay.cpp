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
#include "cqa/replay/replay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "cqa/router/engine.hpp"
#include "cqa/router/knowledge_loader.hpp"

namespace cqa {
namespace {

std::string format_threshold(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

IterationMetrics aggregate_iteration(std::size_t iteration, const std::vector<TraceRecord>& slice,
                                     std::size_t previous_chunks) {
  IterationMetrics m;
  m.iteration = iteration;
  m.questions = slice.size();
  m.path_counts = {{Path::kReuseHigh, 0}, {Path::kGenerateWithHigh, 0},
                   {Path::kGenerateWithLowAndKb, 0}};
  long delta = 0;
  double time_sum = 0.0;
  double score_sum = 0.0;
  for (const auto& t : slice) {
    ++m.path_counts[t.path];
    delta += t.chunk_delta;
    time_sum += t.latency_s;
    score_sum += t.score;
    if (t.generation_called) ++m.generation_calls;
  }
  const double n = static_cast<double>(slice.size());
  if (!slice.empty()) {
    m.avg_time_s = time_sum / n;
    m.mean_score = score_sum / n;
    m.reuse_ratio = static_cast<double>(m.path_counts[Path::kReuseHigh]) / n;
  }
  m.total_chunks = static_cast<std::size_t>(static_cast<long>(previous_chunks) + delta);
  m.growth_rate_pct = previous_chunks == 0
                          ? std::numeric_limits<double>::quiet_NaN()
                          : 100.0 * static_cast<double>(delta) / static_cast<double>(previous_chunks);
  return m;
}

ReplayResult run_replay(const ReplayDataset& dataset, const EngineConfig& cfg,
                        const BackendFactory& backends, const ReplayOptions& options) {
  if (dataset.iterations.empty()) throw ValidationError("dataset has no iterations");
  Engine engine(cfg, backends(cfg));

  add_knowledge_lines(engine, dataset.kb);
  for (const auto& s : dataset.seed) engine.seed(s.question, s.answer, s.score);

  auto total_chunks = [&engine] {
    const EngineStats st = engine.stats();
    return st.high.member_count + st.low.member_count;
  };

  ReplayResult result;
  result.initial_chunks = total_chunks();
  std::mt19937_64 rng(options.seed);
  std::size_t chunks = result.initial_chunks;

  for (std::size_t it = 0; it < dataset.iterations.size(); ++it) {
    std::vector<std::size_t> order(dataset.iterations[it].size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (options.shuffle_within_iterations) std::shuffle(order.begin(), order.end(), rng);

    const std::size_t slice_start = result.trace.size();
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const DatasetQuestion& q = dataset.iterations[it][order[pos]];
      const std::size_t before = total_chunks();
      AnswerResult r;
      try {
        r = engine.process(q.question, q.reference);
      } catch (const UpstreamError& e) {
        throw ReplayAborted("iteration " + std::to_string(it + 1) + ", question " +
                                std::to_string(pos + 1) + ": " + e.what(),
                            result);
      }
      TraceRecord t;
      t.iteration = it + 1;
      t.index = pos;
      t.question = q.question;
      t.path = r.decision.path;
      t.best_similarity = r.decision.best_similarity;
      t.temperature = r.decision.temperature_used;
      t.score = r.score;
      t.generation_called = r.generation_called;
      if (r.update) t.update = r.update->kind;
      t.chunk_delta = static_cast<long>(total_chunks()) - static_cast<long>(before);
      t.latency_s = r.latency_seconds;
      result.trace.push_back(std::move(t));
    }
    const std::vector<TraceRecord> slice(result.trace.begin() + static_cast<std::ptrdiff_t>(slice_start),
                                         result.trace.end());
    IterationMetrics m = aggregate_iteration(it + 1, slice, chunks);
    chunks = m.total_chunks;
    result.metrics.push_back(std::move(m));
  }
  return result;
}

std::vector<SweepPoint> expand_grid(const SweepGrid& grid, const Thresholds& base) {
  std::vector<SweepPoint> points;
  std::set<std::tuple<double, double, double>> seen;
  auto add = [&](Thresholds t, std::string label) {
    if (seen.emplace(t.tau, t.delta, t.gamma).second) points.push_back({t, std::move(label)});
  };

  if (grid.cartesian) {
    const std::vector<double> taus = grid.tau.empty() ? std::vector<double>{base.tau} : grid.tau;
    const std::vector<double> deltas = grid.delta.empty() ? std::vector<double>{base.delta} : grid.delta;
    const std::vector<double> gammas = grid.gamma.empty() ? std::vector<double>{base.gamma} : grid.gamma;
    for (double tau : taus) {
      for (double delta : deltas) {
        for (double gamma : gammas) {
          add({tau, delta, gamma}, "tau=" + format_threshold(tau) + ",delta=" +
                                       format_threshold(delta) + ",gamma=" + format_threshold(gamma));
        }
      }
    }
  } else {
    for (double v : grid.tau) add({v, base.delta, base.gamma}, "tau=" + format_threshold(v));
    for (double v : grid.delta) add({base.tau, v, base.gamma}, "delta=" + format_threshold(v));
    for (double v : grid.gamma) add({base.tau, base.delta, v}, "gamma=" + format_threshold(v));
  }
  if (points.empty()) add(base, "base");
  return points;
}

std::vector<SweepEntry> run_sweep(const ReplayDataset& dataset, const EngineConfig& cfg,
                                  const SweepGrid& grid, const BackendFactory& backends,
                                  const ReplayOptions& options) {
  std::vector<SweepEntry> out;
  for (const SweepPoint& p : expand_grid(grid, cfg.thresholds)) {
    SweepEntry e{p, std::nullopt, {}};
    EngineConfig point_cfg = cfg;
    point_cfg.thresholds = p.thresholds;
    try {
      point_cfg.validate();
    } catch (const ConfigError& err) {
      e.skipped_reason = err.what();
      out.push_back(std::move(e));
      continue;
    }
    e.result = run_replay(dataset, point_cfg, backends, options);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace cqa
