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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqa/backends/providers.hpp"
#include "cqa/core/config.hpp"
#include "cqa/core/errors.hpp"
#include "cqa/memory/tier_store.hpp"
#include "cqa/replay/dataset.hpp"
#include "cqa/router/routing.hpp"

namespace cqa {

// One processed question.
struct TraceRecord {
  std::size_t iteration = 0;  // 1-based
  std::size_t index = 0;      // position within the iteration
  std::string question;
  Path path = Path::kGenerateWithLowAndKb;
  double best_similarity = 0.0;
  std::optional<double> temperature;
  double score = 0.0;
  bool generation_called = false;
  std::optional<UpdateKind> update;
  // Change in stored QA records (both tiers) caused by this question.
  long chunk_delta = 0;
  double latency_s = 0.0;
};

struct IterationMetrics {
  std::size_t iteration = 0;  // 1-based
  std::size_t questions = 0;
  double avg_time_s = 0.0;
  double reuse_ratio = 0.0;
  std::map<Path, std::size_t> path_counts;
  std::size_t total_chunks = 0;
  // 100 * (chunks_i - chunks_{i-1}) / chunks_{i-1}; NaN when the previous
  // count is zero.
  double growth_rate_pct = 0.0;
  double mean_score = 0.0;
  std::size_t generation_calls = 0;
};

struct ReplayResult {
  // Stored QA records after seeding, before iteration 1.
  std::size_t initial_chunks = 0;
  std::vector<IterationMetrics> metrics;
  std::vector<TraceRecord> trace;
};

struct ReplayOptions {
  std::uint64_t seed = 0;
  // Shuffle question order inside each iteration with `seed`.
  bool shuffle_within_iterations = false;
};

using BackendFactory = std::function<Backends(const EngineConfig&)>;

// Thrown when a backend fails mid-run; carries every completed iteration
// plus the trace up to the failing question.
class ReplayAborted : public UpstreamError {
 public:
  ReplayAborted(const std::string& what, ReplayResult partial)
      : UpstreamError(what), partial_(std::move(partial)) {}
  const ReplayResult& partial() const { return partial_; }

 private:
  ReplayResult partial_;
};

// Builds a fresh engine, loads knowledge and seed pairs, then runs every
// iteration in order through the full query + update cycle.
ReplayResult run_replay(const ReplayDataset& dataset, const EngineConfig& cfg,
                        const BackendFactory& backends, const ReplayOptions& options = {});

// Aggregates one iteration's trace slice. `previous_chunks` is the stored
// count before the iteration.
IterationMetrics aggregate_iteration(std::size_t iteration, const std::vector<TraceRecord>& slice,
                                     std::size_t previous_chunks);

struct SweepGrid {
  std::vector<double> tau;
  std::vector<double> delta;
  std::vector<double> gamma;
  // One-at-a-time varies a single threshold around the base config, the
  // others held fixed. Cartesian takes every combination.
  bool cartesian = false;
};

struct SweepPoint {
  Thresholds thresholds;
  std::string label;  // e.g. "gamma=0.6"
};

struct SweepEntry {
  SweepPoint point;
  std::optional<ReplayResult> result;
  // Set when the point was not run (thresholds violate tau < delta).
  std::string skipped_reason;
};

// Deduplicated points in grid order. An empty grid yields the base point.
std::vector<SweepPoint> expand_grid(const SweepGrid& grid, const Thresholds& base);

std::vector<SweepEntry> run_sweep(const ReplayDataset& dataset, const EngineConfig& cfg,
                                  const SweepGrid& grid, const BackendFactory& backends,
                                  const ReplayOptions& options = {});

}  // namespace cqa
