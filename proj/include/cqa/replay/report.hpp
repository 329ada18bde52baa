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

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cqa/replay/replay.hpp"

namespace cqa {

// One JSON object per line, keys sorted. With include_latency=false the
// output is a pure function of (dataset, config, seed, mock backends).
void write_trace_jsonl(std::ostream& out, const std::vector<TraceRecord>& trace,
                       bool include_latency = true);

// Tab-separated, one header row then one row per iteration.
void write_metrics_tsv(std::ostream& out, const ReplayResult& result);

// Writes into `dir` (created if missing):
//   metrics.tsv, trace.jsonl, summary.json and one <metric>.dat per metric
//   holding "iteration<TAB>value" rows.
void emit_report(const std::filesystem::path& dir, const ReplayResult& result);

// sweep.tsv with one row per grid point (final-iteration values), plus a
// full report per completed point under <dir>/<label>/.
void emit_sweep_report(const std::filesystem::path& dir, const std::vector<SweepEntry>& entries);

// Metric names used for the .dat files, in column order.
const std::vector<std::string>& metric_names();

}  // namespace cqa
