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
#include "cqa/replay/report.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "cqa/core/errors.hpp"

namespace cqa {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidState("cannot write " + path.string());
  return out;
}

// %.17g round-trips; NaN is written as "nan" so plotting tools skip it.
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double metric_value(const IterationMetrics& m, const std::string& name) {
  if (name == "avg_time_s") return m.avg_time_s;
  if (name == "reuse_ratio") return m.reuse_ratio;
  if (name == "total_chunks") return static_cast<double>(m.total_chunks);
  if (name == "growth_rate_pct") return m.growth_rate_pct;
  if (name == "mean_score") return m.mean_score;
  if (name == "generation_calls") return static_cast<double>(m.generation_calls);
  if (name == "path_reuse_high") return static_cast<double>(m.path_counts.at(Path::kReuseHigh));
  if (name == "path_generate_high")
    return static_cast<double>(m.path_counts.at(Path::kGenerateWithHigh));
  if (name == "path_generate_low_kb")
    return static_cast<double>(m.path_counts.at(Path::kGenerateWithLowAndKb));
  throw InvalidArgument("unknown metric " + name);
}

json metrics_json(const IterationMetrics& m) {
  json j;
  j["iteration"] = m.iteration;
  j["questions"] = m.questions;
  for (const auto& name : metric_names()) j[name] = json_number(metric_value(m, name));
  return j;
}

}  // namespace

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "avg_time_s",      "reuse_ratio",     "total_chunks",       "growth_rate_pct",
      "mean_score",      "generation_calls", "path_reuse_high",   "path_generate_high",
      "path_generate_low_kb"};
  return names;
}

void write_trace_jsonl(std::ostream& out, const std::vector<TraceRecord>& trace,
                       bool include_latency) {
  for (const auto& t : trace) {
    json j;
    j["iteration"] = t.iteration;
    j["index"] = t.index;
    j["question"] = t.question;
    j["path"] = to_string(t.path);
    j["best_similarity"] = json_number(t.best_similarity);
    j["temperature"] = t.temperature ? json(*t.temperature) : json(nullptr);
    j["score"] = t.score;
    j["generation_called"] = t.generation_called;
    j["update"] = t.update ? json(to_string(*t.update)) : json(nullptr);
    j["chunk_delta"] = t.chunk_delta;
    if (include_latency) j["latency_s"] = t.latency_s;
    out << j.dump() << '\n';
  }
}

void write_metrics_tsv(std::ostream& out, const ReplayResult& result) {
  out << "iteration\tquestions";
  for (const auto& name : metric_names()) out << '\t' << name;
  out << '\n';
  for (const auto& m : result.metrics) {
    out << m.iteration << '\t' << m.questions;
    for (const auto& name : metric_names()) out << '\t' << fmt(metric_value(m, name));
    out << '\n';
  }
}

void emit_report(const std::filesystem::path& dir, const ReplayResult& result) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "metrics.tsv");
    write_metrics_tsv(out, result);
  }
  {
    auto out = open_out(dir / "trace.jsonl");
    write_trace_jsonl(out, result.trace);
  }
  for (const auto& name : metric_names()) {
    auto out = open_out(dir / (name + ".dat"));
    for (const auto& m : result.metrics) out << m.iteration << '\t' << fmt(metric_value(m, name)) << '\n';
  }
  json summary;
  summary["initial_chunks"] = result.initial_chunks;
  summary["iterations"] = json::array();
  for (const auto& m : result.metrics) summary["iterations"].push_back(metrics_json(m));
  std::size_t questions = 0, generations = 0, reuse = 0;
  for (const auto& m : result.metrics) {
    questions += m.questions;
    generations += m.generation_calls;
    reuse += m.path_counts.at(Path::kReuseHigh);
  }
  summary["total_questions"] = questions;
  summary["total_generation_calls"] = generations;
  summary["total_reuse_high"] = reuse;
  auto out = open_out(dir / "summary.json");
  out << summary.dump(2) << '\n';
}

void emit_sweep_report(const std::filesystem::path& dir, const std::vector<SweepEntry>& entries) {
  std::filesystem::create_directories(dir);
  auto out = open_out(dir / "sweep.tsv");
  out << "label\ttau\tdelta\tgamma\tstatus\tfinal_reuse_ratio\tfinal_growth_rate_pct"
         "\tfinal_total_chunks\tmean_score\tgeneration_calls\tavg_time_s\n";
  for (const auto& e : entries) {
    const Thresholds& t = e.point.thresholds;
    out << e.point.label << '\t' << fmt(t.tau) << '\t' << fmt(t.delta) << '\t' << fmt(t.gamma);
    if (!e.result || e.result->metrics.empty()) {
      out << "\tskipped\t\t\t\t\t\t\n";
      continue;
    }
    const ReplayResult& r = *e.result;
    const IterationMetrics& last = r.metrics.back();
    double score_sum = 0.0, time_sum = 0.0;
    std::size_t n = 0, gens = 0;
    for (const auto& tr : r.trace) {
      score_sum += tr.score;
      time_sum += tr.latency_s;
      gens += tr.generation_called ? 1 : 0;
      ++n;
    }
    out << "\tok\t" << fmt(last.reuse_ratio) << '\t' << fmt(last.growth_rate_pct) << '\t'
        << last.total_chunks << '\t' << fmt(n ? score_sum / n : 0.0) << '\t' << gens << '\t'
        << fmt(n ? time_sum / n : 0.0) << '\n';
    emit_report(dir / e.point.label, r);
  }
}

}  // namespace cqa
