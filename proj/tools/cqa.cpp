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
#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cqa/backends/factory.hpp"
#include "cqa/core/config.hpp"
#include "cqa/core/errors.hpp"
#include "cqa/replay/dataset.hpp"
#include "cqa/replay/replay.hpp"
#include "cqa/replay/report.hpp"
#include "cqa/replay/synthetic.hpp"
#include "cqa/router/knowledge_loader.hpp"
#include "cqa/service/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitUpstream = 3;

struct CommonFlags {
  std::string config;
  std::string preset;
  std::string backend;
  std::optional<double> tau, delta, gamma;
  std::optional<std::size_t> top_k, dim;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool thresholds) {
  cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset, "msqa, procqa or polardbqa");
  cmd->add_option("--backend", f.backend, "Provider backend")
      ->check(CLI::IsMember({"mock", "http"}));
  if (thresholds) {
    cmd->add_option("--tau", f.tau, "Cluster assignment threshold");
    cmd->add_option("--delta", f.delta, "Near-duplicate threshold");
    cmd->add_option("--gamma", f.gamma, "High/low quality threshold");
  }
  cmd->add_option("--top-k", f.top_k, "Evidence items per source");
  cmd->add_option("--dim", f.dim, "Embedding dimension (defaults to the dataset's dim_hint)");
}

template <typename T>
std::string str(const T& v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// defaults < preset < config file < environment < flags
cqa::EngineConfig build_config(const CommonFlags& f, std::optional<std::size_t> dim_hint) {
  cqa::ConfigLoader loader;
  if (!f.preset.empty()) loader.from_json_text("{\"preset\": \"" + f.preset + "\"}");
  if (!f.config.empty()) loader.from_file(f.config);
  loader.from_environment();
  if (!f.backend.empty()) loader.set("backend_kind", f.backend);
  if (f.tau) loader.set("tau", str(*f.tau));
  if (f.delta) loader.set("delta", str(*f.delta));
  if (f.gamma) loader.set("gamma", str(*f.gamma));
  if (f.top_k) loader.set("top_k", str(*f.top_k));
  if (f.dim) {
    loader.set("embedding_dim", str(*f.dim));
  } else if (dim_hint) {
    loader.set("embedding_dim", str(*dim_hint));
  }
  return loader.build();
}

void print_summary(const cqa::ReplayResult& r) {
  std::cout << "iteration\tquestions\treuse_ratio\ttotal_chunks\tgrowth_rate_pct\tmean_score\n";
  for (const auto& m : r.metrics) {
    std::cout << m.iteration << '\t' << m.questions << '\t' << m.reuse_ratio << '\t'
              << m.total_chunks << '\t' << m.growth_rate_pct << '\t' << m.mean_score << '\n';
  }
}

int cmd_replay(const std::string& dataset_path, const CommonFlags& flags, std::uint64_t seed,
               bool shuffle, const std::string& out_dir) {
  const cqa::ReplayDataset ds = cqa::load_dataset(dataset_path, /*require_references=*/true);
  const cqa::EngineConfig cfg = build_config(flags, ds.dim_hint);
  cqa::ReplayOptions opts{seed, shuffle};
  try {
    const cqa::ReplayResult r = cqa::run_replay(ds, cfg, cqa::make_backends, opts);
    if (!out_dir.empty()) cqa::emit_report(out_dir, r);
    print_summary(r);
  } catch (const cqa::ReplayAborted& e) {
    if (!out_dir.empty()) cqa::emit_report(out_dir, e.partial());
    std::cerr << "replay aborted: " << e.what() << '\n';
    return kExitUpstream;
  }
  return kExitOk;
}

int cmd_sweep(const std::string& dataset_path, const CommonFlags& flags, const cqa::SweepGrid& grid,
              std::uint64_t seed, bool shuffle, const std::string& out_dir) {
  const cqa::ReplayDataset ds = cqa::load_dataset(dataset_path, /*require_references=*/true);
  const cqa::EngineConfig cfg = build_config(flags, ds.dim_hint);
  const auto entries = cqa::run_sweep(ds, cfg, grid, cqa::make_backends, {seed, shuffle});
  if (!out_dir.empty()) cqa::emit_sweep_report(out_dir, entries);
  std::cout << "point\tfinal_reuse_ratio\tfinal_growth_rate_pct\tfinal_total_chunks\n";
  for (const auto& e : entries) {
    std::cout << e.point.label;
    if (!e.result) {
      std::cout << "\tskipped: " << e.skipped_reason << '\n';
      continue;
    }
    const auto& last = e.result->metrics.back();
    std::cout << '\t' << last.reuse_ratio << '\t' << last.growth_rate_pct << '\t'
              << last.total_chunks << '\n';
  }
  return kExitOk;
}

int cmd_serve(const CommonFlags& flags, cqa::ServiceOptions opts, const std::string& kb_path) {
  const cqa::EngineConfig cfg = build_config(flags, std::nullopt);
  cqa::Engine engine(cfg, cqa::make_backends(cfg));
  if (!kb_path.empty()) cqa::load_knowledge(engine, std::filesystem::path(kb_path));
  if (opts.snapshot_path && std::filesystem::exists(*opts.snapshot_path)) {
    engine.load_snapshot(*opts.snapshot_path);
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  cqa::Service service(engine, opts);
  const int port = service.start();
  std::cerr << "listening on " << opts.host << ':' << port << '\n';
  int sig = 0;
  sigwait(&signals, &sig);
  service.stop();
  return kExitOk;
}

int cmd_synth(const cqa::SyntheticSpec& spec, const std::string& out_path) {
  const cqa::ReplayDataset ds = cqa::make_synthetic_dataset(spec);
  if (out_path.empty() || out_path == "-") {
    cqa::write_dataset(std::cout, ds);
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw cqa::InvalidState("cannot write " + out_path);
  cqa::write_dataset(out, ds);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming community QA engine"};
  app.require_subcommand(1);

  std::string dataset, out_dir;
  std::uint64_t seed = 0;
  bool shuffle = false;

  CommonFlags replay_flags;
  auto* replay = app.add_subcommand("replay", "Replay a dataset and report per-iteration metrics");
  replay->add_option("--dataset", dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  add_common(replay, replay_flags, true);
  replay->add_option("--seed", seed, "Seed for within-iteration shuffling");
  replay->add_flag("--shuffle", shuffle, "Shuffle questions within each iteration");
  replay->add_option("--out-dir", out_dir, "Directory for metrics, trace and plot data");

  CommonFlags sweep_flags;
  cqa::SweepGrid grid;
  auto* sweep = app.add_subcommand("sweep", "Replay once per threshold grid point");
  sweep->add_option("--dataset", dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  add_common(sweep, sweep_flags, false);
  sweep->add_option("--tau", grid.tau, "Values of tau, comma separated")->delimiter(',');
  sweep->add_option("--delta", grid.delta, "Values of delta, comma separated")->delimiter(',');
  sweep->add_option("--gamma", grid.gamma, "Values of gamma, comma separated")->delimiter(',');
  sweep->add_flag("--cartesian", grid.cartesian, "Take every combination instead of one at a time");
  sweep->add_option("--seed", seed, "Seed shared by every grid point");
  sweep->add_flag("--shuffle", shuffle, "Shuffle questions within each iteration");
  sweep->add_option("--out-dir", out_dir, "Directory for sweep.tsv and per-point reports");

  CommonFlags serve_flags;
  cqa::ServiceOptions service_opts;
  std::string kb_path, snapshot;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  add_common(serve, serve_flags, true);
  serve->add_option("--host", service_opts.host, "Listen address");
  serve->add_option("--port", service_opts.port, "Listen port (0 picks one)");
  serve->add_option("--kb", kb_path, "Knowledge JSONL to load at startup")
      ->check(CLI::ExistingFile);
  serve->add_option("--snapshot", snapshot, "Snapshot path, loaded at startup if present");
  serve->add_option("--autosave", service_opts.autosave_interval_s, "Autosave interval in seconds");

  cqa::SyntheticSpec spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic paraphrase dataset");
  synth->add_option("--out", synth_out, "Output path, - for stdout");
  synth->add_option("--seed", spec.seed, "Generator seed");
  synth->add_option("--dim", spec.dim, "Mock embedding dimension used for paraphrase checks");
  synth->add_option("--seed-topics", spec.seed_topics, "Topics stored before iteration 1");
  synth->add_option("--topics", spec.stream_topics, "Distinct topics in the stream");
  synth->add_option("--iterations", spec.iterations, "Number of iterations");
  synth->add_option("--paraphrase-rate", spec.paraphrase_rate, "Share of paraphrased questions");
  synth->add_option("--min-similarity", spec.min_similarity,
                    "Minimum paraphrase cosine under the mock embedder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*replay) return cmd_replay(dataset, replay_flags, seed, shuffle, out_dir);
    if (*sweep) return cmd_sweep(dataset, sweep_flags, grid, seed, shuffle, out_dir);
    if (*serve) {
      if (!snapshot.empty()) service_opts.snapshot_path = snapshot;
      return cmd_serve(serve_flags, service_opts, kb_path);
    }
    if (*synth) return cmd_synth(spec, synth_out);
  } catch (const cqa::UpstreamError& e) {
    std::cerr << "upstream error: " << e.what() << '\n';
    return kExitUpstream;
  } catch (const cqa::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const cqa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const cqa::IncompatibleSnapshot& e) {
    std::cerr << "snapshot error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
