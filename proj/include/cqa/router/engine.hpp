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
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>

#include "cqa/backends/providers.hpp"
#include "cqa/core/config.hpp"
#include "cqa/memory/cqa_memory.hpp"
#include "cqa/router/routing.hpp"

namespace cqa {

struct AnswerResult {
  std::string answer;
  RouteDecision decision;
  double score = 0.0;
  double latency_seconds = 0.0;
  bool parse_fallback = false;
  bool generation_called = false;
  // The stored record behind this answer: the reused record for
  // kReuseHigh, the newly stored record after process(). Unset when the
  // update discarded the answer or for answer() alone.
  std::optional<RecordId> record_id;
  std::optional<UpdateOutcome> update;
};

struct EngineStats {
  TierStats high;
  TierStats low;
  std::size_t kb_size = 0;
};

struct FeedbackResult {
  bool applied = false;
  bool retiered = false;
  Tier tier = Tier::kLow;
  // Id of the record after feedback; a re-tiered record gets a new id, and
  // none when the destination tier discarded it as a near-duplicate.
  std::optional<RecordId> record_id;
};

// Called with the retrieved evidence before generation, e.g. to rerank.
// It may reorder or drop evidence but cannot change the path.
using EvidenceHook = std::function<void(std::string_view question, RouteDecision& decision)>;

// Runs once per process() call after the answer is final. For generated
// answers it runs while the written tier is still locked, so observers
// that read through inspect() see the store change and whatever the hook
// records together. latency_seconds is not yet set.
using CommitHook = std::function<void(const AnswerResult& result)>;

// Streaming question answering over a static knowledge store and the two
// dynamic QA tiers.
//
// Thread-safe. Retrieval holds shared locks per tier; each tier takes its
// writes one at a time; generation and scoring run without locks.
class Engine {
 public:
  Engine(EngineConfig cfg, Backends backends);

  const EngineConfig& config() const { return cfg_; }
  const Backends& backends() const { return backends_; }

  // Static knowledge. Embeds the text when no embedding is supplied.
  void add_knowledge(ChunkId id, const std::string& text,
                     std::optional<Embedding> embedding = std::nullopt);
  std::size_t knowledge_size() const;

  // Stores a known-good pair directly through the update phase.
  UpdateOutcome seed(const std::string& question, const std::string& answer, double score = 1.0);

  // Query phase only; the stores are not modified.
  AnswerResult answer(const std::string& question,
                      const std::optional<std::string>& reference = std::nullopt);

  // Query phase followed by the update phase for generated answers.
  AnswerResult process(const std::string& question,
                       const std::optional<std::string>& reference = std::nullopt,
                       const CommitHook& on_commit = nullptr);

  RouteDecision route(const Embedding& query) const;

  // Overwrites a stored score. Crossing gamma moves the record to the other
  // tier by removing it and running the update phase there.
  FeedbackResult apply_feedback(RecordId id, double score);

  std::optional<QARecord> find_record(RecordId id) const;
  EngineStats stats() const;

  void save_snapshot(const std::filesystem::path& path) const;
  void load_snapshot(const std::filesystem::path& path);

  void set_evidence_hook(EvidenceHook hook) { hook_ = std::move(hook); }

  // Read-only access to the memory under shared locks on both tiers.
  void inspect(const std::function<void(const CqaMemory&)>& fn) const;

 private:
  Embedding embed(const std::string& text) const;
  AnswerResult answer_with(const std::string& question, const Embedding& emb,
                           const std::optional<std::string>& reference);
  std::shared_mutex& tier_mutex(Tier t) const { return t == Tier::kHigh ? high_mu_ : low_mu_; }

  EngineConfig cfg_;
  Backends backends_;
  Router router_;
  EvidenceHook hook_;

  CqaMemory memory_;
  KnowledgeStore kb_;
  mutable std::shared_mutex high_mu_;
  mutable std::shared_mutex low_mu_;
  mutable std::shared_mutex kb_mu_;
};

}  // namespace cqa
