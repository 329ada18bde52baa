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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/core/config.hpp"
#include "cqa/core/types.hpp"
#include "cqa/index/vector_store.hpp"
#include "cqa/memory/tier_store.hpp"

namespace cqa {

// Static knowledge store: chunk id -> chunk text.
using KnowledgeStore = VectorStore<std::string>;

enum class Path {
  kReuseHigh,            // reuse a stored high-quality answer verbatim
  kGenerateWithHigh,     // generate with high-quality QA references
  kGenerateWithLowAndKb  // generate with low-quality counter-examples + documents
};

std::string_view to_string(Path path);

struct ScoredRecord {
  QARecord record;
  double similarity = 0.0;
};

struct ScoredChunk {
  KnowledgeChunk chunk;
  double similarity = 0.0;
};

struct RouteDecision {
  Path path = Path::kGenerateWithLowAndKb;
  // Best high-tier member similarity; -inf when the high tier is empty.
  double best_similarity = 0.0;
  // High-tier evidence for the first two paths, low-tier for the third.
  // For kReuseHigh the reused record is first.
  std::vector<ScoredRecord> evidence_qa;
  std::vector<ScoredChunk> evidence_docs;
  std::optional<double> temperature_used;
};

// Pure path choice: >= delta reuses, [tau, delta) generates with high-tier
// references, anything lower (or no high-tier match at all) falls through
// to the low tier and the knowledge store.
Path select_path(std::optional<double> best_similarity, const Thresholds& thresholds);

// Query phase retrieval. Not synchronized; callers hold read access to the
// stores they pass.
class Router {
 public:
  explicit Router(const EngineConfig& cfg) : cfg_(cfg) {}

  // High-tier lookup only: best similarity, path, and high evidence.
  // For the low/kb path the evidence lists are left empty.
  RouteDecision route_high(const Embedding& query, const TierStore& high) const;

  // Fills low-tier QA evidence and knowledge chunks for the third path.
  void gather_fallback(const Embedding& query, const TierStore& low, const KnowledgeStore& kb,
                       RouteDecision& decision) const;

  RouteDecision route(const Embedding& query, const TierStore& high, const TierStore& low,
                      const KnowledgeStore& kb) const;

 private:
  std::vector<ScoredRecord> expand(const Embedding& query, const TierStore& tier) const;

  EngineConfig cfg_;
};

}  // namespace cqa
