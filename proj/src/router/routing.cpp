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
#include "cqa/router/routing.hpp"

#include <limits>

namespace cqa {

std::string_view to_string(Path path) {
  switch (path) {
    case Path::kReuseHigh:
      return "reuse_high";
    case Path::kGenerateWithHigh:
      return "generate_high";
    case Path::kGenerateWithLowAndKb:
      return "generate_low_kb";
  }
  return "generate_low_kb";
}

Path select_path(std::optional<double> best_similarity, const Thresholds& thresholds) {
  if (!best_similarity) return Path::kGenerateWithLowAndKb;
  if (*best_similarity >= thresholds.delta) return Path::kReuseHigh;
  if (*best_similarity >= thresholds.tau) return Path::kGenerateWithHigh;
  return Path::kGenerateWithLowAndKb;
}

std::vector<ScoredRecord> Router::expand(const Embedding& query, const TierStore& tier) const {
  std::vector<ScoredRecord> out;
  for (const ScoredId& hit : tier.retrieve(query, cfg_.top_k)) {
    out.push_back({tier.record(hit.id), hit.similarity});
  }
  return out;
}

RouteDecision Router::route_high(const Embedding& query, const TierStore& high) const {
  RouteDecision d;
  auto high_hits = expand(query, high);
  std::optional<double> best;
  if (!high_hits.empty()) best = high_hits.front().similarity;
  d.best_similarity = best.value_or(-std::numeric_limits<double>::infinity());
  d.path = select_path(best, cfg_.thresholds);
  if (d.path != Path::kGenerateWithLowAndKb) d.evidence_qa = std::move(high_hits);
  return d;
}

void Router::gather_fallback(const Embedding& query, const TierStore& low,
                             const KnowledgeStore& kb, RouteDecision& decision) const {
  decision.evidence_qa = expand(query, low);
  decision.evidence_docs.clear();
  for (const ScoredId& hit : kb.top_k(query, cfg_.top_k)) {
    const auto& e = kb.at(hit.id);
    decision.evidence_docs.push_back({KnowledgeChunk{e.id, e.payload, e.embedding}, hit.similarity});
  }
}

RouteDecision Router::route(const Embedding& query, const TierStore& high, const TierStore& low,
                            const KnowledgeStore& kb) const {
  RouteDecision d = route_high(query, high);
  if (d.path == Path::kGenerateWithLowAndKb) gather_fallback(query, low, kb, d);
  return d;
}

}  // namespace cqa
