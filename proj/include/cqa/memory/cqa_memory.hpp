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

#include <atomic>
#include <cstddef>

#include "cqa/memory/tier_store.hpp"

namespace cqa {

// The pair of quality tiers plus the record id sequence they share, so a
// record id identifies a record regardless of tier.
class CqaMemory {
 public:
  explicit CqaMemory(std::size_t dim);
  CqaMemory(TierStore high, TierStore low, RecordId next_id);
  CqaMemory(CqaMemory&& other) noexcept;
  CqaMemory& operator=(CqaMemory&& other) noexcept;

  std::size_t dim() const { return high_.dim(); }

  TierStore& tier(Tier t) { return t == Tier::kHigh ? high_ : low_; }
  const TierStore& tier(Tier t) const { return t == Tier::kHigh ? high_ : low_; }
  TierStore& high() { return high_; }
  TierStore& low() { return low_; }
  const TierStore& high() const { return high_; }
  const TierStore& low() const { return low_; }

  // Routes (q, answer, score) to the gamma-selected tier and applies the
  // update phase there. Not synchronized.
  UpdateOutcome update(const std::string& question, const Embedding& emb,
                       const std::string& answer, double score, const Thresholds& thresholds);

  // Thread-safe id source shared by both tiers.
  IdAllocator id_allocator();
  RecordId next_id() const { return next_id_.load(); }

  std::optional<Tier> locate(RecordId id) const;
  std::size_t total_records() const;

 private:
  TierStore high_;
  TierStore low_;
  std::atomic<RecordId> next_id_{1};
};

}  // namespace cqa
