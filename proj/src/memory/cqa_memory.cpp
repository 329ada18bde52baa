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
#include "cqa/memory/cqa_memory.hpp"

namespace cqa {

CqaMemory::CqaMemory(std::size_t dim) : high_(Tier::kHigh, dim), low_(Tier::kLow, dim) {}

CqaMemory::CqaMemory(TierStore high, TierStore low, RecordId next_id)
    : high_(std::move(high)), low_(std::move(low)), next_id_(next_id) {}

CqaMemory::CqaMemory(CqaMemory&& other) noexcept
    : high_(std::move(other.high_)),
      low_(std::move(other.low_)),
      next_id_(other.next_id_.load()) {}

CqaMemory& CqaMemory::operator=(CqaMemory&& other) noexcept {
  high_ = std::move(other.high_);
  low_ = std::move(other.low_);
  next_id_.store(other.next_id_.load());
  return *this;
}

UpdateOutcome CqaMemory::update(const std::string& question, const Embedding& emb,
                                const std::string& answer, double score,
                                const Thresholds& thresholds) {
  return tier(classify_tier(score, thresholds.gamma))
      .update(question, emb, answer, score, thresholds, id_allocator());
}

IdAllocator CqaMemory::id_allocator() {
  return [this] { return next_id_.fetch_add(1); };
}

std::optional<Tier> CqaMemory::locate(RecordId id) const {
  if (high_.contains(id)) return Tier::kHigh;
  if (low_.contains(id)) return Tier::kLow;
  return std::nullopt;
}

std::size_t CqaMemory::total_records() const {
  return high_.members().size() + low_.members().size();
}

}  // namespace cqa
