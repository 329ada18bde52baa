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

#include <cstdint>
#include <string>
#include <string_view>

#include "cqa/core/embedding.hpp"

namespace cqa {

using RecordId = std::uint64_t;
using ClusterId = std::uint64_t;
using ChunkId = std::uint64_t;

enum class Tier { kHigh, kLow };

std::string_view to_string(Tier tier);
Tier tier_from_string(std::string_view name);

// High iff score >= gamma.
inline Tier classify_tier(double score, double gamma) {
  return score >= gamma ? Tier::kHigh : Tier::kLow;
}

// Clamp into [0,1]; NaN maps to 0.
double clamp_score(double score);

struct KnowledgeChunk {
  ChunkId id = 0;
  std::string text;
  Embedding embedding;
};

// A scored question/answer pair as held by one of the two CQA tiers.
struct QARecord {
  RecordId id = 0;
  std::string question;
  Embedding embedding;
  std::string answer;
  double score = 0.0;
  Tier tier = Tier::kLow;

  friend bool operator==(const QARecord&, const QARecord&) = default;
};

}  // namespace cqa
