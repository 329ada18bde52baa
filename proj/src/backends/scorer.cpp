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
#include "cqa/backends/scorer.hpp"

#include <algorithm>
#include <set>

#include "cqa/backends/text.hpp"

namespace cqa {

double OverlapScorer::raw_score(std::string_view question, std::string_view answer,
                                const std::optional<std::string>& reference) const {
  if (reference) return text::token_f1(answer, *reference);

  const auto answer_tokens = text::tokenize(answer);
  if (answer_tokens.empty()) return 0.0;
  const auto q_tokens = text::tokenize(question);
  const std::set<std::string> q_set(q_tokens.begin(), q_tokens.end());
  const std::set<std::string> a_set(answer_tokens.begin(), answer_tokens.end());
  double coverage = 0.0;
  if (!q_set.empty()) {
    std::size_t hit = 0;
    for (const auto& t : q_set) hit += a_set.count(t);
    coverage = static_cast<double>(hit) / static_cast<double>(q_set.size());
  }
  const double length = std::min(1.0, static_cast<double>(answer_tokens.size()) / 32.0);
  return 0.5 * coverage + 0.5 * length;
}

}  // namespace cqa
