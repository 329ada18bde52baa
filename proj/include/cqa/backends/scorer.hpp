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

#include "cqa/backends/providers.hpp"

namespace cqa {

// Default scorer.
//
// With a reference: token-level F1 between answer and reference.
// Without one: a placeholder heuristic for live traffic, mixing how much of
// the question vocabulary the answer covers with a length factor that
// saturates at 32 tokens. It only has to rank answers sensibly; feed real
// judgments in through the feedback path when they exist.
class OverlapScorer : public Scorer {
 protected:
  double raw_score(std::string_view question, std::string_view answer,
                   const std::optional<std::string>& reference) const override;
};

}  // namespace cqa
