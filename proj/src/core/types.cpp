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
#include "cqa/core/types.hpp"

#include <cmath>
#include <string>

#include "cqa/core/errors.hpp"

namespace cqa {

std::string_view to_string(Tier tier) {
  return tier == Tier::kHigh ? "high" : "low";
}

Tier tier_from_string(std::string_view name) {
  if (name == "high") return Tier::kHigh;
  if (name == "low") return Tier::kLow;
  throw InvalidArgument("unknown tier '" + std::string(name) + "'");
}

double clamp_score(double score) {
  if (std::isnan(score)) return 0.0;
  if (score < 0.0) return 0.0;
  if (score > 1.0) return 1.0;
  return score;
}

}  // namespace cqa
