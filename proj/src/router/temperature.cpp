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
#include "cqa/router/temperature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace cqa {

double adaptive_temperature(std::span<const double> scores, const TemperatureConfig& cfg) {
  if (scores.size() < 2) return cfg.t_default;
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    min_gap = std::min(min_gap, sorted[i + 1] - sorted[i]);
  }
  return std::clamp(std::exp(-cfg.scale_k * min_gap), cfg.t_min, cfg.t_max);
}

}  // namespace cqa
