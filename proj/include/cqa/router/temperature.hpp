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

#include <span>

#include "cqa/core/config.hpp"

namespace cqa {

// Decoding temperature from the scores attached to the QA evidence.
// Sorted ascending, the smallest gap between neighbours is Delta and the
// temperature is exp(-scale_k * Delta) clamped to [t_min, t_max]. Evidence
// whose scores bunch together (small Delta) pushes toward exploration;
// widely spread scores pull toward t_min. Fewer than two scores yield
// t_default.
double adaptive_temperature(std::span<const double> scores, const TemperatureConfig& cfg);

}  // namespace cqa
