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

#include <string>
#include <string_view>
#include <vector>

namespace cqa::text {

// Trims, collapses internal whitespace runs to one space, lowercases ASCII.
std::string canonicalize(std::string_view s);

// Lowercased alphanumeric runs; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view s);

// Token-multiset F1, computed as 2*common / (|a| + |b|) so it is exactly
// symmetric. 0 when either side has no tokens.
double token_f1(std::string_view a, std::string_view b);

}  // namespace cqa::text
