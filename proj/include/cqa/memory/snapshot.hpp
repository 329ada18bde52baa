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

#include <filesystem>
#include <istream>
#include <ostream>

#include "cqa/memory/cqa_memory.hpp"

namespace cqa {

inline constexpr int kSnapshotVersion = 1;

// Line-oriented JSON. Per tier: a header line, one line per record (sorted
// by id), one line per cluster (sorted by id). Centroids are not written;
// they are recomputed on load.
void write_tier(std::ostream& out, const TierStore& tier, double gamma, RecordId next_id);

// Reads one tier section. Throws IncompatibleSnapshot on version, dim,
// gamma, or tier mismatch and on malformed input.
TierStore read_tier(std::istream& in, Tier expected_tier, std::size_t dim, double gamma,
                    RecordId* next_id);

// Both tiers, high first. Written to a temp file and renamed into place.
void save_snapshot(const std::filesystem::path& path, const CqaMemory& memory, double gamma);
CqaMemory load_snapshot(const std::filesystem::path& path, std::size_t dim, double gamma);

}  // namespace cqa
