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

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cqa/router/knowledge_loader.hpp"

namespace cqa {

struct SeedPair {
  std::string question;
  std::string answer;
  // Defaults to 1.0: seed pairs are known-good history.
  double score = 1.0;
};

struct DatasetQuestion {
  std::string question;
  std::optional<std::string> reference;
};

// A replayable question stream. Iterations are 1-based in the file and
// stored 0-based here.
struct ReplayDataset {
  std::string name;
  std::optional<std::size_t> dim_hint;
  std::vector<KnowledgeLine> kb;
  std::vector<SeedPair> seed;
  std::vector<std::vector<DatasetQuestion>> iterations;

  std::size_t question_count() const;
};

// JSON lines. First line {"name", "dim_hint"?}; then records with
//   {"kind":"kb", "id", "text", "embedding"?}
//   {"kind":"seed", "question", "answer", "score"?}
//   {"kind":"question", "iteration", "question", "reference"?}
// Every problem found is reported with its line number in one
// ValidationError. Iterations must run 1..N with none empty.
ReplayDataset parse_dataset(std::istream& in, bool require_references);
ReplayDataset load_dataset(const std::filesystem::path& path, bool require_references);

void write_dataset(std::ostream& out, const ReplayDataset& dataset);

}  // namespace cqa
