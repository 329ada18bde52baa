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
#include <optional>
#include <string>
#include <vector>

#include "cqa/router/engine.hpp"

namespace cqa {

struct KnowledgeLine {
  ChunkId id = 0;
  std::string text;
  std::optional<std::vector<double>> embedding;
};

// Bulk-load format: one JSON object per line, {"id", "text", "embedding"?}.
// Blank lines are skipped. Problems are collected and thrown together as a
// ValidationError naming each line.
std::vector<KnowledgeLine> parse_knowledge_jsonl(std::istream& in);

// Inserts parsed lines; chunks without an embedding are embedded in one
// batch. Throws ValidationError for a supplied embedding of the wrong dim.
std::size_t add_knowledge_lines(Engine& engine, const std::vector<KnowledgeLine>& lines);

// Parses and inserts; chunks without an embedding are embedded in one batch.
std::size_t load_knowledge(Engine& engine, std::istream& in);
std::size_t load_knowledge(Engine& engine, const std::filesystem::path& path);

}  // namespace cqa
