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
#include "cqa/router/knowledge_loader.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cqa/core/errors.hpp"

namespace cqa {

std::vector<KnowledgeLine> parse_knowledge_jsonl(std::istream& in) {
  std::vector<KnowledgeLine> out;
  std::vector<std::string> problems;
  std::map<ChunkId, std::size_t> first_line;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      problems.push_back("line " + std::to_string(lineno) + ": not a JSON object");
      continue;
    }
    KnowledgeLine k;
    if (!j.contains("id") || !j["id"].is_number_unsigned()) {
      problems.push_back("line " + std::to_string(lineno) + ": missing non-negative integer id");
      continue;
    }
    k.id = j["id"].get<ChunkId>();
    if (auto [it, fresh] = first_line.emplace(k.id, lineno); !fresh) {
      problems.push_back("line " + std::to_string(lineno) + ": duplicate id " + std::to_string(k.id) +
                         " (first on line " + std::to_string(it->second) + ")");
      continue;
    }
    if (!j.contains("text") || !j["text"].is_string() || j["text"].get<std::string>().empty()) {
      problems.push_back("line " + std::to_string(lineno) + ": missing text");
      continue;
    }
    k.text = j["text"].get<std::string>();
    if (j.contains("embedding") && !j["embedding"].is_null()) {
      try {
        k.embedding = j["embedding"].get<std::vector<double>>();
      } catch (const nlohmann::json::exception&) {
        problems.push_back("line " + std::to_string(lineno) + ": embedding is not numeric");
        continue;
      }
    }
    out.push_back(std::move(k));
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "knowledge file has " << problems.size() << " invalid line(s)";
    for (const auto& p : problems) msg << "\n  " << p;
    throw ValidationError(msg.str());
  }
  return out;
}

std::size_t add_knowledge_lines(Engine& engine, const std::vector<KnowledgeLine>& lines) {
  std::vector<std::string> to_embed;
  for (const auto& k : lines) {
    if (!k.embedding) to_embed.push_back(k.text);
  }
  auto embedded = engine.backends().embedder->embed_batch(to_embed);
  std::size_t next = 0;
  for (const auto& k : lines) {
    if (k.embedding) {
      if (k.embedding->size() != engine.config().embedding_dim) {
        throw ValidationError("chunk " + std::to_string(k.id) + " has embedding dim " +
                              std::to_string(k.embedding->size()));
      }
      engine.add_knowledge(k.id, k.text, Embedding::normalize(*k.embedding));
    } else {
      engine.add_knowledge(k.id, k.text, std::move(embedded[next++]));
    }
  }
  return lines.size();
}

std::size_t load_knowledge(Engine& engine, std::istream& in) {
  return add_knowledge_lines(engine, parse_knowledge_jsonl(in));
}

std::size_t load_knowledge(Engine& engine, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open knowledge file '" + path.string() + "'");
  return load_knowledge(engine, in);
}

}  // namespace cqa
