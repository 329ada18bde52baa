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
#include "cqa/replay/dataset.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cqa/core/errors.hpp"

namespace cqa {
namespace {

using nlohmann::json;

bool nonempty_string(const json& j, const char* key) {
  return j.contains(key) && j[key].is_string() && !j[key].get<std::string>().empty();
}

}  // namespace

std::size_t ReplayDataset::question_count() const {
  std::size_t n = 0;
  for (const auto& it : iterations) n += it.size();
  return n;
}

ReplayDataset parse_dataset(std::istream& in, bool require_references) {
  ReplayDataset ds;
  std::vector<std::string> problems;
  std::map<std::size_t, std::vector<DatasetQuestion>> by_iteration;
  std::map<ChunkId, std::size_t> kb_first_line;
  auto problem = [&](std::size_t lineno, const std::string& what) {
    problems.push_back("line " + std::to_string(lineno) + ": " + what);
  };

  std::string line;
  bool have_header = false;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      problem(lineno, "not a JSON object");
      continue;
    }
    if (!have_header) {
      have_header = true;
      if (j.contains("kind") && !(j["kind"] == "header")) {
        problem(lineno, "first record must be the dataset header");
        continue;
      }
      if (!nonempty_string(j, "name")) problem(lineno, "header needs a name");
      else ds.name = j["name"].get<std::string>();
      if (j.contains("dim_hint") && !j["dim_hint"].is_null()) {
        if (!j["dim_hint"].is_number_unsigned() || j["dim_hint"].get<std::size_t>() == 0) {
          problem(lineno, "dim_hint must be a positive integer");
        } else {
          ds.dim_hint = j["dim_hint"].get<std::size_t>();
        }
      }
      continue;
    }

    const std::string kind = j.contains("kind") && j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind == "kb") {
      if (!j.contains("id") || !j["id"].is_number_unsigned()) {
        problem(lineno, "kb record needs a non-negative integer id");
        continue;
      }
      if (!nonempty_string(j, "text")) {
        problem(lineno, "kb record needs text");
        continue;
      }
      KnowledgeLine k{j["id"].get<ChunkId>(), j["text"].get<std::string>(), std::nullopt};
      if (auto [it, fresh] = kb_first_line.emplace(k.id, lineno); !fresh) {
        problem(lineno, "duplicate kb id " + std::to_string(k.id) + " (first on line " +
                            std::to_string(it->second) + ")");
        continue;
      }
      if (j.contains("embedding") && !j["embedding"].is_null()) {
        try {
          k.embedding = j["embedding"].get<std::vector<double>>();
        } catch (const json::exception&) {
          problem(lineno, "kb embedding is not numeric");
          continue;
        }
      }
      ds.kb.push_back(std::move(k));
    } else if (kind == "seed") {
      if (!nonempty_string(j, "question") || !nonempty_string(j, "answer")) {
        problem(lineno, "seed record needs question and answer");
        continue;
      }
      SeedPair s{j["question"].get<std::string>(), j["answer"].get<std::string>(), 1.0};
      if (j.contains("score")) {
        if (!j["score"].is_number() || j["score"].get<double>() < 0.0 || j["score"].get<double>() > 1.0) {
          problem(lineno, "seed score must be a number in [0,1]");
          continue;
        }
        s.score = j["score"].get<double>();
      }
      ds.seed.push_back(std::move(s));
    } else if (kind == "question") {
      if (!j.contains("iteration") || !j["iteration"].is_number_unsigned() ||
          j["iteration"].get<std::size_t>() == 0) {
        problem(lineno, "question record needs a positive integer iteration");
        continue;
      }
      if (!nonempty_string(j, "question")) {
        problem(lineno, "question record needs question text");
        continue;
      }
      DatasetQuestion q{j["question"].get<std::string>(), std::nullopt};
      if (nonempty_string(j, "reference")) q.reference = j["reference"].get<std::string>();
      if (require_references && !q.reference) {
        problem(lineno, "question record needs a reference answer for lexical scoring");
        continue;
      }
      by_iteration[j["iteration"].get<std::size_t>()].push_back(std::move(q));
    } else {
      problem(lineno, "unknown record kind '" + kind + "'");
    }
  }

  if (!have_header) problems.push_back("dataset is empty");
  if (have_header && by_iteration.empty()) problems.push_back("dataset has no questions");
  std::size_t expected = 1;
  for (auto& [iteration, questions] : by_iteration) {
    if (iteration != expected) {
      problems.push_back("iteration " + std::to_string(expected) + " is missing or empty");
      break;
    }
    ds.iterations.push_back(std::move(questions));
    ++expected;
  }

  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "dataset has " << problems.size() << " problem(s)";
    for (const auto& p : problems) msg << "\n  " << p;
    throw ValidationError(msg.str());
  }
  return ds;
}

ReplayDataset load_dataset(const std::filesystem::path& path, bool require_references) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, require_references);
}

void write_dataset(std::ostream& out, const ReplayDataset& ds) {
  json header = {{"name", ds.name}};
  if (ds.dim_hint) header["dim_hint"] = *ds.dim_hint;
  out << header.dump() << '\n';
  for (const auto& k : ds.kb) {
    json j = {{"kind", "kb"}, {"id", k.id}, {"text", k.text}};
    if (k.embedding) j["embedding"] = *k.embedding;
    out << j.dump() << '\n';
  }
  for (const auto& s : ds.seed) {
    out << json{{"kind", "seed"}, {"question", s.question}, {"answer", s.answer}, {"score", s.score}}
               .dump()
        << '\n';
  }
  for (std::size_t i = 0; i < ds.iterations.size(); ++i) {
    for (const auto& q : ds.iterations[i]) {
      json j = {{"kind", "question"}, {"iteration", i + 1}, {"question", q.question}};
      if (q.reference) j["reference"] = *q.reference;
      out << j.dump() << '\n';
    }
  }
}

}  // namespace cqa
