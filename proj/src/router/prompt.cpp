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
#include "cqa/router/prompt.hpp"

#include <json.hpp>

namespace cqa {
namespace {

using nlohmann::json;

std::string_view role_line(PromptVariant v) {
  switch (v) {
    case PromptVariant::kMicrosoft:
      return "You are a proficient expert specializing in answering questions about Microsoft "
             "technologies and products, including Azure, Office 365, Windows, and more.";
    case PromptVariant::kLisp:
      return "You are a proficient expert specializing in answering questions about the Lisp "
             "programming language.";
    case PromptVariant::kPolarDb:
      return "You are a proficient expert specializing in answering questions about PolarDB. "
             "PolarDB for PostgreSQL is a cloud-native database service.";
  }
  return "";
}

constexpr std::string_view kInstructions =
    "### System Instructions:\n"
    "1. Understand the intent of the question:\n"
    "   - Carefully analyze the question to ensure you understand the user's needs.\n"
    "2. If there is a relevant historical question previous_relevant_qa:\n"
    "   If previous_relevant_qa is highly similar to the current question, you can directly use "
    "the answer from previous_relevant_qa.\n"
    "   - If previous_relevant_qa is not highly similar to the current question, it can be used "
    "as a reference, but the answer should be adjusted to match the current question:\n"
    "      - Based on the feedback score from previous_relevant_qa, compare answers with higher "
    "and lower scores, and analyze the reasons for improved scores. Avoid repeating mistakes "
    "from lower-scored answers to ensure a more accurate answer.\n"
    "3. If the knowledge_base_context exists, the answer should reference it:\n"
    "   - Also, analyze poor Q&A examples from bad_cqa_contexts (if available), comparing "
    "answers with higher and lower feedback scores, and analyze the reasons for the improved "
    "scores. Avoid repeating errors from low-scored answers, aiming to make the answer as "
    "accurate as possible.\n"
    "4. When there is insufficient context:\n"
    "   - If neither knowledge_base_context, previous_relevant_qa, nor bad_cqa_contexts provide "
    "enough information, respond with: \"Unable to answer based on available knowledge,\" "
    "avoiding speculation or providing uncertain information.\n"
    "5. Provide only the final answer, without including the analysis process.\n";

std::string qa_array(const std::vector<ScoredRecord>& items) {
  json arr = json::array();
  for (const auto& it : items) {
    arr.push_back({{"question", it.record.question},
                   {"answer", it.record.answer},
                   {"score", it.record.score}});
  }
  return arr.dump();
}

std::string doc_array(const std::vector<ScoredChunk>& items) {
  json arr = json::array();
  for (const auto& it : items) arr.push_back({{"doc_id", it.chunk.id}, {"text", it.chunk.text}});
  return arr.dump();
}

std::optional<ParsedAnswer> try_parse(std::string_view text) {
  auto j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto it = j.find("answer");
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return ParsedAnswer{it->get<std::string>(), false};
}

}  // namespace

PromptFields prompt_fields(std::string_view question, const RouteDecision& decision) {
  PromptFields f;
  f.question = std::string(question);
  const std::vector<ScoredRecord> none;
  const bool high = decision.path != Path::kGenerateWithLowAndKb;
  f.previous_relevant_qa = qa_array(high ? decision.evidence_qa : none);
  f.bad_cqa_contexts = qa_array(high ? none : decision.evidence_qa);
  f.knowledge_base_context = doc_array(decision.evidence_docs);
  return f;
}

std::string render_prompt(PromptVariant variant, const PromptFields& fields) {
  std::string out;
  out += "# Role\n";
  out += role_line(variant);
  out += "\n\n";
  out += kInstructions;
  out += "\n### Context\n";
  out += "- knowledge_base_context: " + fields.knowledge_base_context + "\n";
  out += "- previous_relevant_qa: " + fields.previous_relevant_qa + "\n";
  out += "- bad_cqa_contexts: " + fields.bad_cqa_contexts + "\n";
  out += "\n### Given Question\n";
  out += fields.question;
  out += "\n\nPlease return the answer in JSON format, with the structure: "
         "{\"answer\": \"Generated Answer\"}\n";
  return out;
}

ParsedAnswer parse_generation_response(std::string_view raw) {
  if (auto p = try_parse(raw)) return *p;
  const auto open = raw.find('{');
  const auto close = raw.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    if (auto p = try_parse(raw.substr(open, close - open + 1))) return *p;
  }
  return ParsedAnswer{std::string(raw), true};
}

}  // namespace cqa
