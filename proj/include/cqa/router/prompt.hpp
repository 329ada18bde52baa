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

#include "cqa/core/config.hpp"
#include "cqa/router/routing.hpp"

namespace cqa {

// Placeholder values for one rendering. Each context field is a JSON array
// on a single line ("[]" when empty).
struct PromptFields {
  std::string knowledge_base_context;
  std::string previous_relevant_qa;
  std::string bad_cqa_contexts;
  std::string question;
};

// Evidence placement per path: high-tier QA goes to previous_relevant_qa,
// low-tier QA to bad_cqa_contexts, documents to knowledge_base_context.
PromptFields prompt_fields(std::string_view question, const RouteDecision& decision);

std::string render_prompt(PromptVariant variant, const PromptFields& fields);

struct ParsedAnswer {
  std::string answer;
  // True when the response was not an object with a string "answer" field
  // and the raw text was used instead.
  bool parse_fallback = false;
};

// Accepts bare JSON, JSON inside a ``` fence, or JSON embedded in prose.
ParsedAnswer parse_generation_response(std::string_view raw);

}  // namespace cqa
