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
#include "cqa/backends/mock.hpp"

#include <cstdint>

#include <json.hpp>

#include "cqa/backends/text.hpp"
#include "cqa/core/errors.hpp"

namespace cqa {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// Value of a "- <name>: <json>" context line, or empty.
nlohmann::json context_value(std::string_view prompt, std::string_view name) {
  const std::string marker = "- " + std::string(name) + ": ";
  auto pos = prompt.find(marker);
  if (pos == std::string_view::npos) return nlohmann::json::array();
  pos += marker.size();
  auto end = prompt.find('\n', pos);
  auto value = prompt.substr(pos, end == std::string_view::npos ? prompt.size() - pos : end - pos);
  auto parsed = nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_array()) return nlohmann::json::array();
  return parsed;
}

std::string extract_question(std::string_view prompt) {
  static constexpr std::string_view kHeader = "### Given Question\n";
  auto pos = prompt.find(kHeader);
  if (pos == std::string_view::npos) return {};
  pos += kHeader.size();
  auto end = prompt.find("\n\n", pos);
  return std::string(prompt.substr(pos, end == std::string_view::npos ? std::string_view::npos
                                                                      : end - pos));
}

std::string first_string(const nlohmann::json& arr, const char* key) {
  for (const auto& item : arr) {
    if (item.is_object() && item.contains(key) && item[key].is_string()) {
      return item[key].get<std::string>();
    }
  }
  return {};
}

}  // namespace

std::vector<Embedding> EmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

MockEmbedder::MockEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("embedding dim must be positive");
}

std::vector<double> MockEmbedder::bucket_counts(std::string_view text) const {
  const std::string canon = text::canonicalize(text);
  if (canon.empty()) throw DegenerateEmbedding("cannot embed empty text");
  std::vector<double> counts(dim_, 0.0);
  if (canon.size() < 3) {
    counts[fnv1a(canon) % dim_] += 1.0;
    return counts;
  }
  for (std::size_t i = 0; i + 3 <= canon.size(); ++i) {
    counts[fnv1a(std::string_view(canon).substr(i, 3)) % dim_] += 1.0;
  }
  return counts;
}

Embedding MockEmbedder::embed(std::string_view text) const {
  return Embedding::normalize(bucket_counts(text));
}

std::string MockGenerator::compose(std::string_view prompt) {
  std::string evidence = first_string(context_value(prompt, "previous_relevant_qa"), "answer");
  if (evidence.empty()) evidence = first_string(context_value(prompt, "knowledge_base_context"), "text");
  if (evidence.empty()) evidence = first_string(context_value(prompt, "bad_cqa_contexts"), "answer");

  std::string out = kPreamble;
  const std::string question = extract_question(prompt);
  if (!question.empty()) out += " " + question;
  if (!evidence.empty()) out += " " + evidence;
  return out;
}

std::string MockGenerator::generate(std::string_view prompt, double temperature) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    log_.push_back(Call{std::string(prompt), temperature});
  }
  calls_.fetch_add(1);
  return nlohmann::json{{"answer", compose(prompt)}}.dump();
}

std::vector<MockGenerator::Call> MockGenerator::captured() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_;
}

void MockGenerator::reset() {
  std::lock_guard<std::mutex> lock(mu_);
  log_.clear();
  calls_.store(0);
}

std::string FailingGenerator::generate(std::string_view, double) {
  throw UpstreamError("generation backend unavailable", 503);
}

}  // namespace cqa
