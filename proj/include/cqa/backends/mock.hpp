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

#include <atomic>
#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "cqa/backends/providers.hpp"

namespace cqa {

// Hashes character trigrams of the canonicalized text into `dim` buckets
// and normalizes. Texts that differ by a few characters share most
// trigrams, so paraphrases made by small edits land close together.
class MockEmbedder : public EmbeddingProvider {
 public:
  explicit MockEmbedder(std::size_t dim = 64);

  std::size_t dim() const override { return dim_; }
  Embedding embed(std::string_view text) const override;

  // Raw bucket counts before normalization.
  std::vector<double> bucket_counts(std::string_view text) const;

 private:
  std::size_t dim_;
};

// Deterministic stand-in for a chat model. Pulls the question and the first
// piece of evidence out of a rendered prompt and answers
//   {"answer": "<preamble> <question> <evidence>"}
// Evidence preference: previous_relevant_qa answer, then knowledge chunk
// text, then bad_cqa_contexts answer. Every call is recorded.
class MockGenerator : public GenerationProvider {
 public:
  struct Call {
    std::string prompt;
    double temperature;
  };

  static constexpr const char* kPreamble = "Answer:";

  std::string generate(std::string_view prompt, double temperature) override;

  std::size_t call_count() const { return calls_.load(); }
  std::vector<Call> captured() const;
  void reset();

  // The answer text the mock would produce, without the JSON wrapper.
  static std::string compose(std::string_view prompt);

 private:
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  std::vector<Call> log_;
};

// Generator that always throws UpstreamError; for failure-path tests.
class FailingGenerator : public GenerationProvider {
 public:
  std::string generate(std::string_view prompt, double temperature) override;
};

}  // namespace cqa
