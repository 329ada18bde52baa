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
#include <cstdint>
#include <random>
#include <string>

#include "cqa/backends/mock.hpp"
#include "cqa/replay/dataset.hpp"

namespace cqa {

// Seeded generator for paraphrase-heavy question streams. Each topic is a
// question of random pseudo-words with a matching answer; the reference is
// question + answer words and the topic's knowledge chunk is the reference
// with a per-topic fraction of words replaced, which spreads mock scores
// across the gamma range. Paraphrases are adjacent-word swaps kept at or
// above `min_similarity` under the mock embedder.
struct SyntheticSpec {
  std::string name = "synthetic";
  std::size_t dim = 256;
  std::size_t seed_topics = 20;
  std::size_t stream_topics = 200;
  std::size_t iterations = 10;
  // Share of stream questions that are paraphrases of earlier-known topics.
  double paraphrase_rate = 0.3;
  double min_similarity = 0.85;
  std::size_t question_words = 8;
  std::size_t answer_words = 12;
  double max_corruption = 0.6;
  std::uint64_t seed = 7;
};

ReplayDataset make_synthetic_dataset(const SyntheticSpec& spec);

// Swaps adjacent words until the text differs from the original, retrying
// while mock-embedding cosine falls below `min_similarity`. Throws
// InvalidArgument for texts of fewer than two words and InvalidState when
// no acceptable variant is found.
std::string paraphrase(const std::string& text, const MockEmbedder& embedder,
                       double min_similarity, std::mt19937_64& rng);

}  // namespace cqa
