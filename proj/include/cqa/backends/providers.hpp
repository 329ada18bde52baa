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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/core/embedding.hpp"
#include "cqa/core/types.hpp"

namespace cqa {

// Maps text to a unit embedding. Same text, same vector, for the lifetime
// of the instance. Implementations must be safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
  virtual std::vector<Embedding> embed_batch(std::span<const std::string> texts) const;
};

// Produces raw model output for a prompt. The temperature is passed through
// to the model unchanged.
class GenerationProvider {
 public:
  virtual ~GenerationProvider() = default;

  virtual std::string generate(std::string_view prompt, double temperature) = 0;
};

// Quality score for a (question, answer) pair, optionally against a
// reference answer. The public entry point clamps into [0,1].
class Scorer {
 public:
  virtual ~Scorer() = default;

  double score(std::string_view question, std::string_view answer,
               const std::optional<std::string>& reference) const {
    return clamp_score(raw_score(question, answer, reference));
  }

 protected:
  virtual double raw_score(std::string_view question, std::string_view answer,
                           const std::optional<std::string>& reference) const = 0;
};

struct Backends {
  std::shared_ptr<EmbeddingProvider> embedder;
  std::shared_ptr<GenerationProvider> generator;
  std::shared_ptr<Scorer> scorer;
};

}  // namespace cqa
