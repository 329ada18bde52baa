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

// Controllable providers for tests.

#include <atomic>
#include <map>
#include <string>

#include "cqa/backends/mock.hpp"
#include "cqa/backends/providers.hpp"

namespace cqa::testing {

// Embeds registered texts to fixed vectors; anything else via the mock.
class TableEmbedder : public EmbeddingProvider {
 public:
  explicit TableEmbedder(std::size_t dim) : fallback_(dim) {}
  void set(const std::string& text, Embedding e) { table_.insert_or_assign(text, std::move(e)); }
  std::size_t dim() const override { return fallback_.dim(); }
  Embedding embed(std::string_view text) const override {
    auto it = table_.find(std::string(text));
    return it != table_.end() ? it->second : fallback_.embed(text);
  }

 private:
  MockEmbedder fallback_;
  std::map<std::string, Embedding> table_;
};

class FixedScorer : public Scorer {
 public:
  explicit FixedScorer(double s) : s_(s) {}
  void set(double s) { s_ = s; }

 protected:
  double raw_score(std::string_view, std::string_view,
                   const std::optional<std::string>&) const override {
    return s_;
  }

 private:
  std::atomic<double> s_;
};

}  // namespace cqa::testing
