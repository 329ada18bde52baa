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
#include <span>
#include <vector>

namespace cqa {

// Unit-length real vector. Every similarity in the engine is computed
// between Embeddings, so cosine similarity reduces to a dot product.
class Embedding {
 public:
  // Scales `raw` to unit L2 norm. Throws DegenerateEmbedding when the norm
  // is at or below 1e-12.
  static Embedding normalize(std::span<const double> raw);

  // Wraps a vector that is already unit length (within 1e-6). Throws
  // InvalidArgument otherwise.
  static Embedding from_unit(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}

  std::vector<double> values_;
};

inline constexpr double kUnitNormTolerance = 1e-6;
inline constexpr double kDegenerateNorm = 1e-12;

// Dot product of two unit vectors. Throws InvalidArgument on dimension
// mismatch.
double cosine_similarity(const Embedding& a, const Embedding& b);

double l2_norm(std::span<const double> v);

}  // namespace cqa
