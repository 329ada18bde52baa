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
#include "cqa/core/embedding.hpp"

#include <cmath>
#include <string>

#include "cqa/core/errors.hpp"

namespace cqa {

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

Embedding Embedding::normalize(std::span<const double> raw) {
  if (raw.empty()) throw DegenerateEmbedding("cannot normalize an empty vector");
  const double norm = l2_norm(raw);
  if (!(norm > kDegenerateNorm)) {
    throw DegenerateEmbedding("vector norm " + std::to_string(norm) +
                              " is too small to normalize");
  }
  std::vector<double> out(raw.begin(), raw.end());
  for (double& x : out) x /= norm;
  return Embedding(std::move(out));
}

Embedding Embedding::from_unit(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("embedding must be non-empty");
  const double norm = l2_norm(values);
  if (std::abs(norm - 1.0) > kUnitNormTolerance) {
    throw InvalidArgument("embedding is not unit length (norm " +
                          std::to_string(norm) + ")");
  }
  return Embedding(std::move(values));
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a.dim()) +
                          " vs " + std::to_string(b.dim()));
  }
  const auto av = a.values();
  const auto bv = b.values();
  double dot = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
  return dot;
}

}  // namespace cqa
