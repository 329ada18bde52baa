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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cqa/core/embedding.hpp"
#include "cqa/core/errors.hpp"

namespace cqa {

struct ScoredId {
  std::uint64_t id = 0;
  double similarity = 0.0;

  friend bool operator==(const ScoredId&, const ScoredId&) = default;
};

// Descending similarity, ties by ascending id.
inline bool ranks_before(const ScoredId& a, const ScoredId& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

// Keeps the best `k` of `scored` in rank order.
inline void keep_top_k(std::vector<ScoredId>& scored, std::size_t k) {
  if (k < scored.size()) {
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                      scored.end(), ranks_before);
    scored.resize(k);
  } else {
    std::sort(scored.begin(), scored.end(), ranks_before);
  }
}

// Flat in-memory store with exact top-k cosine retrieval. Entries live in a
// dense array so a query is one linear pass; deletion swaps the last entry
// into the hole.
//
// Not internally synchronized: many readers or one writer at a time.
template <typename Payload>
class VectorStore {
 public:
  struct Entry {
    std::uint64_t id;
    Embedding embedding;
    Payload payload;
  };

  VectorStore() = default;
  explicit VectorStore(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(std::uint64_t id) const { return slot_.count(id) != 0; }

  void insert(std::uint64_t id, Embedding embedding, Payload payload) {
    if (dim_ != 0 && embedding.dim() != dim_) {
      throw InvalidArgument("embedding dim " + std::to_string(embedding.dim()) +
                            " does not match store dim " + std::to_string(dim_));
    }
    if (slot_.count(id) != 0) {
      throw ConflictError("id " + std::to_string(id) + " already present");
    }
    slot_.emplace(id, entries_.size());
    entries_.push_back(Entry{id, std::move(embedding), std::move(payload)});
  }

  void erase(std::uint64_t id) {
    auto it = slot_.find(id);
    if (it == slot_.end()) throw NotFound("id " + std::to_string(id) + " not present");
    const std::size_t hole = it->second;
    slot_.erase(it);
    if (hole + 1 != entries_.size()) {
      entries_[hole] = std::move(entries_.back());
      slot_[entries_[hole].id] = hole;
    }
    entries_.pop_back();
  }

  const Entry& at(std::uint64_t id) const {
    auto it = slot_.find(id);
    if (it == slot_.end()) throw NotFound("id " + std::to_string(id) + " not present");
    return entries_[it->second];
  }

  Entry& at(std::uint64_t id) {
    auto it = slot_.find(id);
    if (it == slot_.end()) throw NotFound("id " + std::to_string(id) + " not present");
    return entries_[it->second];
  }

  const Entry* find(std::uint64_t id) const {
    auto it = slot_.find(id);
    return it == slot_.end() ? nullptr : &entries_[it->second];
  }

  // Exact top-k by cosine similarity. Empty store yields an empty list.
  std::vector<ScoredId> top_k(const Embedding& query, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    std::vector<ScoredId> scored;
    scored.reserve(entries_.size());
    for (const Entry& e : entries_) {
      scored.push_back({e.id, cosine_similarity(query, e.embedding)});
    }
    keep_top_k(scored, k);
    return scored;
  }

  // Unordered view of the entries; order changes after erase().
  const std::vector<Entry>& entries() const { return entries_; }

  void clear() {
    entries_.clear();
    slot_.clear();
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<std::uint64_t, std::size_t> slot_;
};

}  // namespace cqa
