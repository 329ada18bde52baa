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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqa/core/config.hpp"
#include "cqa/core/types.hpp"
#include "cqa/index/vector_store.hpp"

namespace cqa {

// Set of stored questions plus the exact running sum of their embeddings.
// The centroid is sum / size, normalized on read.
struct Cluster {
  ClusterId id = 0;
  std::set<RecordId> member_ids;
  std::vector<double> centroid_sum;

  std::size_t size() const { return member_ids.size(); }
};

// Unit vector in the direction of the member mean. Throws InvalidState for
// an empty cluster.
Embedding centroid(const Cluster& cluster);

enum class UpdateKind { kInserted, kReplaced, kDiscarded, kNewCluster };

std::string_view to_string(UpdateKind kind);

struct UpdateOutcome {
  UpdateKind kind = UpdateKind::kDiscarded;
  Tier tier = Tier::kLow;
  // Cluster that received the record (Inserted, Replaced, NewCluster).
  ClusterId cluster_id = 0;
  // Id of the newly stored record; 0 when Discarded.
  RecordId record_id = 0;
  // Replaced: the evicted record. Discarded: the record that blocked the
  // insertion.
  RecordId displaced_id = 0;
  // Highest similarity to any member of the tier when the near-duplicate
  // check ran; -inf for an empty tier.
  double max_member_similarity = 0.0;
};

struct ClusterMatch {
  ClusterId cluster_id = 0;
  double similarity = 0.0;
};

struct TierStats {
  std::size_t member_count = 0;
  std::size_t cluster_count = 0;
  double mean_cluster_size = 0.0;

  friend bool operator==(const TierStats&, const TierStats&) = default;
};

// Per-record metadata kept alongside the question embedding.
struct MemberInfo {
  std::string question;
  std::string answer;
  double score = 0.0;
  ClusterId cluster = 0;
};

using IdAllocator = std::function<RecordId()>;

// One quality tier of the community QA memory: the stored records, their
// clusters, and an index over normalized cluster centroids.
//
// Single writer; concurrent readers are fine between writes.
class TierStore {
 public:
  TierStore(Tier tier, std::size_t dim);

  Tier tier() const { return tier_; }
  std::size_t dim() const { return dim_; }

  // Update phase for a record already routed to this tier:
  //   1. near-duplicate (>= delta) anywhere in the tier: replace it when the
  //      new score is strictly higher, otherwise discard;
  //   2. else join the closest cluster if its centroid is >= tau;
  //   3. else open a new cluster.
  // `next_id` is called only when a record is actually stored.
  UpdateOutcome update(const std::string& question, const Embedding& emb,
                       const std::string& answer, double score, const Thresholds& thresholds,
                       const IdAllocator& next_id);

  // Closest centroid if its similarity is >= tau (ties: lowest cluster id),
  // nullopt when a new cluster is required.
  std::optional<ClusterMatch> assign_cluster(const Embedding& emb, double tau) const;

  // Full scan over every member. Ties resolve to the lowest record id.
  std::optional<ScoredId> nearest_member(const Embedding& emb) const;

  // Top-k centroids, pool all of their members, top-k of the pool.
  std::vector<ScoredId> retrieve(const Embedding& query, std::size_t k) const;

  // Removes one record; its cluster is recomputed, or deleted when emptied.
  void remove(RecordId id);

  // Overwrites a score in place. The score must still belong to this tier.
  void set_score(RecordId id, double score, double gamma);

  bool contains(RecordId id) const { return members_.contains(id); }
  QARecord record(RecordId id) const;
  const MemberInfo& info(RecordId id) const { return members_.at(id).payload; }
  Embedding cluster_centroid(ClusterId id) const;
  const Cluster& cluster(ClusterId id) const;
  const std::map<ClusterId, Cluster>& clusters() const { return clusters_; }
  const VectorStore<MemberInfo>& members() const { return members_; }
  TierStats stats() const;

  ClusterId next_cluster_id() const { return next_cluster_id_; }

  // Rebuilds a tier from persisted records and memberships, recomputing
  // every centroid. Throws IncompatibleSnapshot when memberships do not
  // partition the records.
  static TierStore restore(Tier tier, std::size_t dim, const std::vector<QARecord>& records,
                           const std::map<ClusterId, std::vector<RecordId>>& clusters,
                           ClusterId next_cluster_id);

  // Throws CorruptionError on any broken membership/index invariant, or a
  // centroid further than `tolerance` from the mean of its members.
  void check_invariants(double tolerance = 1e-9) const;

 private:
  struct NoPayload {};

  void recompute_centroid(Cluster& c);
  void refresh_centroid_index(const Cluster& c);
  Cluster& mutable_cluster(ClusterId id);

  Tier tier_;
  std::size_t dim_;
  VectorStore<MemberInfo> members_;
  std::map<ClusterId, Cluster> clusters_;
  VectorStore<NoPayload> centroid_index_;
  ClusterId next_cluster_id_ = 1;
};

}  // namespace cqa
