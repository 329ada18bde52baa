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
#include "cqa/memory/tier_store.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cqa/core/errors.hpp"

namespace cqa {

Embedding centroid(const Cluster& cluster) {
  if (cluster.member_ids.empty()) {
    throw InvalidState("cluster " + std::to_string(cluster.id) + " has no members");
  }
  std::vector<double> mean(cluster.centroid_sum);
  const double n = static_cast<double>(cluster.size());
  for (double& x : mean) x /= n;
  return Embedding::normalize(mean);
}

std::string_view to_string(UpdateKind kind) {
  switch (kind) {
    case UpdateKind::kInserted:
      return "inserted";
    case UpdateKind::kReplaced:
      return "replaced";
    case UpdateKind::kDiscarded:
      return "discarded";
    case UpdateKind::kNewCluster:
      return "new_cluster";
  }
  return "discarded";
}

TierStore::TierStore(Tier tier, std::size_t dim)
    : tier_(tier), dim_(dim), members_(dim), centroid_index_(dim) {}

UpdateOutcome TierStore::update(const std::string& question, const Embedding& emb,
                                const std::string& answer, double score,
                                const Thresholds& thresholds, const IdAllocator& next_id) {
  if (emb.dim() != dim_) {
    throw InvalidArgument("embedding dim " + std::to_string(emb.dim()) +
                          " does not match tier dim " + std::to_string(dim_));
  }
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InvalidArgument("score " + std::to_string(score) + " outside [0,1]");
  }
  if (classify_tier(score, thresholds.gamma) != tier_) {
    throw InvalidArgument("score " + std::to_string(score) + " does not belong to the " +
                          std::string(to_string(tier_)) + " tier");
  }

  UpdateOutcome out;
  out.tier = tier_;
  const auto nearest = nearest_member(emb);
  out.max_member_similarity =
      nearest ? nearest->similarity : -std::numeric_limits<double>::infinity();

  if (nearest && nearest->similarity >= thresholds.delta) {
    const RecordId old_id = nearest->id;
    out.displaced_id = old_id;
    const MemberInfo& old = members_.at(old_id).payload;
    if (!(score > old.score)) {
      out.kind = UpdateKind::kDiscarded;
      return out;
    }
    const ClusterId cid = old.cluster;
    auto cit = clusters_.find(cid);
    if (cit == clusters_.end()) {
      throw CorruptionError("record " + std::to_string(old_id) + " points at missing cluster " +
                            std::to_string(cid));
    }
    const RecordId new_id = next_id();
    members_.erase(old_id);
    members_.insert(new_id, emb, MemberInfo{question, answer, score, cid});
    Cluster& c = cit->second;
    c.member_ids.erase(old_id);
    c.member_ids.insert(new_id);
    recompute_centroid(c);
    refresh_centroid_index(c);

    out.kind = UpdateKind::kReplaced;
    out.cluster_id = cid;
    out.record_id = new_id;
    return out;
  }

  if (auto match = assign_cluster(emb, thresholds.tau)) {
    Cluster& c = mutable_cluster(match->cluster_id);
    const RecordId new_id = next_id();
    members_.insert(new_id, emb, MemberInfo{question, answer, score, c.id});
    c.member_ids.insert(new_id);
    const auto v = emb.values();
    for (std::size_t i = 0; i < dim_; ++i) c.centroid_sum[i] += v[i];
    refresh_centroid_index(c);

    out.kind = UpdateKind::kInserted;
    out.cluster_id = c.id;
    out.record_id = new_id;
    return out;
  }

  const RecordId new_id = next_id();
  Cluster c;
  c.id = next_cluster_id_++;
  c.member_ids.insert(new_id);
  c.centroid_sum.assign(emb.values().begin(), emb.values().end());
  members_.insert(new_id, emb, MemberInfo{question, answer, score, c.id});
  auto [it, inserted] = clusters_.emplace(c.id, std::move(c));
  refresh_centroid_index(it->second);

  out.kind = UpdateKind::kNewCluster;
  out.cluster_id = it->first;
  out.record_id = new_id;
  return out;
}

std::optional<ClusterMatch> TierStore::assign_cluster(const Embedding& emb, double tau) const {
  if (centroid_index_.empty()) return std::nullopt;
  const auto best = centroid_index_.top_k(emb, 1);
  if (best.front().similarity >= tau) return ClusterMatch{best.front().id, best.front().similarity};
  return std::nullopt;
}

std::optional<ScoredId> TierStore::nearest_member(const Embedding& emb) const {
  std::optional<ScoredId> best;
  for (const auto& e : members_.entries()) {
    ScoredId cand{e.id, cosine_similarity(emb, e.embedding)};
    if (!best || ranks_before(cand, *best)) best = cand;
  }
  return best;
}

std::vector<ScoredId> TierStore::retrieve(const Embedding& query, std::size_t k) const {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (centroid_index_.empty()) return {};
  std::vector<ScoredId> pool;
  for (const ScoredId& c : centroid_index_.top_k(query, k)) {
    for (RecordId id : cluster(c.id).member_ids) {
      pool.push_back({id, cosine_similarity(query, members_.at(id).embedding)});
    }
  }
  keep_top_k(pool, k);
  return pool;
}

void TierStore::remove(RecordId id) {
  const ClusterId cid = members_.at(id).payload.cluster;
  Cluster& c = mutable_cluster(cid);
  members_.erase(id);
  c.member_ids.erase(id);
  if (c.member_ids.empty()) {
    centroid_index_.erase(cid);
    clusters_.erase(cid);
    return;
  }
  recompute_centroid(c);
  refresh_centroid_index(c);
}

void TierStore::set_score(RecordId id, double score, double gamma) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InvalidArgument("score " + std::to_string(score) + " outside [0,1]");
  }
  if (classify_tier(score, gamma) != tier_) {
    throw InvalidArgument("score " + std::to_string(score) + " would move record " +
                          std::to_string(id) + " out of the " +
                          std::string(to_string(tier_)) + " tier");
  }
  members_.at(id).payload.score = score;
}

QARecord TierStore::record(RecordId id) const {
  const auto& e = members_.at(id);
  return QARecord{e.id, e.payload.question, e.embedding, e.payload.answer, e.payload.score, tier_};
}

Embedding TierStore::cluster_centroid(ClusterId id) const { return centroid(cluster(id)); }

const Cluster& TierStore::cluster(ClusterId id) const {
  auto it = clusters_.find(id);
  if (it == clusters_.end()) throw NotFound("cluster " + std::to_string(id) + " not present");
  return it->second;
}

Cluster& TierStore::mutable_cluster(ClusterId id) {
  auto it = clusters_.find(id);
  if (it == clusters_.end()) {
    throw CorruptionError("cluster " + std::to_string(id) + " referenced but missing");
  }
  return it->second;
}

TierStats TierStore::stats() const {
  TierStats s;
  s.member_count = members_.size();
  s.cluster_count = clusters_.size();
  s.mean_cluster_size = s.cluster_count == 0 ? 0.0
                                             : static_cast<double>(s.member_count) /
                                                   static_cast<double>(s.cluster_count);
  return s;
}

void TierStore::recompute_centroid(Cluster& c) {
  c.centroid_sum.assign(dim_, 0.0);
  for (RecordId id : c.member_ids) {
    const auto v = members_.at(id).embedding.values();
    for (std::size_t i = 0; i < dim_; ++i) c.centroid_sum[i] += v[i];
  }
}

void TierStore::refresh_centroid_index(const Cluster& c) {
  if (centroid_index_.contains(c.id)) centroid_index_.erase(c.id);
  centroid_index_.insert(c.id, centroid(c), NoPayload{});
}

TierStore TierStore::restore(Tier tier, std::size_t dim, const std::vector<QARecord>& records,
                             const std::map<ClusterId, std::vector<RecordId>>& clusters,
                             ClusterId next_cluster_id) {
  TierStore store(tier, dim);
  std::map<RecordId, const QARecord*> by_id;
  for (const QARecord& r : records) {
    if (r.embedding.dim() != dim) {
      throw IncompatibleSnapshot("record " + std::to_string(r.id) + " has dim " +
                                 std::to_string(r.embedding.dim()));
    }
    if (!by_id.emplace(r.id, &r).second) {
      throw IncompatibleSnapshot("duplicate record id " + std::to_string(r.id));
    }
  }
  std::size_t assigned = 0;
  for (const auto& [cid, ids] : clusters) {
    if (ids.empty()) throw IncompatibleSnapshot("cluster " + std::to_string(cid) + " is empty");
    if (cid >= next_cluster_id) {
      throw IncompatibleSnapshot("cluster id " + std::to_string(cid) +
                                 " is not below next_cluster_id");
    }
    Cluster c;
    c.id = cid;
    for (RecordId id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw IncompatibleSnapshot("cluster " + std::to_string(cid) +
                                   " references unknown record " + std::to_string(id));
      }
      if (store.members_.contains(id)) {
        throw IncompatibleSnapshot("record " + std::to_string(id) + " is in two clusters");
      }
      const QARecord& r = *it->second;
      store.members_.insert(id, r.embedding, MemberInfo{r.question, r.answer, r.score, cid});
      c.member_ids.insert(id);
      ++assigned;
    }
    store.recompute_centroid(c);
    auto [pos, ok] = store.clusters_.emplace(cid, std::move(c));
    store.refresh_centroid_index(pos->second);
  }
  if (assigned != records.size()) {
    throw IncompatibleSnapshot(std::to_string(records.size() - assigned) +
                               " records belong to no cluster");
  }
  store.next_cluster_id_ = next_cluster_id;
  return store;
}

void TierStore::check_invariants(double tolerance) const {
  auto fail = [](const std::string& what) { throw CorruptionError(what); };
  std::size_t counted = 0;
  for (const auto& [cid, c] : clusters_) {
    if (c.id != cid) fail("cluster key/id mismatch at " + std::to_string(cid));
    if (c.member_ids.empty()) fail("empty cluster " + std::to_string(cid));
    std::vector<double> mean(dim_, 0.0);
    for (RecordId id : c.member_ids) {
      const auto* e = members_.find(id);
      if (e == nullptr) fail("cluster " + std::to_string(cid) + " lists missing record " +
                             std::to_string(id));
      if (e->payload.cluster != cid) fail("record " + std::to_string(id) + " cluster mismatch");
      const auto v = e->embedding.values();
      for (std::size_t i = 0; i < dim_; ++i) mean[i] += v[i];
      ++counted;
    }
    const double n = static_cast<double>(c.size());
    for (std::size_t i = 0; i < dim_; ++i) {
      if (std::abs(mean[i] / n - c.centroid_sum[i] / n) > tolerance) {
        fail("cluster " + std::to_string(cid) + " centroid drifted from member mean");
      }
    }
    const auto* indexed = centroid_index_.find(cid);
    if (indexed == nullptr) fail("cluster " + std::to_string(cid) + " missing from index");
    if (!(indexed->embedding == centroid(c))) {
      fail("cluster " + std::to_string(cid) + " index entry is stale");
    }
  }
  if (counted != members_.size()) fail("some records belong to no cluster");
  if (centroid_index_.size() != clusters_.size()) fail("centroid index size mismatch");
}

}  // namespace cqa
