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

// Independent reference implementations used as test oracles. Nothing here
// shares code with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cqa/core/embedding.hpp"

namespace cqa::testing {

inline std::vector<double> random_direction(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
      x = n(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-9) continue;
    for (auto& x : v) x /= norm;
    return v;
  }
}

inline Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
  return Embedding::normalize(random_direction(rng, dim));
}

// base + noise * gaussian, renormalized.
inline Embedding perturb(const Embedding& base, double noise, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(base.values().begin(), base.values().end());
  for (auto& x : v) x += noise * n(rng);
  return Embedding::normalize(v);
}

// Unit basis vector e_i.
inline Embedding basis(std::size_t dim, std::size_t i) {
  std::vector<double> v(dim, 0.0);
  v.at(i) = 1.0;
  return Embedding::from_unit(v);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

inline std::vector<double> to_vec(const Embedding& e) {
  return {e.values().begin(), e.values().end()};
}

// Mean of the given vectors, computed from scratch.
inline std::vector<double> mean_of(const std::vector<std::vector<double>>& vs) {
  std::vector<double> m(vs.at(0).size(), 0.0);
  for (const auto& v : vs) {
    for (std::size_t i = 0; i < v.size(); ++i) m[i] += v[i];
  }
  for (auto& x : m) x /= static_cast<double>(vs.size());
  return m;
}

inline std::vector<double> normalized(std::vector<double> v) {
  const double n = std::sqrt(dot(v, v));
  for (auto& x : v) x /= n;
  return v;
}

// One quality store following the update phase step by step: a max over
// every stored question against delta, replace-if-strictly-better or
// discard, otherwise the best centroid (mean of members, recomputed from
// scratch) against tau, otherwise a fresh cluster. Ties go to the smallest
// id, matching the library's documented tie rule.
class OracleStore {
 public:
  enum class Kind { kInserted, kReplaced, kDiscarded, kNewCluster };

  struct Record {
    std::vector<double> emb;
    double score;
    std::uint64_t cluster;
  };

  struct Outcome {
    Kind kind;
    std::uint64_t cluster = 0;
    std::uint64_t record_id = 0;
    std::uint64_t displaced_id = 0;
  };

  Outcome update(const std::vector<double>& q, double s, double tau, double delta,
                 std::uint64_t new_id) {
    // max CosSim(q, Emb(V_i.q)) >= delta
    std::optional<std::uint64_t> best_id;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [id, r] : records_) {
      const double sim = cos_sim(q, r.emb);
      if (sim > best) {
        best = sim;
        best_id = id;
      }
    }
    if (best_id && best >= delta) {
      Record& old = records_.at(*best_id);
      if (s > old.score) {
        const std::uint64_t c = old.cluster;
        records_.erase(*best_id);
        records_[new_id] = Record{q, s, c};
        auto& members = clusters_.at(c);
        members.erase(std::find(members.begin(), members.end(), *best_id));
        members.push_back(new_id);
        return {Kind::kReplaced, c, new_id, *best_id};
      }
      return {Kind::kDiscarded, 0, 0, *best_id};
    }
    // max CosSim(q, c_i) >= tau
    std::optional<std::uint64_t> best_cluster;
    double best_c = -std::numeric_limits<double>::infinity();
    for (const auto& [cid, members] : clusters_) {
      const double sim = cos_sim(q, centroid(cid));
      if (sim > best_c) {
        best_c = sim;
        best_cluster = cid;
      }
    }
    if (best_cluster && best_c >= tau) {
      clusters_.at(*best_cluster).push_back(new_id);
      records_[new_id] = Record{q, s, *best_cluster};
      return {Kind::kInserted, *best_cluster, new_id, 0};
    }
    const std::uint64_t cid = next_cluster_++;
    clusters_[cid] = {new_id};
    records_[new_id] = Record{q, s, cid};
    return {Kind::kNewCluster, cid, new_id, 0};
  }

  std::vector<double> centroid(std::uint64_t cid) const {
    std::vector<std::vector<double>> vs;
    for (auto id : clusters_.at(cid)) vs.push_back(records_.at(id).emb);
    return mean_of(vs);
  }

  const std::map<std::uint64_t, Record>& records() const { return records_; }
  const std::map<std::uint64_t, std::vector<std::uint64_t>>& clusters() const { return clusters_; }

 private:
  std::map<std::uint64_t, Record> records_;
  std::map<std::uint64_t, std::vector<std::uint64_t>> clusters_;
  std::uint64_t next_cluster_ = 1;
};

struct OracleHit {
  std::uint64_t id;
  double sim;
};

// Full sort, descending similarity, ascending id.
inline std::vector<OracleHit> flat_top_k(const std::vector<std::pair<std::uint64_t, std::vector<double>>>& items,
                                         const std::vector<double>& q, std::size_t k) {
  std::vector<OracleHit> hits;
  for (const auto& [id, v] : items) hits.push_back({id, dot(q, v)});
  std::sort(hits.begin(), hits.end(), [](const OracleHit& a, const OracleHit& b) {
    return a.sim != b.sim ? a.sim > b.sim : a.id < b.id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

enum class OraclePath { kReuse, kGenerateHigh, kGenerateLowKb };

inline OraclePath oracle_path(std::optional<double> best, double tau, double delta) {
  if (!best) return OraclePath::kGenerateLowKb;
  if (*best >= delta) return OraclePath::kReuse;
  if (*best >= tau) return OraclePath::kGenerateHigh;
  return OraclePath::kGenerateLowKb;
}

// Temperature by direct evaluation: every pairwise gap, no sorting.
inline double oracle_temperature(const std::vector<double>& scores, double k, double t_min,
                                 double t_max, double t_default) {
  if (scores.size() < 2) return t_default;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = i + 1; j < scores.size(); ++j) gap = std::min(gap, std::fabs(scores[i] - scores[j]));
  }
  return std::min(t_max, std::max(t_min, std::exp(-k * gap)));
}

}  // namespace cqa::testing
