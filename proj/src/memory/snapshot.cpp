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
#include "cqa/memory/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqa/core/errors.hpp"

namespace cqa {
namespace {

using nlohmann::json;

json read_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw IncompatibleSnapshot(std::string("snapshot truncated: expected ") + what);
  }
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw IncompatibleSnapshot(std::string("malformed ") + what + " line: " + e.what());
  }
}

}  // namespace

void write_tier(std::ostream& out, const TierStore& tier, double gamma, RecordId next_id) {
  std::vector<RecordId> ids;
  ids.reserve(tier.members().size());
  for (const auto& e : tier.members().entries()) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());

  json header = {{"kind", "tier"},
                 {"version", kSnapshotVersion},
                 {"tier", std::string(to_string(tier.tier()))},
                 {"gamma", gamma},
                 {"dim", tier.dim()},
                 {"next_id", next_id},
                 {"next_cluster_id", tier.next_cluster_id()},
                 {"records", ids.size()},
                 {"clusters", tier.clusters().size()}};
  out << header.dump() << '\n';

  for (RecordId id : ids) {
    const auto& e = tier.members().at(id);
    json rec = {{"kind", "record"},
                {"id", id},
                {"question", e.payload.question},
                {"answer", e.payload.answer},
                {"score", e.payload.score},
                {"embedding", std::vector<double>(e.embedding.values().begin(),
                                                  e.embedding.values().end())}};
    out << rec.dump() << '\n';
  }
  for (const auto& [cid, c] : tier.clusters()) {
    json cl = {{"kind", "cluster"},
               {"id", cid},
               {"member_ids", std::vector<RecordId>(c.member_ids.begin(), c.member_ids.end())}};
    out << cl.dump() << '\n';
  }
}

TierStore read_tier(std::istream& in, Tier expected_tier, std::size_t dim, double gamma,
                    RecordId* next_id) {
  const json header = read_line(in, "tier header");
  try {
    if (header.at("kind") != "tier") throw IncompatibleSnapshot("expected a tier header");
    if (header.at("version").get<int>() != kSnapshotVersion) {
      throw IncompatibleSnapshot("unsupported snapshot version " + header.at("version").dump());
    }
    if (tier_from_string(header.at("tier").get<std::string>()) != expected_tier) {
      throw IncompatibleSnapshot("expected the " + std::string(to_string(expected_tier)) +
                                 " tier, found " + header.at("tier").dump());
    }
    if (header.at("dim").get<std::size_t>() != dim) {
      throw IncompatibleSnapshot("snapshot dim " + header.at("dim").dump() +
                                 " does not match configured dim " + std::to_string(dim));
    }
    if (header.at("gamma").get<double>() != gamma) {
      throw IncompatibleSnapshot("snapshot gamma " + header.at("gamma").dump() +
                                 " does not match configured gamma " + std::to_string(gamma));
    }
    if (next_id != nullptr) *next_id = header.at("next_id").get<RecordId>();

    const auto n_records = header.at("records").get<std::size_t>();
    const auto n_clusters = header.at("clusters").get<std::size_t>();
    std::vector<QARecord> records;
    records.reserve(n_records);
    for (std::size_t i = 0; i < n_records; ++i) {
      const json r = read_line(in, "record");
      if (r.at("kind") != "record") throw IncompatibleSnapshot("expected a record line");
      QARecord rec{r.at("id").get<RecordId>(),
                   r.at("question").get<std::string>(),
                   Embedding::from_unit(r.at("embedding").get<std::vector<double>>()),
                   r.at("answer").get<std::string>(),
                   r.at("score").get<double>(),
                   expected_tier};
      if (classify_tier(rec.score, gamma) != expected_tier) {
        throw IncompatibleSnapshot("record " + std::to_string(rec.id) +
                                   " has a score outside its tier");
      }
      records.push_back(std::move(rec));
    }
    std::map<ClusterId, std::vector<RecordId>> clusters;
    for (std::size_t i = 0; i < n_clusters; ++i) {
      const json c = read_line(in, "cluster");
      if (c.at("kind") != "cluster") throw IncompatibleSnapshot("expected a cluster line");
      clusters[c.at("id").get<ClusterId>()] = c.at("member_ids").get<std::vector<RecordId>>();
    }
    return TierStore::restore(expected_tier, dim, records, clusters,
                              header.at("next_cluster_id").get<ClusterId>());
  } catch (const json::exception& e) {
    throw IncompatibleSnapshot(std::string("malformed snapshot: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw IncompatibleSnapshot(std::string("malformed snapshot: ") + e.what());
  }
}

void save_snapshot(const std::filesystem::path& path, const CqaMemory& memory, double gamma) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    write_tier(out, memory.high(), gamma, memory.next_id());
    write_tier(out, memory.low(), gamma, memory.next_id());
    out.flush();
    if (!out) throw Error("failed writing snapshot '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

CqaMemory load_snapshot(const std::filesystem::path& path, std::size_t dim, double gamma) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IncompatibleSnapshot("cannot open snapshot '" + path.string() + "'");
  RecordId next_high = 0;
  RecordId next_low = 0;
  TierStore high = read_tier(in, Tier::kHigh, dim, gamma, &next_high);
  TierStore low = read_tier(in, Tier::kLow, dim, gamma, &next_low);
  if (next_high != next_low) throw IncompatibleSnapshot("tier sections disagree on next_id");
  for (const TierStore* t : {&high, &low}) {
    for (const auto& e : t->members().entries()) {
      if (e.id >= next_high) {
        throw IncompatibleSnapshot("record id " + std::to_string(e.id) + " is not below next_id");
      }
    }
  }
  for (const auto& e : high.members().entries()) {
    if (low.contains(e.id)) {
      throw IncompatibleSnapshot("record id " + std::to_string(e.id) + " present in both tiers");
    }
  }
  return CqaMemory(std::move(high), std::move(low), next_high);
}

}  // namespace cqa
