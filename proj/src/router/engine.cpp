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
#include "cqa/router/engine.hpp"

#include <chrono>
#include <mutex>
#include <vector>

#include "cqa/core/errors.hpp"
#include "cqa/memory/snapshot.hpp"
#include "cqa/router/prompt.hpp"
#include "cqa/router/temperature.hpp"

namespace cqa {
namespace {

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Provider exceptions that are not ours become upstream errors.
template <typename Fn>
auto call_upstream(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw UpstreamError(std::string(what) + " failed: " + e.what());
  }
}

}  // namespace

Engine::Engine(EngineConfig cfg, Backends backends)
    : cfg_(std::move(cfg)),
      backends_(std::move(backends)),
      router_(cfg_),
      memory_(cfg_.embedding_dim),
      kb_(cfg_.embedding_dim) {
  cfg_.validate();
  if (!backends_.embedder || !backends_.generator || !backends_.scorer) {
    throw InvalidArgument("engine requires embedder, generator and scorer");
  }
  if (backends_.embedder->dim() != cfg_.embedding_dim) {
    throw ConfigError("embedder dim " + std::to_string(backends_.embedder->dim()) +
                      " does not match embedding_dim " + std::to_string(cfg_.embedding_dim));
  }
}

Embedding Engine::embed(const std::string& text) const {
  Embedding e = call_upstream("embedding", [&] { return backends_.embedder->embed(text); });
  if (e.dim() != cfg_.embedding_dim) {
    throw ProtocolError("embedder returned dim " + std::to_string(e.dim()));
  }
  return e;
}

void Engine::add_knowledge(ChunkId id, const std::string& text,
                           std::optional<Embedding> embedding) {
  Embedding e = embedding ? std::move(*embedding) : embed(text);
  std::unique_lock lock(kb_mu_);
  kb_.insert(id, std::move(e), text);
}

std::size_t Engine::knowledge_size() const {
  std::shared_lock lock(kb_mu_);
  return kb_.size();
}

UpdateOutcome Engine::seed(const std::string& question, const std::string& answer, double score) {
  const Embedding emb = embed(question);
  const Tier t = classify_tier(clamp_score(score), cfg_.thresholds.gamma);
  std::unique_lock lock(tier_mutex(t));
  return memory_.tier(t).update(question, emb, answer, clamp_score(score), cfg_.thresholds,
                                memory_.id_allocator());
}

RouteDecision Engine::route(const Embedding& query) const {
  RouteDecision d;
  {
    std::shared_lock lock(high_mu_);
    d = router_.route_high(query, memory_.high());
  }
  if (d.path == Path::kGenerateWithLowAndKb) {
    std::shared_lock low_lock(low_mu_);
    std::shared_lock kb_lock(kb_mu_);
    router_.gather_fallback(query, memory_.low(), kb_, d);
  }
  return d;
}

AnswerResult Engine::answer_with(const std::string& question, const Embedding& emb,
                                 const std::optional<std::string>& reference) {
  AnswerResult r;
  r.decision = route(emb);

  if (r.decision.path == Path::kReuseHigh) {
    const QARecord& hit = r.decision.evidence_qa.front().record;
    r.answer = hit.answer;
    r.score = hit.score;
    r.record_id = hit.id;
    return r;
  }

  if (hook_) hook_(question, r.decision);

  std::vector<double> scores;
  for (const auto& e : r.decision.evidence_qa) scores.push_back(e.record.score);
  const double temperature = adaptive_temperature(scores, cfg_.temperature);
  r.decision.temperature_used = temperature;

  const std::string prompt = render_prompt(cfg_.prompt, prompt_fields(question, r.decision));
  const std::string raw = call_upstream(
      "generation", [&] { return backends_.generator->generate(prompt, temperature); });
  r.generation_called = true;
  ParsedAnswer parsed = parse_generation_response(raw);
  r.answer = std::move(parsed.answer);
  r.parse_fallback = parsed.parse_fallback;
  r.score = call_upstream("scoring",
                          [&] { return backends_.scorer->score(question, r.answer, reference); });
  return r;
}

AnswerResult Engine::answer(const std::string& question,
                            const std::optional<std::string>& reference) {
  if (question.empty()) throw InvalidArgument("question must be non-empty");
  const auto t0 = std::chrono::steady_clock::now();
  AnswerResult r = answer_with(question, embed(question), reference);
  if (r.decision.path != Path::kReuseHigh) r.record_id.reset();
  r.latency_seconds = elapsed_s(t0);
  return r;
}

AnswerResult Engine::process(const std::string& question,
                             const std::optional<std::string>& reference,
                             const CommitHook& on_commit) {
  if (question.empty()) throw InvalidArgument("question must be non-empty");
  const auto t0 = std::chrono::steady_clock::now();
  const Embedding emb = embed(question);
  AnswerResult r = answer_with(question, emb, reference);
  if (r.decision.path != Path::kReuseHigh) {
    const Tier t = classify_tier(r.score, cfg_.thresholds.gamma);
    std::unique_lock lock(tier_mutex(t));
    const UpdateOutcome outcome = memory_.tier(t).update(question, emb, r.answer, r.score,
                                                         cfg_.thresholds, memory_.id_allocator());
    r.update = outcome;
    if (outcome.kind == UpdateKind::kDiscarded) {
      r.record_id.reset();
    } else {
      r.record_id = outcome.record_id;
    }
    if (on_commit) on_commit(r);
  } else if (on_commit) {
    on_commit(r);
  }
  r.latency_seconds = elapsed_s(t0);
  return r;
}

FeedbackResult Engine::apply_feedback(RecordId id, double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InvalidArgument("score " + std::to_string(score) + " outside [0,1]");
  }
  std::scoped_lock lock(high_mu_, low_mu_);
  const auto where = memory_.locate(id);
  if (!where) throw NotFound("record " + std::to_string(id) + " not found");

  FeedbackResult out;
  out.applied = true;
  const Tier target = classify_tier(score, cfg_.thresholds.gamma);
  if (target == *where) {
    memory_.tier(*where).set_score(id, score, cfg_.thresholds.gamma);
    out.tier = target;
    out.record_id = id;
    return out;
  }

  const QARecord rec = memory_.tier(*where).record(id);
  memory_.tier(*where).remove(id);
  const UpdateOutcome o = memory_.tier(target).update(
      rec.question, rec.embedding, rec.answer, score, cfg_.thresholds, memory_.id_allocator());
  out.retiered = true;
  out.tier = target;
  if (o.kind != UpdateKind::kDiscarded) out.record_id = o.record_id;
  return out;
}

std::optional<QARecord> Engine::find_record(RecordId id) const {
  std::shared_lock hl(high_mu_);
  std::shared_lock ll(low_mu_);
  if (auto t = memory_.locate(id)) return memory_.tier(*t).record(id);
  return std::nullopt;
}

EngineStats Engine::stats() const {
  std::shared_lock hl(high_mu_);
  std::shared_lock ll(low_mu_);
  std::shared_lock kl(kb_mu_);
  return EngineStats{memory_.high().stats(), memory_.low().stats(), kb_.size()};
}

void Engine::save_snapshot(const std::filesystem::path& path) const {
  std::shared_lock hl(high_mu_);
  std::shared_lock ll(low_mu_);
  cqa::save_snapshot(path, memory_, cfg_.thresholds.gamma);
}

void Engine::load_snapshot(const std::filesystem::path& path) {
  CqaMemory loaded = cqa::load_snapshot(path, cfg_.embedding_dim, cfg_.thresholds.gamma);
  std::scoped_lock lock(high_mu_, low_mu_);
  memory_ = std::move(loaded);
}

void Engine::inspect(const std::function<void(const CqaMemory&)>& fn) const {
  std::shared_lock hl(high_mu_);
  std::shared_lock ll(low_mu_);
  fn(memory_);
}

}  // namespace cqa
