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
#include "cqa/replay/synthetic.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "cqa/core/errors.hpp"

namespace cqa {
namespace {

constexpr int kParaphraseAttempts = 64;

std::size_t uniform(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class WordSource {
 public:
  explicit WordSource(std::mt19937_64& rng) : rng_(rng) {}

  // Fresh word never returned before.
  std::string next() {
    for (;;) {
      const std::size_t len = 4 + uniform(rng_, 5);
      std::string w;
      for (std::size_t i = 0; i < len; ++i) w += static_cast<char>('a' + uniform(rng_, 26));
      if (used_.insert(w).second) return w;
    }
  }

  std::vector<std::string> words(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(next());
    return out;
  }

 private:
  std::mt19937_64& rng_;
  std::set<std::string> used_;
};

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct Topic {
  std::string question;
  std::string answer;
  std::string reference;
};

}  // namespace

std::string paraphrase(const std::string& text, const MockEmbedder& embedder,
                       double min_similarity, std::mt19937_64& rng) {
  const std::vector<std::string> words = split(text);
  if (words.size() < 2) throw InvalidArgument("paraphrase needs at least two words");
  const Embedding original = embedder.embed(text);
  for (int attempt = 0; attempt < kParaphraseAttempts; ++attempt) {
    std::vector<std::string> w = words;
    const std::size_t swaps = 1 + uniform(rng, 2);
    for (std::size_t s = 0; s < swaps; ++s) {
      const std::size_t i = uniform(rng, w.size() - 1);
      std::swap(w[i], w[i + 1]);
    }
    if (w == words) continue;
    std::string candidate = join(w);
    if (cosine_similarity(original, embedder.embed(candidate)) >= min_similarity) return candidate;
  }
  throw InvalidState("no paraphrase of \"" + text + "\" reaches similarity " +
                     std::to_string(min_similarity));
}

ReplayDataset make_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.iterations == 0) throw InvalidArgument("iterations must be positive");
  if (spec.stream_topics < spec.iterations) {
    throw InvalidArgument("stream_topics must be at least the number of iterations");
  }
  if (spec.paraphrase_rate < 0.0 || spec.paraphrase_rate >= 1.0) {
    throw InvalidArgument("paraphrase_rate must lie in [0, 1)");
  }
  if (spec.question_words < 2 || spec.answer_words == 0) {
    throw InvalidArgument("need at least two question words and one answer word");
  }

  std::mt19937_64 rng(spec.seed);
  WordSource source(rng);
  const MockEmbedder embedder(spec.dim);

  auto make_topic = [&] {
    Topic t;
    const auto q = source.words(spec.question_words);
    const auto a = source.words(spec.answer_words);
    t.question = join(q);
    t.answer = join(a);
    t.reference = t.question + " " + t.answer;
    return t;
  };

  ReplayDataset ds;
  ds.name = spec.name;
  ds.dim_hint = spec.dim;

  std::vector<Topic> seeds;
  for (std::size_t i = 0; i < spec.seed_topics; ++i) seeds.push_back(make_topic());
  std::vector<Topic> stream;
  for (std::size_t i = 0; i < spec.stream_topics; ++i) stream.push_back(make_topic());

  ChunkId chunk_id = 1;
  auto add_chunk = [&](const Topic& t) {
    std::vector<std::string> words = split(t.reference);
    const double rho = unit(rng) * spec.max_corruption;
    for (auto& w : words) {
      if (unit(rng) < rho) w = source.next();
    }
    ds.kb.push_back(KnowledgeLine{chunk_id++, join(words), std::nullopt});
  };
  for (const auto& t : seeds) {
    add_chunk(t);
    ds.seed.push_back(SeedPair{t.question, t.answer, 1.0});
  }
  for (const auto& t : stream) add_chunk(t);

  // Originals in random order, split evenly across iterations.
  std::vector<std::size_t> order(stream.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  ds.iterations.assign(spec.iterations, {});
  std::vector<std::size_t> first_seen(stream.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t it = pos * spec.iterations / order.size();
    const Topic& t = stream[order[pos]];
    first_seen[order[pos]] = it;
    ds.iterations[it].push_back(DatasetQuestion{t.question, t.reference});
  }

  // Each paraphrase repeats a topic after it is known: a seed topic in any
  // iteration, a stream topic in a random iteration after its first one.
  // Later iterations therefore carry more repeats.
  std::vector<std::size_t> sources;  // < seeds.size(): seed, else stream index
  for (std::size_t i = 0; i < seeds.size(); ++i) sources.push_back(i);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (first_seen[i] + 1 < spec.iterations) sources.push_back(seeds.size() + i);
  }
  const std::size_t paraphrases = static_cast<std::size_t>(
      static_cast<double>(stream.size()) * spec.paraphrase_rate / (1.0 - spec.paraphrase_rate) +
      0.5);
  for (std::size_t k = 0; k < paraphrases && !sources.empty(); ++k) {
    const std::size_t src = sources[uniform(rng, sources.size())];
    const Topic* t = nullptr;
    std::size_t it = 0;
    if (src < seeds.size()) {
      t = &seeds[src];
      it = uniform(rng, spec.iterations);
    } else {
      const std::size_t i = src - seeds.size();
      t = &stream[i];
      it = first_seen[i] + 1 + uniform(rng, spec.iterations - first_seen[i] - 1);
    }
    ds.iterations[it].push_back(
        DatasetQuestion{paraphrase(t->question, embedder, spec.min_similarity, rng), t->reference});
  }
  for (auto& batch : ds.iterations) std::shuffle(batch.begin(), batch.end(), rng);
  return ds;
}

}  // namespace cqa
