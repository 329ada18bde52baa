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
#include "cqa/backends/factory.hpp"

#include <cstdlib>

#include "cqa/backends/http.hpp"
#include "cqa/backends/mock.hpp"
#include "cqa/backends/scorer.hpp"
#include "cqa/core/errors.hpp"

namespace cqa {

Backends make_backends(const EngineConfig& cfg) {
  Backends b;
  b.scorer = std::make_shared<OverlapScorer>();
  if (cfg.backend.kind == BackendKind::kMock) {
    b.embedder = std::make_shared<MockEmbedder>(cfg.embedding_dim);
    b.generator = std::make_shared<MockGenerator>();
    return b;
  }

  HttpEndpoint ep;
  ep.url = cfg.backend.url;
  ep.timeout_s = cfg.backend.timeout_s;
  if (!cfg.backend.api_key_env.empty()) {
    const char* key = std::getenv(cfg.backend.api_key_env.c_str());
    if (key == nullptr) {
      throw ConfigError("environment variable " + cfg.backend.api_key_env + " is not set");
    }
    ep.api_key = key;
  }
  HttpEndpoint gen = ep;
  gen.model = cfg.backend.model;
  HttpEndpoint emb = ep;
  emb.model = cfg.backend.embed_model.empty() ? cfg.backend.model : cfg.backend.embed_model;
  b.generator = std::make_shared<HttpGenerator>(gen);
  b.embedder = std::make_shared<HttpEmbedder>(emb, cfg.embedding_dim);
  return b;
}

}  // namespace cqa
