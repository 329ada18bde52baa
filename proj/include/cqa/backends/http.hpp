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

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqa/backends/providers.hpp"

namespace httplib {
class Client;
}

namespace cqa {

struct RetryPolicy {
  int max_attempts = 3;
  double initial_backoff_s = 0.5;
  double backoff_multiplier = 2.0;
};

// Base URL of an OpenAI-compatible API, including any version prefix
// (e.g. "http://localhost:8000/v1").
struct HttpEndpoint {
  std::string url;
  std::string model;
  std::string api_key;
  double timeout_s = 60.0;
};

// JSON-over-HTTP POST with a small pool of keep-alive clients and retry with
// exponential backoff on transport failures, 429, and 5xx.
class HttpTransport {
 public:
  HttpTransport(const HttpEndpoint& endpoint, RetryPolicy retry);
  ~HttpTransport();

  // Throws UpstreamError (non-2xx after retries, timeout, transport
  // failure) or ProtocolError (body is not JSON).
  nlohmann::json post_json(const std::string& path, const nlohmann::json& body);

  // Retries performed since construction (attempts beyond the first).
  std::size_t retry_count() const { return retries_.load(); }

 private:
  std::unique_ptr<httplib::Client> acquire();
  void release(std::unique_ptr<httplib::Client> client);

  std::string origin_;
  std::string prefix_;
  std::string api_key_;
  double timeout_s_;
  RetryPolicy retry_;
  std::atomic<std::size_t> retries_{0};
  std::mutex pool_mu_;
  std::vector<std::unique_ptr<httplib::Client>> pool_;
};

class HttpEmbedder : public EmbeddingProvider {
 public:
  HttpEmbedder(const HttpEndpoint& endpoint, std::size_t dim, RetryPolicy retry = {});

  std::size_t dim() const override { return dim_; }
  Embedding embed(std::string_view text) const override;
  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;

  std::size_t retry_count() const { return transport_->retry_count(); }

 private:
  std::string model_;
  std::size_t dim_;
  std::unique_ptr<HttpTransport> transport_;
};

class HttpGenerator : public GenerationProvider {
 public:
  explicit HttpGenerator(const HttpEndpoint& endpoint, RetryPolicy retry = {});

  std::string generate(std::string_view prompt, double temperature) override;

  std::size_t retry_count() const { return transport_->retry_count(); }

 private:
  std::string model_;
  std::unique_ptr<HttpTransport> transport_;
};

}  // namespace cqa
