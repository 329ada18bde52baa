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
#include "cqa/backends/http.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "cqa/core/errors.hpp"

namespace cqa {
namespace {

constexpr std::size_t kMaxBodyInError = 256;

std::string truncate(const std::string& s) {
  if (s.size() <= kMaxBodyInError) return s;
  return s.substr(0, kMaxBodyInError) + "...";
}

bool transient_status(int status) { return status == 429 || status >= 500; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

HttpTransport::HttpTransport(const HttpEndpoint& endpoint, RetryPolicy retry)
    : api_key_(endpoint.api_key), timeout_s_(endpoint.timeout_s), retry_(retry) {
  const auto scheme_end = endpoint.url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint url '" + endpoint.url + "' has no scheme");
  }
  // Built without TLS; put an https endpoint behind a local proxy.
  if (endpoint.url.compare(0, scheme_end, "http") != 0) {
    throw ConfigError("only http:// endpoints are supported, got '" + endpoint.url + "'");
  }
  const auto path_start = endpoint.url.find('/', scheme_end + 3);
  origin_ = endpoint.url.substr(0, path_start);
  prefix_ = path_start == std::string::npos ? "" : endpoint.url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (retry_.max_attempts < 1) throw ConfigError("retry max_attempts must be at least 1");
}

HttpTransport::~HttpTransport() = default;

std::unique_ptr<httplib::Client> HttpTransport::acquire() {
  {
    std::lock_guard<std::mutex> lock(pool_mu_);
    if (!pool_.empty()) {
      auto c = std::move(pool_.back());
      pool_.pop_back();
      return c;
    }
  }
  auto client = std::make_unique<httplib::Client>(origin_);
  const auto timeout = std::chrono::duration<double>(timeout_s_);
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);
  client->set_keep_alive(true);
  if (!api_key_.empty()) client->set_bearer_token_auth(api_key_);
  return client;
}

void HttpTransport::release(std::unique_ptr<httplib::Client> client) {
  std::lock_guard<std::mutex> lock(pool_mu_);
  pool_.push_back(std::move(client));
}

nlohmann::json HttpTransport::post_json(const std::string& path, const nlohmann::json& body) {
  const std::string full_path = prefix_ + path;
  const std::string payload = body.dump();
  const auto t0 = std::chrono::steady_clock::now();
  double backoff = retry_.initial_backoff_s;

  for (int attempt = 1;; ++attempt) {
    auto client = acquire();
    auto res = client->Post(full_path, payload, "application/json");
    const bool last = attempt >= retry_.max_attempts;

    if (!res) {
      const auto err = res.error();
      // A broken connection is not reused.
      client.reset();
      if (last) {
        std::ostringstream msg;
        msg << "POST " << origin_ << full_path << " failed after " << attempt
            << " attempt(s): " << httplib::to_string(err) << " (elapsed " << seconds_since(t0)
            << " s)";
        throw UpstreamError(msg.str(), 0, seconds_since(t0));
      }
    } else {
      const int status = res->status;
      std::string res_body = res->body;
      release(std::move(client));
      if (status >= 200 && status < 300) {
        auto parsed = nlohmann::json::parse(res_body, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded()) {
          throw ProtocolError("response from " + full_path + " is not JSON: " +
                              truncate(res_body));
        }
        return parsed;
      }
      if (!transient_status(status) || last) {
        throw UpstreamError("POST " + origin_ + full_path + " returned " +
                                std::to_string(status) + ": " + truncate(res_body),
                            status, seconds_since(t0));
      }
    }
    retries_.fetch_add(1);
    std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    backoff *= retry_.backoff_multiplier;
  }
}

HttpEmbedder::HttpEmbedder(const HttpEndpoint& endpoint, std::size_t dim, RetryPolicy retry)
    : model_(endpoint.model),
      dim_(dim),
      transport_(std::make_unique<HttpTransport>(endpoint, retry)) {}

Embedding HttpEmbedder::embed(std::string_view text) const {
  const std::string s(text);
  return embed_batch(std::span<const std::string>(&s, 1)).front();
}

std::vector<Embedding> HttpEmbedder::embed_batch(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  nlohmann::json body = {{"model", model_}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto res = transport_->post_json("/embeddings", body);

  if (!res.contains("data") || !res["data"].is_array() || res["data"].size() != texts.size()) {
    throw ProtocolError("embedding response lacks a data array of " +
                        std::to_string(texts.size()) + " items");
  }
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  for (std::size_t i = 0; i < res["data"].size(); ++i) {
    const auto& item = res["data"][i];
    if (!item.is_object() || !item.contains("embedding") || !item["embedding"].is_array()) {
      throw ProtocolError("embedding item " + std::to_string(i) + " has no embedding array");
    }
    std::vector<double> v;
    try {
      v = item["embedding"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError("embedding item " + std::to_string(i) + " is not numeric");
    }
    if (v.size() != dim_) {
      throw ProtocolError("embedding dim " + std::to_string(v.size()) + " != configured " +
                          std::to_string(dim_));
    }
    const std::size_t index =
        item.contains("index") && item["index"].is_number_unsigned() ? item["index"].get<std::size_t>() : i;
    rows.emplace_back(index, std::move(v));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Embedding> out;
  out.reserve(rows.size());
  for (auto& [idx, v] : rows) out.push_back(Embedding::normalize(v));
  return out;
}

HttpGenerator::HttpGenerator(const HttpEndpoint& endpoint, RetryPolicy retry)
    : model_(endpoint.model), transport_(std::make_unique<HttpTransport>(endpoint, retry)) {}

std::string HttpGenerator::generate(std::string_view prompt, double temperature) {
  nlohmann::json body = {
      {"model", model_},
      {"temperature", temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})}};
  const auto res = transport_->post_json("/chat/completions", body);
  try {
    return res.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("chat completion response lacks choices[0].message.content");
  }
}

}  // namespace cqa
