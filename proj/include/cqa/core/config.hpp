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
#include <map>
#include <string>
#include <string_view>

#include "cqa/core/types.hpp"

namespace cqa {

// tau: cluster assignment and the lower bound for using high-quality
// references. delta: near-duplicate bound for reuse and replacement.
// gamma: quality bound splitting the high and low tiers.
struct Thresholds {
  double tau = 0.75;
  double delta = 0.8;
  double gamma = 0.7;

  // Throws ConfigError unless 0 < tau < delta <= 1 and gamma in [0,1].
  void validate() const;
};

struct TemperatureConfig {
  double scale_k = 250.0;
  double t_min = 0.7;
  double t_max = 1.2;
  // Used when fewer than two scored evidence items are available.
  double t_default = 0.7;

  void validate() const;
};

enum class BackendKind { kMock, kHttp };

struct BackendConfig {
  BackendKind kind = BackendKind::kMock;
  std::string url;
  std::string model;
  std::string embed_model;
  // Name of the environment variable holding the API key. Keys are never
  // read from the config file itself.
  std::string api_key_env;
  double timeout_s = 60.0;
  // Dimension of the embeddings the backend produces.
  std::size_t dim = 64;
};

// Which domain wording the generation prompt uses.
enum class PromptVariant { kMicrosoft, kLisp, kPolarDb };

std::string_view to_string(PromptVariant v);
PromptVariant prompt_variant_from_string(std::string_view name);

struct EngineConfig {
  Thresholds thresholds;
  TemperatureConfig temperature;
  // Evidence items per source (centroids, members, knowledge chunks).
  std::size_t top_k = 5;
  std::size_t embedding_dim = 64;
  BackendConfig backend;
  PromptVariant prompt = PromptVariant::kMicrosoft;

  void validate() const;
};

// Named presets matching the published hyperparameter settings.
EngineConfig preset(std::string_view name);

// Layered configuration: defaults, then a JSON file, then environment
// variables (CQA_<FIELD>, e.g. CQA_TAU, CQA_TOP_K), then explicit
// overrides (typically CLI flags keyed by field name).
class ConfigLoader {
 public:
  ConfigLoader& from_file(const std::string& path);
  ConfigLoader& from_json_text(std::string_view text);
  ConfigLoader& from_environment();
  ConfigLoader& set(const std::string& field, const std::string& value);

  // Validates and returns the result. Throws ConfigError.
  EngineConfig build() const;

  // Field names accepted by set() and the environment layer.
  static const std::map<std::string, std::string>& field_docs();

 private:
  EngineConfig cfg_;
};

}  // namespace cqa
