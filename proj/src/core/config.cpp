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
#include "cqa/core/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "cqa/core/errors.hpp"

namespace cqa {
namespace {

using Setter = std::function<void(EngineConfig&, const std::string&)>;

double parse_double(const std::string& field, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + field + "' expects a number, got '" + value + "'");
  }
}

std::size_t parse_size(const std::string& field, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("field '" + field + "' expects a non-negative integer, got '" +
                      value + "'");
  }
}

struct Field {
  std::string doc;
  Setter set;
};

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"tau", {"cluster assignment / reference threshold",
               [](EngineConfig& c, const std::string& v) {
                 c.thresholds.tau = parse_double("tau", v);
               }}},
      {"delta", {"reuse / replacement threshold",
                 [](EngineConfig& c, const std::string& v) {
                   c.thresholds.delta = parse_double("delta", v);
                 }}},
      {"gamma", {"quality tier threshold",
                 [](EngineConfig& c, const std::string& v) {
                   c.thresholds.gamma = parse_double("gamma", v);
                 }}},
      {"scale_k", {"temperature scaling factor",
                   [](EngineConfig& c, const std::string& v) {
                     c.temperature.scale_k = parse_double("scale_k", v);
                   }}},
      {"t_min", {"minimum decoding temperature",
                 [](EngineConfig& c, const std::string& v) {
                   c.temperature.t_min = parse_double("t_min", v);
                 }}},
      {"t_max", {"maximum decoding temperature",
                 [](EngineConfig& c, const std::string& v) {
                   c.temperature.t_max = parse_double("t_max", v);
                 }}},
      {"t_default", {"temperature when fewer than two evidence scores exist",
                     [](EngineConfig& c, const std::string& v) {
                       c.temperature.t_default = parse_double("t_default", v);
                     }}},
      {"top_k", {"evidence items per source",
                 [](EngineConfig& c, const std::string& v) {
                   c.top_k = parse_size("top_k", v);
                 }}},
      {"embedding_dim", {"embedding dimension",
                         [](EngineConfig& c, const std::string& v) {
                           c.embedding_dim = parse_size("embedding_dim", v);
                           c.backend.dim = c.embedding_dim;
                         }}},
      {"prompt", {"prompt wording: microsoft | lisp | polardb",
                  [](EngineConfig& c, const std::string& v) {
                    c.prompt = prompt_variant_from_string(v);
                  }}},
      {"backend_kind", {"mock | http",
                        [](EngineConfig& c, const std::string& v) {
                          if (v == "mock") {
                            c.backend.kind = BackendKind::kMock;
                          } else if (v == "http") {
                            c.backend.kind = BackendKind::kHttp;
                          } else {
                            throw ConfigError("backend_kind must be mock or http, got '" +
                                              v + "'");
                          }
                        }}},
      {"backend_url", {"base URL of an OpenAI-compatible endpoint",
                       [](EngineConfig& c, const std::string& v) { c.backend.url = v; }}},
      {"backend_model", {"chat completion model name",
                         [](EngineConfig& c, const std::string& v) { c.backend.model = v; }}},
      {"backend_embed_model", {"embedding model name",
                               [](EngineConfig& c, const std::string& v) {
                                 c.backend.embed_model = v;
                               }}},
      {"backend_api_key_env", {"environment variable holding the API key",
                               [](EngineConfig& c, const std::string& v) {
                                 c.backend.api_key_env = v;
                               }}},
      {"backend_timeout_s", {"request timeout in seconds",
                             [](EngineConfig& c, const std::string& v) {
                               c.backend.timeout_s = parse_double("backend_timeout_s", v);
                             }}},
      {"preset", {"msqa | procqa | polardbqa (resets thresholds and prompt)",
                  [](EngineConfig& c, const std::string& v) {
                    EngineConfig p = preset(v);
                    c.thresholds = p.thresholds;
                    c.prompt = p.prompt;
                  }}},
  };
  return table;
}

std::string scalar_to_string(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer() || j.is_number_unsigned()) return std::to_string(j.get<long long>());
  if (j.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    return os.str();
  }
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  throw ConfigError("expected a scalar, got " + j.dump());
}

}  // namespace

void Thresholds::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ConfigError("tau must lie in (0,1), got " + std::to_string(tau));
  }
  if (!(delta > tau && delta <= 1.0)) {
    throw ConfigError("delta must lie in (tau,1], got " + std::to_string(delta) +
                      " with tau " + std::to_string(tau));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in [0,1], got " + std::to_string(gamma));
  }
}

void TemperatureConfig::validate() const {
  if (!(scale_k > 0.0)) throw ConfigError("scale_k must be positive");
  if (!(t_min > 0.0 && t_min <= t_default && t_default <= t_max)) {
    throw ConfigError("temperatures must satisfy 0 < t_min <= t_default <= t_max");
  }
}

void EngineConfig::validate() const {
  thresholds.validate();
  temperature.validate();
  if (top_k < 1) throw ConfigError("top_k must be at least 1");
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be at least 1");
  if (backend.kind == BackendKind::kHttp && backend.url.empty()) {
    throw ConfigError("http backend requires backend_url");
  }
  if (!(backend.timeout_s > 0.0)) throw ConfigError("backend_timeout_s must be positive");
}

std::string_view to_string(PromptVariant v) {
  switch (v) {
    case PromptVariant::kMicrosoft:
      return "microsoft";
    case PromptVariant::kLisp:
      return "lisp";
    case PromptVariant::kPolarDb:
      return "polardb";
  }
  return "microsoft";
}

PromptVariant prompt_variant_from_string(std::string_view name) {
  if (name == "microsoft") return PromptVariant::kMicrosoft;
  if (name == "lisp") return PromptVariant::kLisp;
  if (name == "polardb") return PromptVariant::kPolarDb;
  throw ConfigError("unknown prompt variant '" + std::string(name) + "'");
}

EngineConfig preset(std::string_view name) {
  EngineConfig cfg;
  if (name == "msqa") {
    cfg.thresholds = {0.75, 0.9, 0.6};
    cfg.prompt = PromptVariant::kMicrosoft;
  } else if (name == "procqa") {
    cfg.thresholds = {0.75, 0.9, 0.6};
    cfg.prompt = PromptVariant::kLisp;
  } else if (name == "polardbqa") {
    cfg.thresholds = {0.75, 0.8, 0.7};
    cfg.prompt = PromptVariant::kPolarDb;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

ConfigLoader& ConfigLoader::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

ConfigLoader& ConfigLoader::from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");

  // "preset" first so explicit fields in the same file win over it.
  if (auto it = doc.find("preset"); it != doc.end()) set("preset", scalar_to_string(*it));
  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") continue;
    if (value.is_object()) {
      // thresholds / temperature blocks are flattened as-is, the backend
      // block gets a "backend_" prefix.
      const std::string prefix = key == "backend" ? "backend_" : "";
      if (key != "backend" && key != "thresholds" && key != "temperature") {
        throw ConfigError("unknown config block '" + key + "'");
      }
      for (const auto& [sub, sub_value] : value.items()) {
        set(prefix + sub, scalar_to_string(sub_value));
      }
    } else {
      set(key, scalar_to_string(value));
    }
  }
  return *this;
}

ConfigLoader& ConfigLoader::from_environment() {
  for (const auto& [name, field] : fields()) {
    std::string env = "CQA_";
    for (char c : name) env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(env.c_str()); v != nullptr && *v != '\0') set(name, v);
  }
  return *this;
}

ConfigLoader& ConfigLoader::set(const std::string& field, const std::string& value) {
  auto it = fields().find(field);
  if (it == fields().end()) {
    // dim inside the backend block is an alias for embedding_dim
    if (field == "backend_dim") return set("embedding_dim", value);
    throw ConfigError("unknown config field '" + field + "'");
  }
  it->second.set(cfg_, value);
  return *this;
}

EngineConfig ConfigLoader::build() const {
  EngineConfig out = cfg_;
  out.backend.dim = out.embedding_dim;
  out.validate();
  return out;
}

const std::map<std::string, std::string>& ConfigLoader::field_docs() {
  static const std::map<std::string, std::string> docs = [] {
    std::map<std::string, std::string> m;
    for (const auto& [name, field] : fields()) m[name] = field.doc;
    return m;
  }();
  return docs;
}

}  // namespace cqa
