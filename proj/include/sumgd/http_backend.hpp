// Copyright 2026 The SumGD Engine Authors.
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

// Client for the model sidecar: a Backend whose queries are JSON-over-HTTP
// requests, plus a summarizer that calls the sidecar's summarize endpoint.

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumgd/backend.hpp"
#include "sumgd/summarizer.hpp"

namespace sumgd {

inline constexpr std::string_view kSidecarUrlEnv = "SUMGD_SIDECAR_URL";
inline constexpr int kWireSchemaVersion = 1;
// Allowed drift of exp-summed wire logprobs (and attention pairs) from 1.
inline constexpr double kWireTolerance = 1e-4;

struct HttpBackendOptions {
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{120000};
  std::size_t max_idle_connections = 8;
};

// Wire conversions, exposed for tests and the stub server.
nlohmann::json capabilities_to_wire(const BackendCapabilities& caps,
                                    TokenId eos_token);
BackendCapabilities capabilities_from_wire(const nlohmann::json& j,
                                           TokenId* eos_token = nullptr);
nlohmann::json distribution_request(const GenerationContext& ctx,
                                    std::size_t top_k);
nlohmann::json step_to_wire(const StepResult& step);
StepResult step_from_wire(const nlohmann::json& j, std::size_t vocab_size,
                          bool attention_expected);

class HttpBackend : public Backend {
 public:
  // Fetches capabilities once; BackendUnavailable if the sidecar is down.
  explicit HttpBackend(std::string base_url, HttpBackendOptions options = {});
  ~HttpBackend() override;

  // URL from SUMGD_SIDECAR_URL; ConfigError when unset.
  static std::unique_ptr<HttpBackend> from_env(HttpBackendOptions options = {});

  BackendCapabilities capabilities() const override { return caps_; }
  StepResult next_distribution(const GenerationContext& ctx,
                               std::size_t top_k = kDefaultTopK) const override;
  std::vector<TokenId> tokenize(std::string_view text) const override;
  std::string detokenize(std::span<const TokenId> tokens) const override;
  TokenId eos_token() const override { return eos_; }

  const std::string& base_url() const { return base_url_; }

  // POST with a JSON body (GET when body is null); maps HTTP failures onto
  // engine error codes.
  nlohmann::json call(std::string_view path, const nlohmann::json& body) const;

 private:
  class Pool;
  std::string base_url_;
  std::unique_ptr<Pool> pool_;
  BackendCapabilities caps_;
  TokenId eos_ = 0;
};

// Server-side summarization (the sidecar applies the variant's template).
// One request counts as one backend call.
class HttpSummarizer : public Summarizer {
 public:
  HttpSummarizer(const HttpBackend& backend, SummaryVariant variant)
      : backend_(backend), variant_(variant) {}

  SummaryResult summarize(std::string_view text) const override;
  std::string_view id() const override {
    return variant_ == SummaryVariant::kSelf ? "self" : "distilled";
  }

 private:
  const HttpBackend& backend_;
  SummaryVariant variant_;
};

}  // namespace sumgd
