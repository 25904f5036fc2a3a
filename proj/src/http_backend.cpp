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

#include "sumgd/http_backend.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <utility>

#include <httplib.h>

#include "sumgd/error.hpp"
#include "sumgd/text.hpp"

namespace sumgd {

using nlohmann::json;

namespace {

std::size_t positive_count(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_unsigned() || j[key].get<std::size_t>() == 0) {
    throw Error(ErrorCode::kDataError,
                std::string("capabilities: '") + key + "' must be a positive integer");
  }
  return j[key].get<std::size_t>();
}

bool flag(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_boolean()) {
    throw Error(ErrorCode::kDataError,
                std::string("capabilities: '") + key + "' must be a boolean");
  }
  return j[key].get<bool>();
}

}  // namespace

json capabilities_to_wire(const BackendCapabilities& caps, TokenId eos_token) {
  return {{"schema_version", kWireSchemaVersion},
          {"supports_attention", caps.supports_attention},
          {"supports_image", caps.supports_image},
          {"vocab_size", caps.vocab_size},
          {"max_context", caps.max_context},
          {"eos_token_id", eos_token}};
}

BackendCapabilities capabilities_from_wire(const json& j, TokenId* eos_token) {
  if (!j.is_object()) throw Error(ErrorCode::kDataError, "capabilities is not an object");
  BackendCapabilities caps;
  caps.supports_attention = flag(j, "supports_attention");
  caps.supports_image = flag(j, "supports_image");
  caps.vocab_size = positive_count(j, "vocab_size");
  caps.max_context = positive_count(j, "max_context");
  if (eos_token != nullptr) {
    if (!j.contains("eos_token_id") || !j["eos_token_id"].is_number_integer()) {
      throw Error(ErrorCode::kDataError, "capabilities: missing eos_token_id");
    }
    *eos_token = j["eos_token_id"].get<TokenId>();
  }
  return caps;
}

json distribution_request(const GenerationContext& ctx, std::size_t top_k) {
  json req = {{"prompt", ctx.prompt_text}, {"tokens", ctx.history}, {"top_k", top_k}};
  if (ctx.image) req["image"] = *ctx.image;
  return req;
}

json step_to_wire(const StepResult& step) {
  json entries = json::array();
  for (const auto& e : step.distribution.ranked()) {
    entries.push_back({{"token_id", e.token}, {"logprob", std::log(e.prob)}});
  }
  json out = {{"schema_version", kWireSchemaVersion}, {"entries", std::move(entries)}};
  if (step.distribution.residual() > 0.0) {
    out["residual_logprob"] = std::log(step.distribution.residual());
  }
  if (step.attention) {
    out["attention"] = {{"image_mass", step.attention->image_mass},
                        {"text_mass", step.attention->text_mass}};
  }
  return out;
}

StepResult step_from_wire(const json& j, std::size_t vocab_size,
                          bool attention_expected) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
    throw Error(ErrorCode::kDataError, "distribution payload lacks 'entries'");
  }
  std::vector<TokenDistribution::Entry> entries;
  entries.reserve(j["entries"].size());
  for (const auto& e : j["entries"]) {
    entries.push_back({e.at("token_id").get<TokenId>(),
                       std::exp(e.at("logprob").get<double>())});
  }
  double residual = 0.0;
  if (j.contains("residual_logprob") && !j["residual_logprob"].is_null()) {
    residual = std::exp(j["residual_logprob"].get<double>());
  }
  StepResult step;
  step.distribution = TokenDistribution::from_unnormalized(
      std::move(entries), vocab_size, residual, kWireTolerance);
  if (j.contains("attention") && !j["attention"].is_null()) {
    Attention a{j["attention"].at("image_mass").get<double>(),
                j["attention"].at("text_mass").get<double>()};
    if (a.image_mass < 0.0 || a.text_mass < 0.0 ||
        std::abs(a.image_mass + a.text_mass - 1.0) > kWireTolerance) {
      throw Error(ErrorCode::kDataError, "attention masses do not sum to 1");
    }
    if (attention_expected) step.attention = a;
  }
  step.calls_consumed = 1;
  return step;
}

// Idle keep-alive clients; a query borrows one and returns it afterwards.
class HttpBackend::Pool {
 public:
  Pool(std::string url, HttpBackendOptions options)
      : url_(std::move(url)), options_(options) {}

  std::unique_ptr<httplib::Client> acquire() {
    {
      std::lock_guard lock(mu_);
      if (!idle_.empty()) {
        auto c = std::move(idle_.back());
        idle_.pop_back();
        return c;
      }
    }
    auto c = std::make_unique<httplib::Client>(url_);
    if (!c->is_valid()) {
      throw Error(ErrorCode::kConfigError, "invalid sidecar url '" + url_ + "'");
    }
    c->set_connection_timeout(options_.connect_timeout);
    c->set_read_timeout(options_.read_timeout);
    c->set_keep_alive(true);
    return c;
  }

  void release(std::unique_ptr<httplib::Client> c) {
    std::lock_guard lock(mu_);
    if (idle_.size() < options_.max_idle_connections) idle_.push_back(std::move(c));
  }

 private:
  std::string url_;
  HttpBackendOptions options_;
  std::mutex mu_;
  std::vector<std::unique_ptr<httplib::Client>> idle_;
};

HttpBackend::HttpBackend(std::string base_url, HttpBackendOptions options)
    : base_url_(std::move(base_url)),
      pool_(std::make_unique<Pool>(base_url_, options)) {
  caps_ = capabilities_from_wire(call("/v1/capabilities", nullptr), &eos_);
  caps_.word_level_tokens = false;
}

HttpBackend::~HttpBackend() = default;

std::unique_ptr<HttpBackend> HttpBackend::from_env(HttpBackendOptions options) {
  const char* url = std::getenv(std::string(kSidecarUrlEnv).c_str());
  if (url == nullptr || *url == '\0') {
    throw Error(ErrorCode::kConfigError,
                std::string(kSidecarUrlEnv) + " is not set");
  }
  return std::make_unique<HttpBackend>(url, options);
}

json HttpBackend::call(std::string_view path, const json& body) const {
  auto client = pool_->acquire();
  const std::string p(path);
  httplib::Result res = body.is_null()
                            ? client->Get(p)
                            : client->Post(p, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kBackendUnavailable,
                base_url_ + p + ": " + httplib::to_string(res.error()));
  }
  pool_->release(std::move(client));
  const std::string where = p + " -> HTTP " + std::to_string(res->status);
  switch (res->status) {
    case 200:
      break;
    case 400:
      throw Error(ErrorCode::kDataError, where + ": " + res->body);
    case 404:
      throw Error(ErrorCode::kCapabilityMissing, where + ": " + res->body);
    case 413:
      throw Error(ErrorCode::kContextOverflow, where + ": " + res->body);
    default:
      throw Error(ErrorCode::kBackendUnavailable, where + ": " + res->body);
  }
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kDataError, where + ": malformed JSON: " + e.what());
  }
}

StepResult HttpBackend::next_distribution(const GenerationContext& ctx,
                                          std::size_t top_k) const {
  validate_context(ctx, caps_);
  try {
    return step_from_wire(call("/v1/distribution", distribution_request(ctx, top_k)),
                          caps_.vocab_size, caps_.supports_attention);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDataError, std::string("/v1/distribution: ") + e.what());
  }
}

std::vector<TokenId> HttpBackend::tokenize(std::string_view text) const {
  if (text.empty()) return {};
  const json res = call("/v1/tokenize", {{"text", text}});
  if (!res.contains("tokens") || !res["tokens"].is_array()) {
    throw Error(ErrorCode::kDataError, "/v1/tokenize: missing 'tokens'");
  }
  return res["tokens"].get<std::vector<TokenId>>();
}

std::string HttpBackend::detokenize(std::span<const TokenId> tokens) const {
  if (tokens.empty()) return {};
  const json res = call("/v1/detokenize",
                        {{"tokens", std::vector<TokenId>(tokens.begin(), tokens.end())}});
  if (!res.contains("text") || !res["text"].is_string()) {
    throw Error(ErrorCode::kDataError, "/v1/detokenize: missing 'text'");
  }
  return res["text"].get<std::string>();
}

SummaryResult HttpSummarizer::summarize(std::string_view text) const {
  if (text.empty()) throw EmptySummaryError("nothing to summarize", 0);
  const json res = backend_.call("/v1/summarize", {{"text", text}, {"variant", id()}});
  if (!res.contains("summary") || !res["summary"].is_string()) {
    throw Error(ErrorCode::kDataError, "/v1/summarize: missing 'summary'");
  }
  SummaryResult out{trim(res["summary"].get<std::string>()), 1};
  if (out.text.empty()) {
    throw EmptySummaryError(std::string(id()) + " summary is empty", 1);
  }
  return out;
}

}  // namespace sumgd
