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

#include <algorithm>
#include <fstream>

#include "sumgd/error.hpp"
#include "sumgd/mock_backends.hpp"
#include "sumgd/text.hpp"

namespace sumgd {
namespace {

std::vector<std::string> collect_vocab(
    const std::vector<ScriptedBackend::Rule>& rules,
    const std::vector<std::pair<std::string, double>>& fallback,
    std::vector<std::string> words) {
  auto add = [&](const std::string& w) {
    if (w != WordVocab::kEosWord) words.push_back(w);
  };
  for (const auto& r : rules) {
    for (const auto& w : r.pattern.suffix) add(w);
    for (const auto& w : r.pattern.contains) add(w);
    for (const auto& [w, p] : r.distribution) add(w);
  }
  for (const auto& [w, p] : fallback) add(w);
  return words;
}

std::vector<std::pair<std::string, double>> parse_table(
    const nlohmann::json& j) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [word, p] : j.items()) out.emplace_back(word, p.get<double>());
  return out;
}

bool ends_with(const std::vector<std::string>& seq,
               const std::vector<std::string>& suffix) {
  if (suffix.size() > seq.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), seq.rbegin());
}

bool contains_run(const std::vector<std::string>& seq,
                  const std::vector<std::string>& run) {
  if (run.empty()) return true;
  return std::search(seq.begin(), seq.end(), run.begin(), run.end()) !=
         seq.end();
}

}  // namespace

ScriptedBackend::ScriptedBackend(
    std::vector<Rule> rules,
    std::vector<std::pair<std::string, double>> fallback,
    std::vector<std::string> extra_vocab, std::size_t max_context,
    bool supports_image)
    : WordBackend(WordVocab(collect_vocab(rules, fallback,
                                          std::move(extra_vocab))),
                  max_context, supports_image),
      rules_(std::move(rules)),
      fallback_(std::move(fallback)) {
  if (fallback_.empty()) fallback_.emplace_back(WordVocab::kEosWord, 1.0);
  for (const auto& r : rules_) {
    if (r.distribution.empty()) {
      throw Error(ErrorCode::kConfigError, "scripted rule has no distribution");
    }
    if (r.attention) any_attention_ = true;
  }
}

ScriptedBackend ScriptedBackend::from_json(const nlohmann::json& spec) {
  try {
    std::vector<Rule> rules;
    for (const auto& jr : spec.at("rules")) {
      Rule r;
      const auto& jp = jr.at("pattern");
      if (jp.is_string()) {
        r.pattern.suffix = split_words(jp.get<std::string>());
      } else {
        if (jp.contains("suffix")) {
          r.pattern.suffix = jp["suffix"].get<std::vector<std::string>>();
        }
        if (jp.contains("contains")) {
          r.pattern.contains = jp["contains"].get<std::vector<std::string>>();
        }
        if (jp.contains("image")) r.pattern.image = jp["image"].get<bool>();
        if (jp.contains("min_history")) {
          r.pattern.min_history = jp["min_history"].get<std::size_t>();
        }
        if (jp.contains("max_history")) {
          r.pattern.max_history = jp["max_history"].get<std::size_t>();
        }
        r.pattern.prompt_contains = jp.value("prompt_contains", "");
      }
      r.distribution = parse_table(jr.at("distribution"));
      if (jr.contains("attention")) {
        const auto a = jr["attention"].get<std::vector<double>>();
        if (a.size() != 2) {
          throw Error(ErrorCode::kConfigError, "attention must be a pair");
        }
        r.attention = Attention{a[0], a[1]};
      }
      rules.push_back(std::move(r));
    }
    std::vector<std::pair<std::string, double>> fallback;
    if (spec.contains("default")) fallback = parse_table(spec["default"]);
    std::vector<std::string> vocab;
    if (spec.contains("vocab")) {
      vocab = spec["vocab"].get<std::vector<std::string>>();
    }
    return ScriptedBackend(std::move(rules), std::move(fallback),
                           std::move(vocab), spec.value("max_context", 4096),
                           spec.value("supports_image", true));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                std::string("scripted backend spec: ") + e.what());
  }
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
}

BackendCapabilities ScriptedBackend::capabilities() const {
  BackendCapabilities caps = WordBackend::capabilities();
  caps.supports_attention = any_attention_;
  return caps;
}

bool ScriptedBackend::matches(const Pattern& p, const GenerationContext& ctx,
                              const std::vector<std::string>& history) const {
  if (p.image && *p.image != ctx.image.has_value()) return false;
  if (p.min_history && ctx.history.size() < *p.min_history) return false;
  if (p.max_history && ctx.history.size() > *p.max_history) return false;
  if (!p.prompt_contains.empty() &&
      ctx.prompt_text.find(p.prompt_contains) == std::string::npos) {
    return false;
  }
  return ends_with(history, p.suffix) && contains_run(history, p.contains);
}

StepResult ScriptedBackend::next_distribution(const GenerationContext& ctx,
                                              std::size_t top_k) const {
  validate_context(ctx, capabilities());
  const auto history = vocab_.words_of(ctx.history);
  const std::vector<std::pair<std::string, double>>* table = &fallback_;
  std::optional<Attention> attention;
  for (const auto& r : rules_) {
    if (matches(r.pattern, ctx, history)) {
      table = &r.distribution;
      attention = r.attention;
      break;
    }
  }
  std::vector<std::pair<TokenId, double>> weights;
  weights.reserve(table->size());
  for (const auto& [w, p] : *table) weights.emplace_back(vocab_.id(w), p);
  StepResult result;
  result.distribution = from_word_weights(weights, top_k);
  result.attention = attention;
  return result;
}

}  // namespace sumgd
