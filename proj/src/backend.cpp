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

#include "sumgd/backend.hpp"

#include <string>

#include "sumgd/error.hpp"
#include "sumgd/mock_backends.hpp"
#include "sumgd/text.hpp"

namespace sumgd {

GenerationContext Backend::make_context(std::optional<std::string> image,
                                        std::string prompt_text) const {
  GenerationContext ctx;
  ctx.image = std::move(image);
  ctx.prompt = tokenize(prompt_text);
  ctx.prompt_text = std::move(prompt_text);
  return ctx;
}

void Backend::validate_context(const GenerationContext& ctx,
                               const BackendCapabilities& caps) const {
  if (ctx.prompt.empty()) {
    throw Error(ErrorCode::kDataError, "generation context has no prompt");
  }
  if (ctx.length() > caps.max_context) {
    throw Error(ErrorCode::kContextOverflow,
                std::to_string(ctx.length()) + " tokens exceed max_context " +
                    std::to_string(caps.max_context));
  }
  if (ctx.image && !caps.supports_image) {
    throw Error(ErrorCode::kImageUnsupported,
                "backend is text-only but an image was supplied");
  }
}

WordVocab::WordVocab(const std::vector<std::string>& words) {
  words_.emplace_back(kEosWord);
  words_.emplace_back(kUnkWord);
  index_.emplace(std::string(kEosWord), kEos);
  index_.emplace(std::string(kUnkWord), kUnk);
  for (const auto& w : words) {
    if (w.empty() || index_.count(w) != 0) continue;
    index_.emplace(w, static_cast<TokenId>(words_.size()));
    words_.push_back(w);
  }
}

TokenId WordVocab::id(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& WordVocab::word(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
    return words_[kUnk];
  }
  return words_[static_cast<std::size_t>(id)];
}

bool WordVocab::contains(std::string_view word) const {
  return index_.count(std::string(word)) != 0;
}

std::vector<TokenId> WordVocab::tokenize(std::string_view text) const {
  std::vector<TokenId> out;
  for (const auto& w : split_words(text)) out.push_back(id(w));
  return out;
}

std::vector<std::string> WordVocab::words_of(
    std::span<const TokenId> tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (TokenId t : tokens) {
    if (t == kEos) continue;
    out.push_back(word(t));
  }
  return out;
}

std::string WordVocab::detokenize(std::span<const TokenId> tokens) const {
  const auto words = words_of(tokens);
  return join_words(words);
}

WordBackend::WordBackend(WordVocab vocab, std::size_t max_context,
                         bool supports_image, bool supports_attention)
    : vocab_(std::move(vocab)),
      max_context_(max_context),
      supports_image_(supports_image),
      supports_attention_(supports_attention) {}

BackendCapabilities WordBackend::capabilities() const {
  BackendCapabilities caps;
  caps.supports_attention = supports_attention_;
  caps.supports_image = supports_image_;
  caps.vocab_size = vocab_.size();
  caps.max_context = max_context_;
  caps.word_level_tokens = true;
  return caps;
}

std::vector<TokenId> WordBackend::tokenize(std::string_view text) const {
  return vocab_.tokenize(text);
}

std::string WordBackend::detokenize(std::span<const TokenId> tokens) const {
  return vocab_.detokenize(tokens);
}

TokenDistribution WordBackend::from_word_weights(
    const std::vector<std::pair<TokenId, double>>& weights,
    std::size_t top_k) const {
  std::vector<double> dense(vocab_.size(), 0.0);
  for (const auto& [id, w] : weights) dense[static_cast<std::size_t>(id)] += w;
  return TokenDistribution::from_weights(dense, top_k);
}

}  // namespace sumgd
