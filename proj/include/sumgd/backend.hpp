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

// The model-backend abstraction. A backend maps a generation context to a
// next-token distribution; it is the only place model inference happens.
// Implementations must be safe to query concurrently (queries are const).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sumgd/distribution.hpp"

namespace sumgd {

inline constexpr std::size_t kDefaultTopK = 50;

// Conditioning input of a query: optional image, instruction prompt, and the
// tokens generated so far. Omitting the image gives the text-only condition.
struct GenerationContext {
  // Opaque reference (path or payload id); only the sidecar interprets it.
  std::optional<std::string> image;
  // Instruction text as sent on the wire; `prompt` holds its tokens.
  std::string prompt_text;
  std::vector<TokenId> prompt;
  std::vector<TokenId> history;

  GenerationContext without_image() const {
    GenerationContext c = *this;
    c.image.reset();
    return c;
  }
  std::size_t length() const { return prompt.size() + history.size(); }

  bool operator==(const GenerationContext&) const = default;
};

struct BackendCapabilities {
  bool supports_attention = false;
  bool supports_image = true;
  std::size_t vocab_size = 0;
  std::size_t max_context = 0;
  // Every token is a whole word or punctuation mark (mock tokenizers).
  bool word_level_tokens = false;
};

// Share of attention the current position places on image vs text tokens.
struct Attention {
  double image_mass = 0.0;
  double text_mass = 0.0;
};

struct StepResult {
  TokenDistribution distribution;
  std::optional<Attention> attention;
  std::size_t calls_consumed = 1;
};

class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendCapabilities capabilities() const = 0;

  // Errors: ContextOverflow, ImageUnsupported, BackendUnavailable.
  virtual StepResult next_distribution(const GenerationContext& ctx,
                                       std::size_t top_k = kDefaultTopK) const = 0;

  virtual std::vector<TokenId> tokenize(std::string_view text) const = 0;
  virtual std::string detokenize(std::span<const TokenId> tokens) const = 0;
  virtual TokenId eos_token() const = 0;

  // Builds a context with the prompt tokenized by this backend.
  GenerationContext make_context(std::optional<std::string> image,
                                 std::string prompt_text) const;

 protected:
  // Shared precondition checks for next_distribution.
  void validate_context(const GenerationContext& ctx,
                        const BackendCapabilities& caps) const;
};

}  // namespace sumgd
