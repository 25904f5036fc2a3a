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

#include <cstddef>
#include <optional>

#include "sumgd/backend.hpp"
#include "sumgd/decode_config.hpp"
#include "sumgd/pos.hpp"
#include "sumgd/sentence.hpp"
#include "sumgd/summarizer.hpp"
#include "sumgd/trace.hpp"

namespace sumgd {

// What a decoder saw when it committed a token. Probing uses this to compare
// against the image-free distribution without re-running the decode.
struct StepObservation {
  std::size_t position = 0;
  TokenId token = 0;
  // Context whose distribution supplied the token (the SUMMARY or FULL
  // context for SumGD, the primary context for contrastive decoding).
  const GenerationContext* source_context = nullptr;
  const TokenDistribution* model_distribution = nullptr;
  // Distribution the strategy effectively selected from: the nucleus for
  // nucleus sampling, softmax of contrastive scores, otherwise the model's.
  const TokenDistribution* selection_distribution = nullptr;
  const TokenDistribution* contrast_distribution = nullptr;
  std::optional<Attention> attention;
};

class DecodeObserver {
 public:
  virtual ~DecodeObserver() = default;
  // A returned value is stored as the step's jsd_vs_llm. Backend calls made
  // by an observer are not part of the decode's cost.
  virtual std::optional<double> on_step(const StepObservation& obs) = 0;
};

DecodeOutput decode_greedy(const Backend& backend, const GenerationContext& ctx,
                           const DecodeConfig& cfg,
                           DecodeObserver* observer = nullptr);

DecodeOutput decode_nucleus(const Backend& backend, const GenerationContext& ctx,
                            const DecodeConfig& cfg,
                            DecodeObserver* observer = nullptr);

DecodeOutput decode_beam(const Backend& backend, const GenerationContext& ctx,
                         const DecodeConfig& cfg,
                         DecodeObserver* observer = nullptr);

// Errors: MissingContrastContext when the contrast context cannot be built.
DecodeOutput decode_contrastive(const Backend& backend,
                                const GenerationContext& ctx,
                                const DecodeConfig& cfg,
                                DecodeObserver* observer = nullptr);

// The context decode_contrastive contrasts against.
GenerationContext contrast_context(const Backend& backend,
                                   const GenerationContext& ctx,
                                   const ContrastSpec& spec);

// Contrast strength at 1-based step t.
double contrast_alpha(const ContrastSpec& spec, std::size_t t,
                      std::size_t max_new_tokens);

DecodeOutput decode_sumgd(const Backend& backend, const Summarizer& summarizer,
                          const Tagger& tagger, const GenerationContext& ctx,
                          const DecodeConfig& cfg,
                          DecodeObserver* observer = nullptr,
                          const SentenceSegmenter& segmenter = default_segmenter());

// Tokens already generated have their probability raised to `penalty`
// (log-probability scaled), then the distribution is renormalized.
// penalty == 1 returns the input unchanged.
TokenDistribution apply_repetition_penalty(const TokenDistribution& dist,
                                           std::span<const TokenId> generated,
                                           double penalty);

// Everything a SumGD decode needs besides the backend.
struct DecodeResources {
  const Summarizer* summarizer = nullptr;
  const Tagger* tagger = nullptr;
  const SentenceSegmenter* segmenter = nullptr;
};

// Dispatches on cfg.strategy.
DecodeOutput decode(const Backend& backend, const GenerationContext& ctx,
                    const DecodeConfig& cfg, const DecodeResources& resources = {},
                    DecodeObserver* observer = nullptr);

}  // namespace sumgd
