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

// Summarizers produce the shortened conditioning text that summary-guided
// decoding substitutes for the full generation history.

#include <cstddef>
#include <string>
#include <string_view>

#include "sumgd/backend.hpp"
#include "sumgd/error.hpp"
#include "sumgd/pos.hpp"
#include "sumgd/sentence.hpp"

namespace sumgd {

struct SummaryState {
  std::string summary_text;
  std::size_t source_char_len = 0;
  std::size_t summary_char_len = 0;
  // Number of summarize calls so far (one per completed sentence).
  std::size_t revision = 0;
};

struct SummaryResult {
  std::string text;
  std::size_t backend_calls = 0;
};

// EmptySummary, carrying the backend calls spent before the summary came out
// empty so cost accounting stays exact.
class EmptySummaryError : public Error {
 public:
  EmptySummaryError(const std::string& message, std::size_t backend_calls)
      : Error(ErrorCode::kEmptySummary, message), backend_calls_(backend_calls) {}
  std::size_t backend_calls() const { return backend_calls_; }

 private:
  std::size_t backend_calls_;
};

class Summarizer {
 public:
  virtual ~Summarizer() = default;
  // Throws EmptySummary when the implementation produced nothing; callers
  // keep their previous summary in that case.
  virtual SummaryResult summarize(std::string_view text) const = 0;
  virtual std::string_view id() const = 0;
};

// Returns its input verbatim. Test oracle: makes both decoding contexts equal.
class IdentitySummarizer : public Summarizer {
 public:
  SummaryResult summarize(std::string_view text) const override;
  std::string_view id() const override { return "identity"; }
};

// Keeps the first sentence and, from every later sentence, only the words
// with an image-related tag, joined by single spaces.
class ExtractiveSummarizer : public Summarizer {
 public:
  ExtractiveSummarizer(const Tagger& tagger, const SentenceSegmenter& segmenter)
      : tagger_(tagger), segmenter_(segmenter) {}

  SummaryResult summarize(std::string_view text) const override;
  std::string_view id() const override { return "extractive"; }

 private:
  const Tagger& tagger_;
  const SentenceSegmenter& segmenter_;
};

enum class SummaryVariant {
  kSelf,       // the generation model summarizes its own output
  kDistilled,  // a separate, smaller summarization model
};

inline constexpr std::string_view kSelfSummaryTemplate =
    "USER: Summarize the following caption in briefly.\nCaption: <<caption>> "
    "ASSISTANT:";
inline constexpr std::string_view kDistilledSummaryTemplate =
    "<<Caption>> \nWhat is a summary of this text?";

// Substitutes the caption into the variant's template.
std::string assemble_summary_prompt(SummaryVariant variant,
                                    std::string_view caption);

// Summarizes by greedy decoding on a backend, text-only, from the variant's
// prompt template. For kSelf the backend is the generation model itself.
class PromptSummarizer : public Summarizer {
 public:
  PromptSummarizer(const Backend& backend, SummaryVariant variant,
                   std::size_t max_tokens = 64)
      : backend_(backend), variant_(variant), max_tokens_(max_tokens) {}

  SummaryResult summarize(std::string_view text) const override;
  std::string_view id() const override {
    return variant_ == SummaryVariant::kSelf ? "self" : "distilled";
  }

 private:
  const Backend& backend_;
  SummaryVariant variant_;
  std::size_t max_tokens_;
};

}  // namespace sumgd
