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

#include "sumgd/summarizer.hpp"

#include "sumgd/text.hpp"

namespace sumgd {
namespace {

std::string replace_once(std::string_view tmpl, std::string_view placeholder,
                         std::string_view value) {
  std::string out(tmpl);
  const auto at = out.find(placeholder);
  if (at != std::string::npos) out.replace(at, placeholder.size(), value);
  return out;
}

}  // namespace

SummaryResult IdentitySummarizer::summarize(std::string_view text) const {
  if (text.empty()) throw EmptySummaryError("nothing to summarize", 0);
  return {std::string(text), 0};
}

SummaryResult ExtractiveSummarizer::summarize(std::string_view text) const {
  const auto sentences = segmenter_.split(text);
  if (sentences.empty()) {
    throw EmptySummaryError("nothing to summarize", 0);
  }
  std::string out = sentences.front();
  for (std::size_t s = 1; s < sentences.size(); ++s) {
    const auto words = split_words(sentences[s]);
    const auto tags = tagger_.tag(words);
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!is_image_related(tags[i])) continue;
      out.push_back(' ');
      out += words[i];
    }
  }
  return {std::move(out), 0};
}

std::string assemble_summary_prompt(SummaryVariant variant,
                                    std::string_view caption) {
  return variant == SummaryVariant::kSelf
             ? replace_once(kSelfSummaryTemplate, "<<caption>>", caption)
             : replace_once(kDistilledSummaryTemplate, "<<Caption>>", caption);
}

SummaryResult PromptSummarizer::summarize(std::string_view text) const {
  if (text.empty()) throw EmptySummaryError("nothing to summarize", 0);
  GenerationContext ctx =
      backend_.make_context(std::nullopt, assemble_summary_prompt(variant_, text));
  SummaryResult result;
  for (std::size_t i = 0; i < max_tokens_; ++i) {
    const StepResult r = backend_.next_distribution(ctx);
    result.backend_calls += r.calls_consumed;
    const TokenId next = argmax_token(r.distribution);
    if (next == backend_.eos_token()) break;
    ctx.history.push_back(next);
  }
  result.text = trim(backend_.detokenize(ctx.history));
  if (result.text.empty()) {
    throw EmptySummaryError(std::string(id()) + " summary is empty",
                            result.backend_calls);
  }
  return result;
}

}  // namespace sumgd
