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

#include "sumgd/lookahead.hpp"

#include <algorithm>
#include <cctype>

#include "sumgd/text.hpp"

namespace sumgd {

LookaheadResult lookahead_pos(const Backend& backend, const Tagger& tagger,
                              const GenerationContext& ctx, TokenId candidate,
                              std::size_t sentence_length,
                              std::size_t max_tokens, std::size_t top_k) {
  LookaheadResult result;
  if (candidate == backend.eos_token()) return result;

  const std::size_t keep = std::min(sentence_length, ctx.history.size());
  std::vector<TokenId> window(ctx.history.end() - static_cast<std::ptrdiff_t>(keep),
                              ctx.history.end());
  window.push_back(candidate);
  const std::size_t candidate_words = split_words(backend.detokenize(window)).size();
  if (candidate_words == 0) return result;

  const bool word_level = backend.capabilities().word_level_tokens;
  GenerationContext extended = ctx;
  extended.history.push_back(candidate);
  std::vector<std::string> words;

  for (std::size_t step = 0; step < std::max<std::size_t>(max_tokens, 1); ++step) {
    const StepResult r = backend.next_distribution(extended, top_k);
    result.backend_calls += r.calls_consumed;
    const TokenId next = argmax_token(r.distribution);
    if (next == backend.eos_token()) break;
    extended.history.push_back(next);
    window.push_back(next);
    result.continuation.push_back(next);

    const std::string text = backend.detokenize(window);
    words = split_words(text);
    if (words.size() > candidate_words + 1) {
      // A further word has started, so the lookahead word is complete.
      words.resize(candidate_words + 1);
      break;
    }
    if (words.size() > candidate_words &&
        (word_level || is_punctuation_word(words.back()) ||
         (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))))) {
      break;
    }
  }
  if (words.empty()) words = split_words(backend.detokenize(window));
  const auto tags = tagger.tag(words);
  result.tag = tags[std::min(candidate_words, tags.size()) - 1];
  return result;
}

}  // namespace sumgd
