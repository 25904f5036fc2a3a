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
#include <span>
#include <vector>

#include "sumgd/backend.hpp"
#include "sumgd/pos.hpp"

namespace sumgd {

inline constexpr std::size_t kMaxLookaheadTokens = 5;

struct LookaheadResult {
  PosTag tag = PosTag::kX;
  std::size_t backend_calls = 0;
  // Greedy continuation used for tagging; never part of the output.
  std::vector<TokenId> continuation;
};

// Tags `candidate` in context by greedily generating one more whole word
// after it. `ctx` is the context the candidate was proposed from; its last
// `sentence_length` history tokens form the current partial sentence, which
// together with the candidate and the lookahead word is the tagging window.
//
// Uses between 1 and max_tokens backend calls, except for an EOS candidate,
// which is tagged X without any call.
LookaheadResult lookahead_pos(const Backend& backend, const Tagger& tagger,
                              const GenerationContext& ctx, TokenId candidate,
                              std::size_t sentence_length,
                              std::size_t max_tokens = kMaxLookaheadTokens,
                              std::size_t top_k = kDefaultTopK);

}  // namespace sumgd
