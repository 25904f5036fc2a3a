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

// Word-level text utilities shared by the mock tokenizer, the tagger and the
// sentence segmenter.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sumgd {

// Splits on whitespace and detaches punctuation into separate words.
// Decimal numbers ("3.5") and inner periods ("e.g") stay inside one word.
std::vector<std::string> split_words(std::string_view text);

// Inverse of split_words up to whitespace normalization: single spaces, none
// before closing punctuation.
std::string join_words(std::span<const std::string> words);

bool is_punctuation_word(std::string_view word);
bool is_closing_punctuation(std::string_view word);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// 64-bit FNV-1a. Stable across platforms; used for deterministic mocks and
// run identifiers.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace sumgd
