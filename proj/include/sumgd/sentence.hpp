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

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sumgd {

// Rule-based sentence segmenter. A sentence ends at '.', '!' or '?' (a run
// such as "?!" counts once) followed by whitespace or end of text, unless the
// period closes a listed abbreviation.
class SentenceSegmenter {
 public:
  // Abbreviations are matched case-insensitively including their final '.'.
  explicit SentenceSegmenter(std::set<std::string> abbreviations);

  // One abbreviation per line; '#' starts a comment line.
  static SentenceSegmenter load(const std::filesystem::path& file);

  // Byte offset just past the most recent completed sentence, if any.
  std::optional<std::size_t> sentence_boundary(std::string_view text) const;

  // Offsets just past every completed sentence, ascending.
  std::vector<std::size_t> boundaries(std::string_view text) const;

  // Trimmed sentences; trailing text without a terminator counts as a
  // sentence when non-blank.
  std::vector<std::string> split(std::string_view text) const;

  const std::set<std::string>& abbreviations() const { return abbreviations_; }

 private:
  bool closes_abbreviation(std::string_view text, std::size_t dot) const;

  std::set<std::string> abbreviations_;
};

// Segmenter loaded from data_dir()/abbreviations.txt.
const SentenceSegmenter& default_segmenter();

}  // namespace sumgd
