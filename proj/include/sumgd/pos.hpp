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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sumgd {

// Universal POS tag set.
enum class PosTag {
  kNoun, kPropn, kAdj, kNum, kVerb, kAux, kAdp, kDet, kPart,
  kPron, kAdv, kCconj, kSconj, kIntj, kPunct, kSym, kX,
};

inline constexpr std::size_t kPosTagCount = 17;

std::string_view pos_tag_name(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view name);
std::span<const PosTag> all_pos_tags();

// PROPN, ADJ, NOUN and NUM: tokens whose choice needs visual grounding.
constexpr bool is_image_related(PosTag tag) {
  return tag == PosTag::kPropn || tag == PosTag::kAdj ||
         tag == PosTag::kNoun || tag == PosTag::kNum;
}

// Pluggable tagger. Implementations must be deterministic, total and
// reentrant.
class Tagger {
 public:
  virtual ~Tagger() = default;
  // One tag per word.
  virtual std::vector<PosTag> tag(std::span<const std::string> words) const = 0;
};

// Lexicon + suffix-rule tagger.
//
// Precedence per word: punctuation and numeric shape, then lexicon lookup
// (lowercased), then capitalization inside a sentence (PROPN), then the first
// matching suffix rule, then the default tag.
class LexiconTagger : public Tagger {
 public:
  LexiconTagger(std::unordered_map<std::string, PosTag> lexicon,
                std::vector<std::pair<std::string, PosTag>> suffix_rules,
                PosTag default_tag = PosTag::kNoun);

  // Files are UTF-8 lines `word<TAB>TAG` / `suffix<TAB>TAG`; '#' starts a
  // comment line.
  static LexiconTagger load(const std::filesystem::path& lexicon_file,
                            const std::filesystem::path& suffix_file);

  std::vector<PosTag> tag(std::span<const std::string> words) const override;

  std::optional<PosTag> lookup(std::string_view word) const;
  std::size_t lexicon_size() const { return lexicon_.size(); }

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
  std::vector<std::pair<std::string, PosTag>> suffix_rules_;
  PosTag default_tag_;
};

// Directory holding lexicon.tsv, suffixes.tsv, abbreviations.txt and
// coco_vocab.json: $SUMGD_DATA_DIR if set, else the source tree's data/.
std::filesystem::path data_dir();

// Shared tagger loaded from data_dir(); loaded once, immutable.
const LexiconTagger& default_tagger();

}  // namespace sumgd
