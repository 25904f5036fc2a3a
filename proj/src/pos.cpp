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

#include "sumgd/pos.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "sumgd/error.hpp"
#include "sumgd/text.hpp"

namespace sumgd {
namespace {

constexpr std::array<std::pair<PosTag, std::string_view>, kPosTagCount> kNames{{
    {PosTag::kNoun, "NOUN"},   {PosTag::kPropn, "PROPN"}, {PosTag::kAdj, "ADJ"},
    {PosTag::kNum, "NUM"},     {PosTag::kVerb, "VERB"},   {PosTag::kAux, "AUX"},
    {PosTag::kAdp, "ADP"},     {PosTag::kDet, "DET"},     {PosTag::kPart, "PART"},
    {PosTag::kPron, "PRON"},   {PosTag::kAdv, "ADV"},     {PosTag::kCconj, "CCONJ"},
    {PosTag::kSconj, "SCONJ"}, {PosTag::kIntj, "INTJ"},   {PosTag::kPunct, "PUNCT"},
    {PosTag::kSym, "SYM"},     {PosTag::kX, "X"},
}};

constexpr std::array<PosTag, kPosTagCount> kAllTags = [] {
  std::array<PosTag, kPosTagCount> out{};
  for (std::size_t i = 0; i < kPosTagCount; ++i) out[i] = kNames[i].first;
  return out;
}();

bool is_numeric(std::string_view w) {
  bool digit = false;
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '-' && c != '/') {
      return false;
    }
  }
  return digit;
}

bool is_symbol(std::string_view w) {
  return w.size() == 1 && std::string_view("$%&*+=<>@#~^|\\").find(w[0]) !=
                              std::string_view::npos;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::pair<std::string, std::string>> read_tsv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kConfigError,
                  path.string() + ": expected word<TAB>tag, got '" + line + "'");
    }
    rows.emplace_back(line.substr(0, tab), trim(line.substr(tab + 1)));
  }
  return rows;
}

PosTag require_tag(std::string_view name, const std::filesystem::path& path) {
  if (auto t = parse_pos_tag(name)) return *t;
  throw Error(ErrorCode::kConfigError,
              path.string() + ": unknown tag '" + std::string(name) + "'");
}

}  // namespace

std::string_view pos_tag_name(PosTag tag) {
  return kNames[static_cast<std::size_t>(tag)].second;
}

std::optional<PosTag> parse_pos_tag(std::string_view name) {
  for (const auto& [tag, n] : kNames) {
    if (n == name) return tag;
  }
  return std::nullopt;
}

std::span<const PosTag> all_pos_tags() { return kAllTags; }

LexiconTagger::LexiconTagger(
    std::unordered_map<std::string, PosTag> lexicon,
    std::vector<std::pair<std::string, PosTag>> suffix_rules,
    PosTag default_tag)
    : lexicon_(std::move(lexicon)),
      suffix_rules_(std::move(suffix_rules)),
      default_tag_(default_tag) {}

LexiconTagger LexiconTagger::load(const std::filesystem::path& lexicon_file,
                                  const std::filesystem::path& suffix_file) {
  std::unordered_map<std::string, PosTag> lexicon;
  for (const auto& [word, tag] : read_tsv(lexicon_file)) {
    lexicon.emplace(to_lower(word), require_tag(tag, lexicon_file));
  }
  std::vector<std::pair<std::string, PosTag>> rules;
  for (const auto& [suffix, tag] : read_tsv(suffix_file)) {
    rules.emplace_back(to_lower(suffix), require_tag(tag, suffix_file));
  }
  return LexiconTagger(std::move(lexicon), std::move(rules));
}

std::optional<PosTag> LexiconTagger::lookup(std::string_view word) const {
  const auto it = lexicon_.find(to_lower(word));
  if (it == lexicon_.end()) return std::nullopt;
  return it->second;
}

std::vector<PosTag> LexiconTagger::tag(std::span<const std::string> words) const {
  std::vector<PosTag> tags;
  tags.reserve(words.size());
  bool sentence_start = true;
  for (const auto& w : words) {
    PosTag t = default_tag_;
    if (is_punctuation_word(w)) {
      t = PosTag::kPunct;
    } else if (is_numeric(w)) {
      t = PosTag::kNum;
    } else if (is_symbol(w)) {
      t = PosTag::kSym;
    } else if (auto hit = lookup(w)) {
      t = *hit;
    } else if (!sentence_start &&
               std::isupper(static_cast<unsigned char>(w[0]))) {
      t = PosTag::kPropn;
    } else {
      const std::string lower = to_lower(w);
      for (const auto& [suffix, rule_tag] : suffix_rules_) {
        if (ends_with(lower, suffix)) {
          t = rule_tag;
          break;
        }
      }
    }
    tags.push_back(t);
    sentence_start = (w == "." || w == "!" || w == "?");
  }
  return tags;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("SUMGD_DATA_DIR")) return env;
  return SUMGD_DEFAULT_DATA_DIR;
}

const LexiconTagger& default_tagger() {
  static const LexiconTagger tagger =
      LexiconTagger::load(data_dir() / "lexicon.tsv", data_dir() / "suffixes.tsv");
  return tagger;
}

}  // namespace sumgd
