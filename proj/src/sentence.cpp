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

#include "sumgd/sentence.hpp"

#include <cctype>
#include <fstream>

#include "sumgd/error.hpp"
#include "sumgd/pos.hpp"
#include "sumgd/text.hpp"

namespace sumgd {
namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

SentenceSegmenter::SentenceSegmenter(std::set<std::string> abbreviations) {
  for (const auto& a : abbreviations) abbreviations_.insert(to_lower(a));
}

SentenceSegmenter SentenceSegmenter::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open " + file.string());
  std::set<std::string> abbreviations;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    abbreviations.insert(line);
  }
  return SentenceSegmenter(std::move(abbreviations));
}

bool SentenceSegmenter::closes_abbreviation(std::string_view text,
                                            std::size_t dot) const {
  std::size_t begin = dot;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  // Opening punctuation such as '(' is not part of the abbreviation.
  while (begin < dot && (text[begin] == '(' || text[begin] == '"')) ++begin;
  const std::string word = to_lower(text.substr(begin, dot - begin + 1));
  return abbreviations_.count(word) != 0;
}

std::vector<std::size_t> SentenceSegmenter::boundaries(
    std::string_view text) const {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && is_terminator(text[end])) ++end;
    const bool at_break = end == text.size() || is_space(text[end]);
    const bool single_period = end == i + 1 && text[i] == '.';
    if (at_break && !(single_period && closes_abbreviation(text, i))) {
      out.push_back(end);
    }
    i = end;
  }
  return out;
}

std::optional<std::size_t> SentenceSegmenter::sentence_boundary(
    std::string_view text) const {
  const auto all = boundaries(text);
  if (all.empty()) return std::nullopt;
  return all.back();
}

std::vector<std::string> SentenceSegmenter::split(std::string_view text) const {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t end : boundaries(text)) {
    std::string s = trim(text.substr(start, end - start));
    if (!s.empty()) out.push_back(std::move(s));
    start = end;
  }
  std::string tail = trim(text.substr(start));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

const SentenceSegmenter& default_segmenter() {
  static const SentenceSegmenter segmenter =
      SentenceSegmenter::load(data_dir() / "abbreviations.txt");
  return segmenter;
}

}  // namespace sumgd
