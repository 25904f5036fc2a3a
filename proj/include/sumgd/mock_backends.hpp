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

// Deterministic in-process backends over small word vocabularies. They are
// pure functions of the GenerationContext and are immutable after
// construction, so they can be shared across threads.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumgd/backend.hpp"

namespace sumgd {

// Fixed word vocabulary. Id 0 is the end-of-sequence marker "</s>", id 1 is
// "<unk>"; words not in the vocabulary tokenize to <unk>.
class WordVocab {
 public:
  static constexpr TokenId kEos = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr std::string_view kEosWord = "</s>";
  static constexpr std::string_view kUnkWord = "<unk>";

  explicit WordVocab(const std::vector<std::string>& words);

  TokenId id(std::string_view word) const;
  const std::string& word(TokenId id) const;
  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

  std::vector<TokenId> tokenize(std::string_view text) const;
  std::string detokenize(std::span<const TokenId> tokens) const;
  std::vector<std::string> words_of(std::span<const TokenId> tokens) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
};

// Common plumbing for the word-level mocks.
class WordBackend : public Backend {
 public:
  explicit WordBackend(WordVocab vocab, std::size_t max_context = 4096,
                       bool supports_image = true,
                       bool supports_attention = false);

  BackendCapabilities capabilities() const override;
  std::vector<TokenId> tokenize(std::string_view text) const override;
  std::string detokenize(std::span<const TokenId> tokens) const override;
  TokenId eos_token() const override { return WordVocab::kEos; }

  const WordVocab& vocab() const { return vocab_; }

 protected:
  // Distribution from word weights; unknown words are a construction error.
  TokenDistribution from_word_weights(
      const std::vector<std::pair<TokenId, double>>& weights,
      std::size_t top_k) const;

  WordVocab vocab_;
  std::size_t max_context_;
  bool supports_image_;
  bool supports_attention_;
};

// Explicit rule table: the first rule whose pattern matches the context
// supplies the distribution.
//
// JSON schema:
//   { "vocab": [words...]?,  "max_context": n?, "supports_image": bool?,
//     "rules": [ { "pattern": "w1 w2" | { "suffix": [...], "contains": [...],
//                  "image": bool, "min_history": n, "max_history": n,
//                  "prompt_contains": "..." },
//                  "distribution": { word: prob, ... },
//                  "attention": [image_mass, text_mass]? } ],
//     "default": { word: prob, ... }? }
// A string pattern is a suffix of the generated history. "</s>" names EOS.
class ScriptedBackend : public WordBackend {
 public:
  struct Pattern {
    std::vector<std::string> suffix;
    std::vector<std::string> contains;
    std::optional<bool> image;
    std::optional<std::size_t> min_history;
    std::optional<std::size_t> max_history;
    std::string prompt_contains;
  };
  struct Rule {
    Pattern pattern;
    std::vector<std::pair<std::string, double>> distribution;
    std::optional<Attention> attention;
  };

  ScriptedBackend(std::vector<Rule> rules,
                  std::vector<std::pair<std::string, double>> fallback,
                  std::vector<std::string> extra_vocab = {},
                  std::size_t max_context = 4096, bool supports_image = true);

  static ScriptedBackend from_json(const nlohmann::json& spec);
  static ScriptedBackend from_file(const std::filesystem::path& path);

  StepResult next_distribution(const GenerationContext& ctx,
                               std::size_t top_k = kDefaultTopK) const override;
  BackendCapabilities capabilities() const override;

  const std::vector<Rule>& rules() const { return rules_; }

 private:
  bool matches(const Pattern& p, const GenerationContext& ctx,
               const std::vector<std::string>& history_words) const;

  std::vector<Rule> rules_;
  std::vector<std::pair<std::string, double>> fallback_;
  bool any_attention_ = false;
};

// Backoff n-gram model over a toy vocabulary. With an image present, the
// text distribution is mixed with an image-conditioned unigram.
//
// JSON schema:
//   { "order": n, "ngrams": { "ctx words": { word: weight } , "": {...} },
//     "image": { "weight": lambda, "unigram": { word: weight } }? }
class NgramBackend : public WordBackend {
 public:
  using Table = std::map<std::string, std::map<std::string, double>>;

  NgramBackend(std::size_t order, Table ngrams,
               std::map<std::string, double> image_unigram = {},
               double image_weight = 0.0);

  static NgramBackend from_json(const nlohmann::json& spec);
  static NgramBackend from_file(const std::filesystem::path& path);

  StepResult next_distribution(const GenerationContext& ctx,
                               std::size_t top_k = kDefaultTopK) const override;

 private:
  std::size_t order_;
  Table ngrams_;
  std::map<std::string, double> image_unigram_;
  double image_weight_;
};

// Toy captioner whose off-image-noun probability grows with the length of the
// conditioning text: at a noun slot with L history tokens, the mass on nouns
// absent from the image is min(cap, slope * L). Each sentence follows the
// template "DET ADJ NOUN VERB ADP DET NOUN ." so slot types depend only on the
// current sentence, never on earlier history.
//
// Without an image the backend answers with its language prior, which puts
// the capped lure mass on a context-chosen noun and spreads the rest evenly.
class SyntheticHallucinationBackend : public WordBackend {
 public:
  struct Params {
    double slope = 0.005;
    double cap = 0.9;
    std::size_t objects_per_image = 4;
    std::uint64_t seed = 0;
    // Stop after this many sentences (0 = never emit EOS).
    std::size_t max_sentences = 0;
  };

  SyntheticHallucinationBackend() : SyntheticHallucinationBackend(Params{}) {}
  explicit SyntheticHallucinationBackend(Params params);

  StepResult next_distribution(const GenerationContext& ctx,
                               std::size_t top_k = kDefaultTopK) const override;

  // Ground-truth objects for an image handle (canonical noun names).
  std::set<std::string> objects_for(std::string_view image) const;
  // Mass the image-conditioned distribution puts on off-image nouns at a noun
  // slot with `history_len` conditioning tokens.
  double off_image_mass(std::size_t history_len) const;

  const std::vector<std::string>& nouns() const { return nouns_; }
  const Params& params() const { return params_; }

  static const std::vector<std::string>& slot_template();

 private:
  std::vector<std::pair<TokenId, double>> noun_weights(
      const GenerationContext& ctx, std::string_view prefix_key) const;
  std::vector<std::pair<TokenId, double>> adjective_weights(
      const GenerationContext& ctx, std::string_view prefix_key) const;
  std::vector<std::pair<TokenId, double>> closed_class_weights(
      const std::vector<std::string>& words, std::string_view prefix_key,
      std::string_view salt) const;
  double unit_hash(std::string_view a, std::string_view b) const;

  Params params_;
  std::vector<std::string> nouns_;
  std::vector<std::string> adjectives_;
  std::vector<std::string> determiners_;
  std::vector<std::string> verbs_;
  std::vector<std::string> prepositions_;
};

}  // namespace sumgd
