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

#include <algorithm>
#include <cmath>

#include "sumgd/error.hpp"
#include "sumgd/mock_backends.hpp"
#include "sumgd/text.hpp"

namespace sumgd {
namespace {

enum class Slot { kDet, kAdj, kNoun, kVerb, kAdp, kPeriod };

// DET ADJ NOUN VERB ADP DET NOUN .
constexpr Slot kTemplate[] = {Slot::kDet,  Slot::kAdj, Slot::kNoun,
                              Slot::kVerb, Slot::kAdp, Slot::kDet,
                              Slot::kNoun, Slot::kPeriod};
constexpr std::size_t kTemplateLength = std::size(kTemplate);

const std::vector<std::string> kNouns = {
    "dog",   "cat",    "person", "car",   "bicycle",  "chair",
    "table", "cup",    "bottle", "ball",  "frisbee",  "kite",
    "bench", "umbrella", "laptop", "book", "clock",   "vase",
    "bowl",  "pizza",  "sandwich", "horse", "sheep",  "boat"};
const std::vector<std::string> kAdjectives = {
    "red", "blue", "green", "small", "large", "wooden", "white", "black"};
const std::vector<std::string> kDeterminers = {"a", "the"};
const std::vector<std::string> kVerbs = {"sits", "stands", "rests",
                                         "lies", "waits", "appears"};
const std::vector<std::string> kPrepositions = {"on", "near", "beside",
                                                "under", "behind"};

std::vector<std::string> synthetic_vocab() {
  std::vector<std::string> words = {"."};
  for (const auto* group : {&kDeterminers, &kAdjectives, &kNouns, &kVerbs,
                            &kPrepositions}) {
    words.insert(words.end(), group->begin(), group->end());
  }
  return words;
}

bool in(const std::vector<std::string>& group, const std::string& w) {
  return std::find(group.begin(), group.end(), w) != group.end();
}

bool fits(Slot slot, const std::string& w) {
  switch (slot) {
    case Slot::kDet: return in(kDeterminers, w);
    case Slot::kAdj: return in(kAdjectives, w);
    case Slot::kNoun: return in(kNouns, w);
    case Slot::kVerb: return in(kVerbs, w);
    case Slot::kAdp: return in(kPrepositions, w);
    case Slot::kPeriod: return w == ".";
  }
  return false;
}

// Length of the longest history suffix that is a template prefix. Earlier
// text (a previous sentence or a summary of bare content words) can never
// extend such a match, because only the current sentence starts with DET.
std::size_t current_slot(const std::vector<std::string>& words) {
  for (std::size_t k = std::min(kTemplateLength - 1, words.size()); k > 0; --k) {
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      ok = fits(kTemplate[i], words[words.size() - k + i]);
    }
    if (ok) return k;
  }
  return 0;
}

}  // namespace

const std::vector<std::string>& SyntheticHallucinationBackend::slot_template() {
  static const std::vector<std::string> names = {"DET",  "ADJ", "NOUN", "VERB",
                                                 "ADP",  "DET", "NOUN", "."};
  return names;
}

SyntheticHallucinationBackend::SyntheticHallucinationBackend(Params params)
    : WordBackend(WordVocab(synthetic_vocab()), 8192, true, true),
      params_(params),
      nouns_(kNouns),
      adjectives_(kAdjectives),
      determiners_(kDeterminers),
      verbs_(kVerbs),
      prepositions_(kPrepositions) {
  if (params_.slope < 0.0 || params_.cap < 0.0 || params_.cap > 1.0) {
    throw Error(ErrorCode::kConfigError, "synthetic backend: bad slope/cap");
  }
  if (params_.objects_per_image == 0 ||
      params_.objects_per_image >= nouns_.size()) {
    throw Error(ErrorCode::kConfigError,
                "synthetic backend: objects_per_image out of range");
  }
}

double SyntheticHallucinationBackend::unit_hash(std::string_view a,
                                                std::string_view b) const {
  const std::uint64_t h = fnv1a64(b, fnv1a64(a, 0xcbf29ce484222325ULL ^ params_.seed));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double SyntheticHallucinationBackend::off_image_mass(
    std::size_t history_len) const {
  return std::min(params_.cap, params_.slope * static_cast<double>(history_len));
}

std::set<std::string> SyntheticHallucinationBackend::objects_for(
    std::string_view image) const {
  std::set<std::string> out;
  for (int k = 0; out.size() < params_.objects_per_image; ++k) {
    const double u = unit_hash(image, "object/" + std::to_string(k));
    out.insert(nouns_[static_cast<std::size_t>(u * static_cast<double>(nouns_.size()))]);
  }
  return out;
}

std::vector<std::pair<TokenId, double>>
SyntheticHallucinationBackend::noun_weights(const GenerationContext& ctx,
                                            std::string_view prefix_key) const {
  const std::size_t n = nouns_.size();
  const auto pick = [&](const std::vector<std::string>& group, double u) {
    return group[std::min(group.size() - 1,
                          static_cast<std::size_t>(u * static_cast<double>(group.size())))];
  };
  const std::string prior_lure = pick(nouns_, unit_hash(prefix_key, "lure"));
  std::vector<std::pair<TokenId, double>> w;

  if (!ctx.image) {
    const double lure_mass = 0.8 * params_.cap;
    for (const auto& noun : nouns_) {
      const double p = noun == prior_lure
                           ? lure_mass
                           : (1.0 - lure_mass) / static_cast<double>(n - 1);
      w.emplace_back(vocab_.id(noun), p);
    }
    return w;
  }

  const auto on_set = objects_for(*ctx.image);
  const std::vector<std::string> on(on_set.begin(), on_set.end());
  std::vector<std::string> off;
  for (const auto& noun : nouns_) {
    if (on_set.count(noun) == 0) off.push_back(noun);
  }
  // The image-conditioned lure is the prior's lure unless that object is
  // actually present, in which case the next absent noun takes its place.
  std::string lure = prior_lure;
  if (on_set.count(lure) != 0) {
    auto it = std::find(nouns_.begin(), nouns_.end(), lure);
    do {
      ++it;
      if (it == nouns_.end()) it = nouns_.begin();
    } while (on_set.count(*it) != 0);
    lure = *it;
  }
  const std::string image_key = *ctx.image + "|" + std::string(prefix_key);
  const std::string favorite = pick(on, unit_hash(image_key, "favorite"));
  const double u = 0.4 + 0.6 * unit_hash(image_key, "share");

  const double m = off_image_mass(ctx.history.size());
  for (const auto& noun : off) {
    const double p = noun == lure ? 0.8 * m
                                  : 0.2 * m / static_cast<double>(off.size() - 1);
    w.emplace_back(vocab_.id(noun), p);
  }
  for (const auto& noun : on) {
    const double p = noun == favorite
                         ? (1.0 - m) * u
                         : (1.0 - m) * (1.0 - u) / static_cast<double>(on.size() - 1);
    w.emplace_back(vocab_.id(noun), p);
  }
  return w;
}

std::vector<std::pair<TokenId, double>>
SyntheticHallucinationBackend::adjective_weights(
    const GenerationContext& ctx, std::string_view prefix_key) const {
  const double top = ctx.image ? 0.6 : 0.4;
  const std::string key =
      ctx.image ? *ctx.image + "|" + std::string(prefix_key) : std::string(prefix_key);
  const auto fav = static_cast<std::size_t>(unit_hash(key, "adjective") *
                                            static_cast<double>(adjectives_.size()));
  std::vector<std::pair<TokenId, double>> w;
  for (std::size_t i = 0; i < adjectives_.size(); ++i) {
    const double p = i == fav ? top
                              : (1.0 - top) / static_cast<double>(adjectives_.size() - 1);
    w.emplace_back(vocab_.id(adjectives_[i]), p);
  }
  return w;
}

std::vector<std::pair<TokenId, double>>
SyntheticHallucinationBackend::closed_class_weights(
    const std::vector<std::string>& words, std::string_view prefix_key,
    std::string_view salt) const {
  const auto fav = static_cast<std::size_t>(unit_hash(prefix_key, salt) *
                                            static_cast<double>(words.size()));
  std::vector<std::pair<TokenId, double>> w;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double p =
        i == fav ? 0.55 : 0.45 / static_cast<double>(words.size() - 1);
    w.emplace_back(vocab_.id(words[i]), p);
  }
  return w;
}

StepResult SyntheticHallucinationBackend::next_distribution(
    const GenerationContext& ctx, std::size_t top_k) const {
  validate_context(ctx, capabilities());
  const auto words = vocab_.words_of(ctx.history);
  const std::size_t slot = current_slot(words);
  std::string prefix_key;
  for (std::size_t i = words.size() - slot; i < words.size(); ++i) {
    prefix_key += words[i];
    prefix_key.push_back(' ');
  }

  std::vector<std::pair<TokenId, double>> weights;
  switch (kTemplate[slot]) {
    case Slot::kDet: {
      std::size_t sentences = 0;
      for (const auto& w : words) sentences += (w == ".") ? 1 : 0;
      if (slot == 0 && params_.max_sentences > 0 &&
          sentences >= params_.max_sentences) {
        weights.emplace_back(WordVocab::kEos, 1.0);
      } else {
        weights = closed_class_weights(determiners_, prefix_key, "det");
      }
      break;
    }
    case Slot::kAdj: weights = adjective_weights(ctx, prefix_key); break;
    case Slot::kNoun: weights = noun_weights(ctx, prefix_key); break;
    case Slot::kVerb: weights = closed_class_weights(verbs_, prefix_key, "verb"); break;
    case Slot::kAdp: weights = closed_class_weights(prepositions_, prefix_key, "adp"); break;
    case Slot::kPeriod: weights.emplace_back(vocab_.id("."), 1.0); break;
  }

  StepResult result;
  result.distribution = from_word_weights(weights, top_k);
  if (ctx.image) {
    const double image_mass =
        0.05 + 0.55 * std::exp(-static_cast<double>(ctx.history.size()) / 96.0);
    result.attention = Attention{image_mass, 1.0 - image_mass};
  }
  return result;
}

}  // namespace sumgd
