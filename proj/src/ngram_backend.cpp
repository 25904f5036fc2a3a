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

#include <fstream>

#include "sumgd/error.hpp"
#include "sumgd/mock_backends.hpp"

namespace sumgd {
namespace {

std::vector<std::string> ngram_vocab(
    const NgramBackend::Table& table,
    const std::map<std::string, double>& image_unigram) {
  std::vector<std::string> words;
  for (const auto& [ctx, next] : table) {
    for (const auto& [w, p] : next) {
      if (w != WordVocab::kEosWord) words.push_back(w);
    }
  }
  for (const auto& [w, p] : image_unigram) {
    if (w != WordVocab::kEosWord) words.push_back(w);
  }
  return words;
}

}  // namespace

NgramBackend::NgramBackend(std::size_t order, Table ngrams,
                           std::map<std::string, double> image_unigram,
                           double image_weight)
    : WordBackend(WordVocab(ngram_vocab(ngrams, image_unigram))),
      order_(order),
      ngrams_(std::move(ngrams)),
      image_unigram_(std::move(image_unigram)),
      image_weight_(image_weight) {
  if (order_ == 0) throw Error(ErrorCode::kConfigError, "n-gram order must be >= 1");
  if (image_weight_ < 0.0 || image_weight_ > 1.0) {
    throw Error(ErrorCode::kConfigError, "image weight must lie in [0, 1]");
  }
}

NgramBackend NgramBackend::from_json(const nlohmann::json& spec) {
  try {
    Table table = spec.at("ngrams").get<Table>();
    std::map<std::string, double> image_unigram;
    double weight = 0.0;
    if (spec.contains("image")) {
      image_unigram = spec["image"].at("unigram").get<std::map<std::string, double>>();
      weight = spec["image"].at("weight").get<double>();
    }
    return NgramBackend(spec.value("order", std::size_t{2}), std::move(table),
                        std::move(image_unigram), weight);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("n-gram spec: ") + e.what());
  }
}

NgramBackend NgramBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
}

StepResult NgramBackend::next_distribution(const GenerationContext& ctx,
                                           std::size_t top_k) const {
  validate_context(ctx, capabilities());
  const auto words = vocab_.words_of(ctx.history);

  // Longest available context first, backing off to the unigram row "".
  const std::map<std::string, double>* row = nullptr;
  const std::size_t longest = std::min(order_ - 1, words.size());
  for (std::size_t n = longest + 1; n-- > 0 && row == nullptr;) {
    std::string key;
    for (std::size_t i = words.size() - n; i < words.size(); ++i) {
      if (!key.empty()) key.push_back(' ');
      key += words[i];
    }
    if (const auto it = ngrams_.find(key); it != ngrams_.end()) row = &it->second;
  }

  std::vector<double> text(vocab_.size(), 0.0);
  if (row == nullptr) {
    text[WordVocab::kEos] = 1.0;
  } else {
    double total = 0.0;
    for (const auto& [w, p] : *row) total += p;
    for (const auto& [w, p] : *row) text[static_cast<std::size_t>(vocab_.id(w))] += p / total;
  }

  if (ctx.image && image_weight_ > 0.0 && !image_unigram_.empty()) {
    double total = 0.0;
    for (const auto& [w, p] : image_unigram_) total += p;
    for (auto& v : text) v *= 1.0 - image_weight_;
    for (const auto& [w, p] : image_unigram_) {
      text[static_cast<std::size_t>(vocab_.id(w))] += image_weight_ * p / total;
    }
  }
  StepResult result;
  result.distribution = TokenDistribution::from_weights(text, top_k);
  return result;
}

}  // namespace sumgd
