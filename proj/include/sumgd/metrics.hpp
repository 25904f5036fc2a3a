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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumgd/sentence.hpp"

namespace sumgd {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::size_t kDefaultBucketWidth = 32;

// Object categories and their surface forms. Matching is case-insensitive;
// regular plurals of every synonym are added unless they would collide with
// a form already claimed by another category.
class ObjectVocabulary {
 public:
  // {category: [synonyms...]}; the category name is always a synonym of
  // itself. A synonym listed under two categories is a DataError.
  static ObjectVocabulary from_json(const nlohmann::json& j);
  static ObjectVocabulary load(const std::filesystem::path& file);

  const std::set<std::string>& categories() const { return categories_; }
  std::optional<std::string> canonical(std::string_view surface) const;
  std::size_t longest_phrase() const { return longest_phrase_; }

 private:
  std::set<std::string> categories_;
  std::map<std::string, std::string, std::less<>> synonyms_;
  std::size_t longest_phrase_ = 1;
};

struct ObjectMention {
  std::string object;
  // 1-based index of the whitespace-delimited word where the mention starts.
  std::size_t position = 0;

  bool operator==(const ObjectMention&) const = default;
};

// Every mention, in caption order.
std::vector<ObjectMention> find_mentions(std::string_view caption,
                                         const ObjectVocabulary& vocab);
// First mention of each object, in caption order.
std::vector<ObjectMention> extract_objects(std::string_view caption,
                                           const ObjectVocabulary& vocab);

// image id -> ground-truth categories
using Annotations = std::map<std::string, std::set<std::string>>;

// {image_id: [object names]}; names outside the vocabulary are a DataError.
Annotations annotations_from_json(const nlohmann::json& j,
                                  const ObjectVocabulary& vocab);
Annotations load_annotations(const std::filesystem::path& file,
                             const ObjectVocabulary& vocab);

struct CaptionRecord {
  std::string image_id;
  std::string caption;
  std::optional<std::string> trace_path;
};

std::vector<CaptionRecord> load_captions(const std::filesystem::path& jsonl);
nlohmann::json to_json(const CaptionRecord& record);

struct ChairCounts {
  std::size_t captions = 0;
  std::size_t hallucinated_captions = 0;
  std::size_t mentions = 0;
  std::size_t hallucinated_mentions = 0;
  std::size_t ground_truth_objects = 0;
  std::size_t correct_objects = 0;
};

// Ratios in [0, 1]; reports scale them by 100.
struct ChairResult {
  double chair_s = 0.0;
  double chair_i = 0.0;
  double recall = 0.0;
  ChairCounts counts;
};

// Corpus-level: numerators and denominators are summed over captions before
// dividing. Captions without mentions add nothing to CHAIR_I and count as
// clean for CHAIR_S. Errors: MissingAnnotation.
ChairResult chair_metrics(std::span<const CaptionRecord> captions,
                          const Annotations& annotations,
                          const ObjectVocabulary& vocab);

struct NgramCounts {
  std::size_t unique = 0;
  std::size_t total = 0;
  // 1.0 when the text has fewer than n words.
  double ratio() const;
};

// Errors: InvalidN when n == 0.
NgramCounts ngram_counts(std::string_view text, std::size_t n);
double ngram_fluency(std::string_view text, std::size_t n);

struct BucketRatio {
  std::size_t bucket = 0;
  std::size_t hallucinated = 0;
  std::size_t mentions = 0;
  double ratio() const;
};

// All mentions count (repeats included). Word position p falls in bucket
// (p - 1) / width; buckets without mentions are omitted.
std::vector<BucketRatio> hallucination_by_position(
    std::span<const CaptionRecord> captions, const Annotations& annotations,
    const ObjectVocabulary& vocab, std::size_t width = kDefaultBucketWidth);

struct SentenceCounts {
  std::size_t sentences = 0;
  std::size_t captions = 0;
  double spi() const;
};

SentenceCounts sentence_counts(std::span<const std::string> captions,
                               const SentenceSegmenter& segmenter);
double sentences_per_image(std::span<const std::string> captions,
                           const SentenceSegmenter& segmenter);

struct FluencySummary {
  // Mean of per-caption ratios.
  double mean_ratio = 1.0;
  std::size_t unique = 0;
  std::size_t total = 0;
};

struct CostSummary {
  std::size_t generated_tokens = 0;
  std::size_t backend_calls = 0;
  std::size_t generation_calls = 0;
  std::size_t lookahead_calls = 0;
  std::size_t summarization_calls = 0;
  double calls_per_token() const;
};

struct MetricsReport {
  std::string method;
  std::size_t max_new_tokens = 0;
  ChairResult chair;
  SentenceCounts sentences;
  std::map<std::size_t, FluencySummary> ngram_fluency;
  std::vector<BucketRatio> per_position;
  std::size_t bucket_width = kDefaultBucketWidth;
  std::optional<CostSummary> cost;
  // Free-form notes, e.g. approximations used by the decoding method.
  std::vector<std::string> notes;
};

struct EvaluateOptions {
  std::vector<std::size_t> ngram_orders = {1, 2};
  std::size_t bucket_width = kDefaultBucketWidth;
};

// Errors: EmptyCorpus, MissingAnnotation.
MetricsReport evaluate_corpus(std::span<const CaptionRecord> captions,
                              const Annotations& annotations,
                              const ObjectVocabulary& vocab,
                              const SentenceSegmenter& segmenter,
                              const EvaluateOptions& options = {});

nlohmann::json to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

}  // namespace sumgd
