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

#include "sumgd/metrics.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "sumgd/error.hpp"
#include "sumgd/text.hpp"

namespace sumgd {
namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Lowercased word with surrounding punctuation and a possessive 's removed.
std::string normalize_word(std::string_view w) {
  std::size_t b = 0;
  std::size_t e = w.size();
  while (b < e && !is_alnum(w[b])) ++b;
  while (e > b && !is_alnum(w[e - 1])) --e;
  std::string out = to_lower(w.substr(b, e - b));
  if (out.size() > 2 && out.ends_with("'s")) out.resize(out.size() - 2);
  return out;
}

std::vector<std::string> whitespace_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) out.push_back(std::move(w));
  return out;
}

std::string regular_plural(const std::string& word) {
  auto ends = [&](std::string_view s) { return word.ends_with(s); };
  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh")) return word + "es";
  if (word.size() > 1 && ends("y") &&
      std::string_view("aeiou").find(word[word.size() - 2]) == std::string_view::npos) {
    return word.substr(0, word.size() - 1) + "ies";
  }
  return word + "s";
}

std::size_t word_count(const std::string& phrase) {
  return whitespace_words(phrase).size();
}

double ratio_of(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ObjectVocabulary ObjectVocabulary::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kDataError, "vocabulary must be an object");
  ObjectVocabulary v;
  try {
    for (const auto& [category, forms] : j.items()) {
      const std::string cat = to_lower(category);
      v.categories_.insert(cat);
      std::vector<std::string> all = forms.get<std::vector<std::string>>();
      all.push_back(cat);
      for (const auto& form : all) {
        std::string f;
        for (const auto& w : whitespace_words(form)) f += (f.empty() ? "" : " ") + normalize_word(w);
        if (f.empty()) continue;
        const auto [it, inserted] = v.synonyms_.emplace(f, cat);
        if (!inserted && it->second != cat) {
          throw Error(ErrorCode::kDataError, "synonym '" + f + "' belongs to both '" +
                                                 it->second + "' and '" + cat + "'");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDataError, std::string("vocabulary: ") + e.what());
  }
  // Plurals only fill gaps; explicit forms always win.
  std::map<std::string, std::string, std::less<>> plurals;
  std::set<std::string> contested;
  for (const auto& [form, cat] : v.synonyms_) {
    const auto space = form.rfind(' ');
    const std::string head = space == std::string::npos ? "" : form.substr(0, space + 1);
    const std::string last = space == std::string::npos ? form : form.substr(space + 1);
    const std::string plural = head + regular_plural(last);
    if (v.synonyms_.count(plural) != 0) continue;
    const auto [it, inserted] = plurals.emplace(plural, cat);
    if (!inserted && it->second != cat) contested.insert(plural);
  }
  for (const auto& p : contested) plurals.erase(p);
  v.synonyms_.merge(plurals);
  for (const auto& [form, cat] : v.synonyms_) {
    v.longest_phrase_ = std::max(v.longest_phrase_, word_count(form));
  }
  return v;
}

ObjectVocabulary ObjectVocabulary::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kDataError, "cannot open " + file.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kDataError, file.string() + ": " + e.what());
  }
}

std::optional<std::string> ObjectVocabulary::canonical(std::string_view surface) const {
  std::string key;
  for (const auto& w : whitespace_words(surface)) key += (key.empty() ? "" : " ") + normalize_word(w);
  const auto it = synonyms_.find(key);
  if (it == synonyms_.end()) return std::nullopt;
  return it->second;
}

std::vector<ObjectMention> find_mentions(std::string_view caption,
                                         const ObjectVocabulary& vocab) {
  const auto raw = whitespace_words(caption);
  std::vector<std::string> words;
  words.reserve(raw.size());
  for (const auto& w : raw) words.push_back(normalize_word(w));

  std::vector<ObjectMention> out;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(vocab.longest_phrase(), words.size() - i); len > 0; --len) {
      std::string phrase = words[i];
      for (std::size_t k = 1; k < len; ++k) phrase += " " + words[i + k];
      if (phrase.empty()) continue;
      if (auto cat = vocab.canonical(phrase)) {
        out.push_back({*cat, i + 1});
        matched = len;
        break;
      }
    }
    i += matched == 0 ? 1 : matched;
  }
  return out;
}

std::vector<ObjectMention> extract_objects(std::string_view caption,
                                           const ObjectVocabulary& vocab) {
  std::vector<ObjectMention> out;
  std::set<std::string> seen;
  for (auto& m : find_mentions(caption, vocab)) {
    if (seen.insert(m.object).second) out.push_back(std::move(m));
  }
  return out;
}

Annotations annotations_from_json(const nlohmann::json& j,
                                  const ObjectVocabulary& vocab) {
  if (!j.is_object()) throw Error(ErrorCode::kDataError, "annotations must be an object");
  Annotations out;
  try {
    for (const auto& [image, objects] : j.items()) {
      auto& set = out[image];
      for (const auto& name : objects.get<std::vector<std::string>>()) {
        const std::string lower = to_lower(name);
        if (vocab.categories().count(lower) == 0) {
          throw Error(ErrorCode::kDataError,
                      "annotation for '" + image + "' names unknown object '" + name + "'");
        }
        set.insert(lower);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDataError, std::string("annotations: ") + e.what());
  }
  return out;
}

Annotations load_annotations(const std::filesystem::path& file,
                             const ObjectVocabulary& vocab) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kDataError, "cannot open " + file.string());
  try {
    return annotations_from_json(nlohmann::json::parse(in), vocab);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kDataError, file.string() + ": " + e.what());
  }
}

std::vector<CaptionRecord> load_captions(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl);
  if (!in) throw Error(ErrorCode::kDataError, "cannot open " + jsonl.string());
  std::vector<CaptionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CaptionRecord r;
      r.image_id = j.at("image_id").get<std::string>();
      r.caption = j.at("caption").get<std::string>();
      if (j.contains("trace_path") && !j["trace_path"].is_null()) {
        r.trace_path = j["trace_path"].get<std::string>();
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kDataError, jsonl.string() + ":" + std::to_string(line_no) +
                                             ": " + e.what());
    }
  }
  return out;
}

nlohmann::json to_json(const CaptionRecord& record) {
  nlohmann::json j = {{"image_id", record.image_id}, {"caption", record.caption}};
  if (record.trace_path) j["trace_path"] = *record.trace_path;
  return j;
}

namespace {

const std::set<std::string>& truth_for(const Annotations& annotations,
                                       const std::string& image_id) {
  const auto it = annotations.find(image_id);
  if (it == annotations.end()) {
    throw Error(ErrorCode::kMissingAnnotation, "no annotation for image '" + image_id + "'");
  }
  return it->second;
}

}  // namespace

ChairResult chair_metrics(std::span<const CaptionRecord> captions,
                          const Annotations& annotations,
                          const ObjectVocabulary& vocab) {
  ChairResult r;
  auto& c = r.counts;
  for (const auto& rec : captions) {
    const auto& truth = truth_for(annotations, rec.image_id);
    const auto objects = extract_objects(rec.caption, vocab);
    bool hallucinated = false;
    for (const auto& m : objects) {
      ++c.mentions;
      if (truth.count(m.object) != 0) {
        ++c.correct_objects;
      } else {
        ++c.hallucinated_mentions;
        hallucinated = true;
      }
    }
    ++c.captions;
    c.hallucinated_captions += hallucinated ? 1 : 0;
    c.ground_truth_objects += truth.size();
  }
  r.chair_s = ratio_of(c.hallucinated_captions, c.captions);
  r.chair_i = ratio_of(c.hallucinated_mentions, c.mentions);
  r.recall = ratio_of(c.correct_objects, c.ground_truth_objects);
  return r;
}

double NgramCounts::ratio() const {
  return total == 0 ? 1.0 : static_cast<double>(unique) / static_cast<double>(total);
}

NgramCounts ngram_counts(std::string_view text, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidN, "n-gram order must be >= 1");
  const auto words = whitespace_words(text);
  NgramCounts c;
  if (words.size() < n) return c;
  std::set<std::vector<std::string>> seen;
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    seen.emplace(words.begin() + static_cast<std::ptrdiff_t>(i),
                 words.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++c.total;
  }
  c.unique = seen.size();
  return c;
}

double ngram_fluency(std::string_view text, std::size_t n) {
  return ngram_counts(text, n).ratio();
}

double BucketRatio::ratio() const { return ratio_of(hallucinated, mentions); }

std::vector<BucketRatio> hallucination_by_position(
    std::span<const CaptionRecord> captions, const Annotations& annotations,
    const ObjectVocabulary& vocab, std::size_t width) {
  if (width == 0) throw Error(ErrorCode::kConfigError, "bucket width must be >= 1");
  std::map<std::size_t, BucketRatio> buckets;
  for (const auto& rec : captions) {
    const auto& truth = truth_for(annotations, rec.image_id);
    for (const auto& m : find_mentions(rec.caption, vocab)) {
      const std::size_t b = (m.position - 1) / width;
      auto& slot = buckets[b];
      slot.bucket = b;
      ++slot.mentions;
      slot.hallucinated += truth.count(m.object) == 0 ? 1 : 0;
    }
  }
  std::vector<BucketRatio> out;
  for (const auto& [b, slot] : buckets) out.push_back(slot);
  return out;
}

double SentenceCounts::spi() const { return ratio_of(sentences, captions); }

SentenceCounts sentence_counts(std::span<const std::string> captions,
                               const SentenceSegmenter& segmenter) {
  SentenceCounts c;
  for (const auto& text : captions) {
    c.sentences += segmenter.split(text).size();
    ++c.captions;
  }
  return c;
}

double sentences_per_image(std::span<const std::string> captions,
                           const SentenceSegmenter& segmenter) {
  return sentence_counts(captions, segmenter).spi();
}

double CostSummary::calls_per_token() const {
  return ratio_of(backend_calls, generated_tokens);
}

MetricsReport evaluate_corpus(std::span<const CaptionRecord> captions,
                              const Annotations& annotations,
                              const ObjectVocabulary& vocab,
                              const SentenceSegmenter& segmenter,
                              const EvaluateOptions& options) {
  if (captions.empty()) throw Error(ErrorCode::kEmptyCorpus, "no captions to evaluate");
  MetricsReport report;
  report.chair = chair_metrics(captions, annotations, vocab);
  std::vector<std::string> texts;
  for (const auto& c : captions) texts.push_back(c.caption);
  report.sentences = sentence_counts(texts, segmenter);
  for (std::size_t n : options.ngram_orders) {
    FluencySummary f;
    double sum = 0.0;
    for (const auto& t : texts) {
      const auto c = ngram_counts(t, n);
      sum += c.ratio();
      f.unique += c.unique;
      f.total += c.total;
    }
    f.mean_ratio = sum / static_cast<double>(texts.size());
    report.ngram_fluency[n] = f;
  }
  report.bucket_width = options.bucket_width;
  report.per_position =
      hallucination_by_position(captions, annotations, vocab, options.bucket_width);
  return report;
}

nlohmann::json to_json(const MetricsReport& r) {
  const auto& c = r.chair.counts;
  nlohmann::json j = {
      {"schema_version", kReportSchemaVersion},
      {"method", r.method},
      {"max_new_tokens", r.max_new_tokens},
      {"chair_s", 100.0 * r.chair.chair_s},
      {"chair_i", 100.0 * r.chair.chair_i},
      {"recall", 100.0 * r.chair.recall},
      {"counts",
       {{"captions", c.captions},
        {"hallucinated_captions", c.hallucinated_captions},
        {"mentions", c.mentions},
        {"hallucinated_mentions", c.hallucinated_mentions},
        {"ground_truth_objects", c.ground_truth_objects},
        {"correct_objects", c.correct_objects}}},
      {"spi", r.sentences.spi()},
      {"spi_counts", {{"sentences", r.sentences.sentences}, {"captions", r.sentences.captions}}},
  };
  nlohmann::json fluency = nlohmann::json::object();
  for (const auto& [n, f] : r.ngram_fluency) {
    fluency[std::to_string(n)] = {
        {"ratio", 100.0 * f.mean_ratio}, {"unique", f.unique}, {"total", f.total}};
  }
  j["ngram_fluency"] = fluency;
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : r.per_position) {
    buckets.push_back({{"bucket", b.bucket},
                       {"first_position", b.bucket * r.bucket_width + 1},
                       {"last_position", (b.bucket + 1) * r.bucket_width},
                       {"ratio", b.ratio()},
                       {"hallucinated", b.hallucinated},
                       {"mentions", b.mentions}});
  }
  j["per_position_hallucination"] = {{"bucket_width", r.bucket_width}, {"buckets", buckets}};
  if (r.cost) {
    j["cost"] = {{"generated_tokens", r.cost->generated_tokens},
                 {"backend_calls", r.cost->backend_calls},
                 {"generation_calls", r.cost->generation_calls},
                 {"lookahead_calls", r.cost->lookahead_calls},
                 {"summarization_calls", r.cost->summarization_calls},
                 {"calls_per_token", r.cost->calls_per_token()}};
  } else {
    j["cost"] = nullptr;
  }
  j["notes"] = r.notes;
  // Filled by external judges (sentence-level hallucination, text quality).
  j["judge_scores"] = {{"shr", nullptr}, {"text_quality", nullptr}};
  return j;
}

MetricsReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorCode::kDataError, "unsupported report schema_version");
    }
    MetricsReport r;
    r.method = j.at("method").get<std::string>();
    r.max_new_tokens = j.at("max_new_tokens").get<std::size_t>();
    const auto& c = j.at("counts");
    auto& k = r.chair.counts;
    k.captions = c.at("captions").get<std::size_t>();
    k.hallucinated_captions = c.at("hallucinated_captions").get<std::size_t>();
    k.mentions = c.at("mentions").get<std::size_t>();
    k.hallucinated_mentions = c.at("hallucinated_mentions").get<std::size_t>();
    k.ground_truth_objects = c.at("ground_truth_objects").get<std::size_t>();
    k.correct_objects = c.at("correct_objects").get<std::size_t>();
    // Ratios are recomputed from the counts rather than trusted.
    r.chair.chair_s = ratio_of(k.hallucinated_captions, k.captions);
    r.chair.chair_i = ratio_of(k.hallucinated_mentions, k.mentions);
    r.chair.recall = ratio_of(k.correct_objects, k.ground_truth_objects);
    r.sentences.sentences = j.at("spi_counts").at("sentences").get<std::size_t>();
    r.sentences.captions = j.at("spi_counts").at("captions").get<std::size_t>();
    for (const auto& [n, f] : j.at("ngram_fluency").items()) {
      FluencySummary s;
      s.mean_ratio = f.at("ratio").get<double>() / 100.0;
      s.unique = f.at("unique").get<std::size_t>();
      s.total = f.at("total").get<std::size_t>();
      r.ngram_fluency[std::stoul(n)] = s;
    }
    const auto& pp = j.at("per_position_hallucination");
    r.bucket_width = pp.at("bucket_width").get<std::size_t>();
    for (const auto& b : pp.at("buckets")) {
      r.per_position.push_back({b.at("bucket").get<std::size_t>(),
                                b.at("hallucinated").get<std::size_t>(),
                                b.at("mentions").get<std::size_t>()});
    }
    if (j.contains("cost") && !j["cost"].is_null()) {
      const auto& cj = j["cost"];
      CostSummary cost;
      cost.generated_tokens = cj.at("generated_tokens").get<std::size_t>();
      cost.backend_calls = cj.at("backend_calls").get<std::size_t>();
      cost.generation_calls = cj.at("generation_calls").get<std::size_t>();
      cost.lookahead_calls = cj.at("lookahead_calls").get<std::size_t>();
      cost.summarization_calls = cj.at("summarization_calls").get<std::size_t>();
      r.cost = cost;
    }
    if (j.contains("notes")) r.notes = j["notes"].get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDataError, std::string("report: ") + e.what());
  }
}

}  // namespace sumgd
