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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sumgd/error.hpp"
#include "sumgd/metrics.hpp"

using namespace sumgd;

namespace {

const std::filesystem::path kChair = std::filesystem::path(SUMGD_FIXTURE_DIR) / "chair";

ObjectVocabulary coco() { return ObjectVocabulary::load(std::filesystem::path(SUMGD_DATA_DIR) / "coco_vocab.json"); }

nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

double rational(const nlohmann::json& pair) {
  return pair[0].get<double>() / pair[1].get<double>();
}

}  // namespace

TEST_CASE("object extraction") {
  const auto vocab = coco();
  const auto objs = extract_objects("A dog catches a frisbee near a car.", vocab);
  CHECK(objs == std::vector<ObjectMention>{{"dog", 2}, {"frisbee", 5}, {"car", 8}});
  CHECK(extract_objects("", vocab).empty());
  CHECK(extract_objects("dogs", vocab) == std::vector<ObjectMention>{{"dog", 1}});
  // Longest match: "hot dog" is food, not a dog.
  CHECK(extract_objects("A Hot Dog on a dining table", vocab) ==
        std::vector<ObjectMention>{{"hot dog", 2}, {"dining table", 6}});
  CHECK(find_mentions("a dog and a dog", vocab).size() == 2);
  CHECK(extract_objects("a dog and a dog", vocab).size() == 1);
  CHECK(vocab.canonical("Men") == "person");
  CHECK(vocab.categories().size() == 80);
}

TEST_CASE("vocabulary conflicts and plurals") {
  CHECK_THROWS_AS(ObjectVocabulary::from_json(nlohmann::json::parse(
                      R"({"a": ["bat"], "b": ["bat"]})")),
                  Error);
  // "glasses" could be the plural of either entry, so neither gets it.
  const auto v = ObjectVocabulary::from_json(
      nlohmann::json::parse(R"({"cup": ["glass"], "eyewear": ["glasse"]})"));
  CHECK_FALSE(v.canonical("glasses"));
  CHECK(v.canonical("glass") == "cup");
  const auto w = ObjectVocabulary::from_json(nlohmann::json::parse(R"({"pony": ["pony"]})"));
  CHECK(w.canonical("ponies") == "pony");
}

TEST_CASE("single caption CHAIR example") {
  const auto vocab = coco();
  const Annotations ann = {{"i", {"dog", "frisbee", "person"}}};
  const std::vector<CaptionRecord> caps = {{"i", "A dog catches a frisbee near a car.", {}}};
  const auto r = chair_metrics(caps, ann, vocab);
  CHECK(r.chair_i == 1.0 / 3.0);
  CHECK(r.chair_s == 1.0);
  CHECK(r.recall == 2.0 / 3.0);

  const std::vector<CaptionRecord> clean = {{"i", "Nothing to see here.", {}}};
  const auto z = chair_metrics(clean, ann, vocab);
  CHECK(z.counts.mentions == 0);
  CHECK(z.chair_s == 0.0);
  CHECK(z.chair_i == 0.0);

  const std::vector<CaptionRecord> unknown = {{"other", "a dog", {}}};
  try {
    chair_metrics(unknown, ann, vocab);
    FAIL("expected MissingAnnotation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingAnnotation);
  }
}

TEST_CASE("CHAIR fixture reproduces the recorded rationals") {
  const auto vocab = ObjectVocabulary::load(kChair / "vocab.json");
  const auto ann = load_annotations(kChair / "annotations.json", vocab);
  const auto caps = load_captions(kChair / "captions.jsonl");
  const auto expected = read_json(kChair / "expected.json");
  const auto report = evaluate_corpus(caps, ann, vocab, default_segmenter());
  const auto& c = report.chair.counts;
  const auto& e = expected["counts"];
  CHECK(c.captions == e["captions"]);
  CHECK(c.hallucinated_captions == e["hallucinated_captions"]);
  CHECK(c.mentions == e["mentions"]);
  CHECK(c.hallucinated_mentions == e["hallucinated_mentions"]);
  CHECK(c.ground_truth_objects == e["ground_truth_objects"]);
  CHECK(c.correct_objects == e["correct_objects"]);
  CHECK(report.chair.chair_s == rational(expected["chair_s"]));
  CHECK(report.chair.chair_i == rational(expected["chair_i"]));
  CHECK(report.chair.recall == rational(expected["recall"]));
  CHECK(report.sentences.spi() == rational(expected["spi"]));
}

TEST_CASE("annotations must name vocabulary objects") {
  const auto vocab = coco();
  CHECK_THROWS_AS(annotations_from_json(nlohmann::json::parse(R"({"i": ["unicorn"]})"), vocab),
                  Error);
}

TEST_CASE("n-gram fluency examples") {
  CHECK(ngram_fluency("the cat sat on the mat", 1) == 5.0 / 6.0);
  CHECK(ngram_fluency("the cat sat on the mat", 2) == 1.0);
  CHECK(ngram_fluency("a a a a", 1) == 0.25);
  CHECK(ngram_fluency("one two", 3) == 1.0);
  CHECK(ngram_fluency("", 1) == 1.0);
  try {
    ngram_fluency("text", 0);
    FAIL("expected InvalidN");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidN);
  }
}

TEST_CASE("sentences per image") {
  const std::vector<std::string> two = {"A. B. C.", "D."};
  CHECK(sentences_per_image(two, default_segmenter()) == 2.0);
  const std::vector<std::string> empty = {""};
  CHECK(sentences_per_image(empty, default_segmenter()) == 0.0);
}

TEST_CASE("hallucination by position") {
  const auto vocab = coco();
  const Annotations ann = {{"i", {"dog"}}};
  std::string text = "a dog";
  for (int i = 0; i < 40; ++i) text += " x";
  text += " a cat and a dog";
  const std::vector<CaptionRecord> caps = {{"i", text, {}}};
  const auto buckets = hallucination_by_position(caps, ann, vocab, 32);
  REQUIRE(buckets.size() == 2);
  CHECK(buckets[0].bucket == 0);
  CHECK(buckets[0].ratio() == 0.0);
  CHECK(buckets[1].bucket == 1);
  CHECK(buckets[1].mentions == 2);
  CHECK(buckets[1].ratio() == 0.5);

  const std::vector<CaptionRecord> correct = {{"i", "a dog and a dog", {}}};
  for (const auto& b : hallucination_by_position(correct, ann, vocab)) CHECK(b.ratio() == 0.0);
}

TEST_CASE("report JSON keeps raw counts and round trips") {
  const auto vocab = ObjectVocabulary::load(kChair / "vocab.json");
  const auto ann = load_annotations(kChair / "annotations.json", vocab);
  const auto caps = load_captions(kChair / "captions.jsonl");
  auto report = evaluate_corpus(caps, ann, vocab, default_segmenter());
  report.method = "greedy";
  report.cost = CostSummary{10, 20, 20, 0, 0};
  const auto j = to_json(report);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["chair_s"].get<double>() == doctest::Approx(40.0));
  CHECK(j["cost"]["calls_per_token"] == 2.0);
  CHECK(to_json(report_from_json(j)) == j);
  CHECK_THROWS_AS(evaluate_corpus({}, ann, vocab, default_segmenter()), Error);
}
