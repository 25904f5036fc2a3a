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

#include "sumgd/decoders.hpp"
#include "sumgd/mock_backends.hpp"
#include "sumgd/text.hpp"
#include "support/random_backends.hpp"

using namespace sumgd;

namespace {

DecodeConfig sumgd_config(std::size_t max_new = 40) {
  DecodeConfig cfg;
  cfg.strategy = Strategy::kSumgd;
  cfg.max_new_tokens = max_new;
  cfg.sumgd = SumgdSpec{};
  return cfg;
}

DecodeConfig greedy_config(std::size_t max_new = 40) {
  DecodeConfig cfg;
  cfg.max_new_tokens = max_new;
  return cfg;
}

// Two sentences, then a third whose continuation differs between the FULL
// history (which mentions "near") and the extractive summary (which keeps
// only "a dog sits. dog ball").
const char* kRouting = R"({
  "rules": [
    {"pattern": {"suffix": ["ball", "ball"]}, "distribution": {"</s>": 1.0}},
    {"pattern": {"max_history": 0}, "distribution": {"a": 1.0}},
    {"pattern": {"suffix": ["a"], "max_history": 1}, "distribution": {"dog": 1.0}},
    {"pattern": {"suffix": ["dog"], "max_history": 2}, "distribution": {"sits": 1.0}},
    {"pattern": "sits", "distribution": {".": 1.0}},
    {"pattern": {"suffix": ["."], "max_history": 4}, "distribution": {"the": 1.0}},
    {"pattern": "the", "distribution": {"dog": 1.0}},
    {"pattern": "dog", "distribution": {"is": 1.0}},
    {"pattern": "is", "distribution": {"near": 1.0}},
    {"pattern": "near", "distribution": {"a": 1.0}},
    {"pattern": {"suffix": ["a"], "contains": ["near"], "min_history": 10},
     "distribution": {"tie": 1.0}},
    {"pattern": {"suffix": ["a"], "min_history": 5}, "distribution": {"ball": 1.0}},
    {"pattern": {"suffix": ["ball"], "max_history": 6}, "distribution": {"is": 1.0}},
    {"pattern": {"suffix": ["ball"], "max_history": 10}, "distribution": {".": 1.0}},
    {"pattern": {"suffix": ["."], "max_history": 11}, "distribution": {"a": 1.0}},
    {"pattern": "ball", "distribution": {".": 1.0}},
    {"pattern": "tie", "distribution": {".": 1.0}}
  ],
  "default": {"</s>": 1.0}
})";

}  // namespace

TEST_CASE("routing picks the summary token for nouns and the full token otherwise") {
  const auto backend = ScriptedBackend::from_json(nlohmann::json::parse(kRouting));
  const auto ctx = backend.make_context("img", "Describe the image.");
  ExtractiveSummarizer summarizer(default_tagger(), default_segmenter());

  const auto greedy = decode_greedy(backend, ctx, greedy_config());
  CHECK(greedy.text == "a dog sits. the dog is near a ball. a tie.");

  const auto out = decode_sumgd(backend, summarizer, default_tagger(), ctx, sumgd_config());
  CHECK(out.text == "a dog sits. the dog is near a ball. a ball.");
  const auto& steps = out.trace.steps;
  REQUIRE(steps.size() == 15);

  // The summary context proposes "is" (AUX); the FULL context's "a" is kept.
  CHECK(steps[11].word == "a");
  CHECK(steps[11].pos_tag == PosTag::kAux);
  CHECK(steps[11].source == StepSource::kFull);
  // The summary context proposes "ball" (NOUN) while FULL would say "tie".
  CHECK(steps[12].word == "ball");
  CHECK(steps[12].pos_tag == PosTag::kNoun);
  CHECK(steps[12].source == StepSource::kSummary);

  REQUIRE(out.trace.summaries.size() == 3);
  CHECK(out.trace.summaries[0].summary_text == "a dog sits.");
  CHECK(out.trace.summaries[1].summary_text == "a dog sits. dog ball");
  CHECK(out.trace.summaries[2].revision == 3);
  CHECK(out.trace.summaries[1].source_char_len == std::string("a dog sits. the dog is near a ball.").size());
}

TEST_CASE("full-first routing mirrors the decision") {
  const auto backend = ScriptedBackend::from_json(nlohmann::json::parse(kRouting));
  const auto ctx = backend.make_context("img", "Describe the image.");
  ExtractiveSummarizer summarizer(default_tagger(), default_segmenter());
  auto cfg = sumgd_config();
  cfg.sumgd->routing = Routing::kFullFirst;
  const auto out = decode_sumgd(backend, summarizer, default_tagger(), ctx, cfg);
  // FULL proposes "tie" (NOUN), so the SUMMARY token "ball" is emitted.
  CHECK(out.text == "a dog sits. the dog is near a ball. a ball.");
  for (const auto& s : out.trace.steps) {
    CHECK((s.source == StepSource::kSummary) == is_image_related(*s.pos_tag));
  }
}

TEST_CASE("all-POS scope always uses the summary context") {
  const auto backend = ScriptedBackend::from_json(nlohmann::json::parse(kRouting));
  const auto ctx = backend.make_context("img", "Describe the image.");
  ExtractiveSummarizer summarizer(default_tagger(), default_segmenter());
  auto cfg = sumgd_config();
  cfg.sumgd->pos_scope = PosScope::kAll;
  const auto out = decode_sumgd(backend, summarizer, default_tagger(), ctx, cfg);
  CHECK(out.text == "a dog sits. the dog is near a ball. is near a ball.");
  for (const auto& s : out.trace.steps) {
    CHECK(s.source == StepSource::kSummary);
    CHECK(s.lookahead_calls == 0);
  }
}

TEST_CASE("identity summarizer reproduces greedy on random backends") {
  IdentitySummarizer identity;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto backend = testing::random_scripted_backend(seed);
    const auto ctx = backend.make_context("img", "Describe.");
    const auto g = decode_greedy(backend, ctx, greedy_config(60));
    const auto s = decode_sumgd(backend, identity, default_tagger(), ctx, sumgd_config(60));
    CHECK(s.text == g.text);
  }
}

TEST_CASE("trace accounting and summary bookkeeping") {
  ExtractiveSummarizer summarizer(default_tagger(), default_segmenter());
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto backend = testing::random_scripted_backend(seed);
    const auto ctx = backend.make_context("img", "Describe.");
    for (auto scope : {SummaryScope::kFull, SummaryScope::kIncremental}) {
      auto cfg = sumgd_config(80);
      cfg.sumgd->summary_scope = scope;
      const auto out = decode_sumgd(backend, summarizer, default_tagger(), ctx, cfg);
      std::size_t total = 0;
      std::size_t sentences = 0;
      for (const auto& s : out.trace.steps) {
        CHECK(s.backend_calls == s.generation_calls + s.lookahead_calls + s.summarization_calls);
        CHECK(s.lookahead_calls <= cfg.sumgd->max_lookahead_tokens);
        total += s.backend_calls;
        sentences += s.word == "." ? 1 : 0;
        CHECK((s.source == StepSource::kSummary) == is_image_related(*s.pos_tag));
      }
      CHECK(out.trace.total_backend_calls == total);
      CHECK(out.trace.total_backend_calls == out.trace.generation_calls +
                                                 out.trace.lookahead_calls +
                                                 out.trace.summarization_calls);
      CHECK(out.trace.summaries.size() == sentences);
      for (std::size_t i = 0; i < out.trace.summaries.size(); ++i) {
        const auto& st = out.trace.summaries[i];
        CHECK(st.revision == i + 1);
        CHECK(st.summary_char_len <= st.source_char_len);
      }
    }
  }
}

TEST_CASE("self-summarization calls are charged to the boundary step") {
  const auto backend = ScriptedBackend::from_json(nlohmann::json::parse(R"({
    "rules": [
      {"pattern": {"prompt_contains": "Summarize", "max_history": 0},
       "distribution": {"dog": 1.0}},
      {"pattern": {"prompt_contains": "Summarize"}, "distribution": {"</s>": 1.0}},
      {"pattern": {"max_history": 0}, "distribution": {"a": 1.0}},
      {"pattern": "a", "distribution": {"dog": 1.0}},
      {"pattern": "dog", "distribution": {".": 1.0}}
    ],
    "default": {"</s>": 1.0}
  })"));
  const auto ctx = backend.make_context("img", "Describe.");
  PromptSummarizer self(backend, SummaryVariant::kSelf);
  auto cfg = sumgd_config();
  cfg.sumgd->summarizer = "self";
  const auto out = decode_sumgd(backend, self, default_tagger(), ctx, cfg);
  CHECK(out.text == "a dog.");
  REQUIRE(out.trace.steps.size() == 4);
  CHECK(out.trace.steps[2].summarization_calls == 2);
  CHECK(out.trace.summarization_calls == 2);
  CHECK(out.trace.summaries.at(0).summary_text == "dog");
}
