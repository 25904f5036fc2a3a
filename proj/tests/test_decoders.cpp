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

#include <cmath>
#include <functional>
#include <set>

#include "sumgd/decoders.hpp"
#include "sumgd/error.hpp"
#include "sumgd/mock_backends.hpp"
#include "support/random_backends.hpp"

using namespace sumgd;

namespace {

ScriptedBackend scripted(const char* json) {
  return ScriptedBackend::from_json(nlohmann::json::parse(json));
}

DecodeConfig config(Strategy s, std::size_t max_new = 32) {
  DecodeConfig cfg;
  cfg.strategy = s;
  cfg.max_new_tokens = max_new;
  return cfg;
}

const char* kChain = R"({
  "rules": [
    {"pattern": {"max_history": 0}, "distribution": {"a": 0.7, "the": 0.3}},
    {"pattern": "a", "distribution": {"cat": 0.8, "dog": 0.2}},
    {"pattern": "cat", "distribution": {"sits": 1.0}},
    {"pattern": "sits", "distribution": {".": 0.9, "on": 0.1}}
  ],
  "default": {"</s>": 1.0}
})";

// Records every observation's token and selection support.
struct Recorder : DecodeObserver {
  std::vector<TokenId> tokens;
  bool all_in_support = true;
  std::optional<double> on_step(const StepObservation& obs) override {
    tokens.push_back(obs.token);
    all_in_support = all_in_support && obs.selection_distribution->contains(obs.token);
    return std::nullopt;
  }
};

}  // namespace

TEST_CASE("greedy follows the scripted chain") {
  const auto backend = scripted(kChain);
  const auto ctx = backend.make_context("img", "Describe the image.");
  const auto out = decode_greedy(backend, ctx, config(Strategy::kGreedy));
  CHECK(out.text == "a cat sits.");
  REQUIRE(out.trace.steps.size() == 5);
  CHECK(out.trace.steps.back().eos);
  CHECK(out.trace.steps.back().word.empty());
  CHECK(out.trace.total_backend_calls == 5);
  CHECK(out.trace.generated_tokens() == 4);
  for (std::size_t i = 0; i < out.trace.steps.size(); ++i) {
    CHECK(out.trace.steps[i].position == i);
  }

  const auto none = decode_greedy(backend, ctx, config(Strategy::kGreedy, 0));
  CHECK(none.text.empty());
  CHECK(none.trace.steps.empty());

  const auto again = decode_greedy(backend, ctx, config(Strategy::kGreedy));
  CHECK(again.text == out.text);
  CHECK(again.trace.steps == out.trace.steps);
}

TEST_CASE("nucleus sampling") {
  const auto backend = scripted(kChain);
  const auto ctx = backend.make_context("img", "Describe the image.");
  auto cfg = config(Strategy::kNucleus);
  cfg.top_p = 1e-9;
  CHECK(decode_nucleus(backend, ctx, cfg).text ==
        decode_greedy(backend, ctx, config(Strategy::kGreedy)).text);

  cfg.top_p = 1.0;
  cfg.seed = 42;
  const auto a = decode_nucleus(backend, ctx, cfg);
  const auto b = decode_nucleus(backend, ctx, cfg);
  CHECK(a.text == b.text);
  CHECK(a.trace.steps == b.trace.steps);

  cfg.top_p = 0.0;
  CHECK_THROWS_AS(decode_nucleus(backend, ctx, cfg), Error);
}

TEST_CASE("nucleus samples stay inside the nucleus") {
  std::size_t steps = 0;
  for (std::uint64_t seed = 0; steps < 1000; ++seed) {
    const auto backend = testing::random_scripted_backend(seed);
    const auto ctx = backend.make_context("img", "Describe.");
    auto cfg = config(Strategy::kNucleus, 60);
    cfg.top_p = 0.5 + 0.05 * static_cast<double>(seed % 10);
    cfg.seed = seed;
    Recorder rec;
    decode_nucleus(backend, ctx, cfg, &rec);
    CHECK(rec.all_in_support);
    steps += rec.tokens.size();
  }
}

TEST_CASE("beam search") {
  const auto backend = scripted(R"({
    "rules": [
      {"pattern": {"max_history": 0}, "distribution": {"x": 0.6, "y": 0.4}},
      {"pattern": "x", "distribution": {"a": 0.5, "b": 0.5}},
      {"pattern": "y", "distribution": {"c": 0.9, "d": 0.1}},
      {"pattern": "a", "distribution": {"e": 0.5, "f": 0.5}},
      {"pattern": "b", "distribution": {"e": 0.5, "f": 0.5}},
      {"pattern": "c", "distribution": {"g": 0.9, "h": 0.1}},
      {"pattern": "d", "distribution": {"g": 1.0}}
    ],
    "default": {"</s>": 1.0}
  })");
  const auto ctx = backend.make_context("img", "Describe.");

  // Exhaustive enumeration of every length-3 continuation.
  double best_logp = -INFINITY;
  std::string best;
  std::function<void(GenerationContext, double)> walk = [&](GenerationContext c,
                                                            double logp) {
    if (c.history.size() == 3) {
      if (logp > best_logp) {
        best_logp = logp;
        best = backend.detokenize(c.history);
      }
      return;
    }
    const auto d = backend.next_distribution(c).distribution;
    for (std::size_t i = 0; i < d.size(); ++i) {
      auto next = c;
      next.history.push_back(d.tokens()[i]);
      walk(next, logp + std::log(d.probs()[i]));
    }
  };
  walk(ctx, 0.0);
  CHECK(best == "y c g");

  const auto greedy = decode_greedy(backend, ctx, config(Strategy::kGreedy));
  CHECK(greedy.text == "x a e");

  auto cfg = config(Strategy::kBeam, 50);
  cfg.num_beams = 2;
  const auto beam = decode_beam(backend, ctx, cfg);
  CHECK(beam.text == best);
  // Every beam finished after three words and EOS.
  CHECK(beam.trace.steps.size() == 4);
  CHECK(beam.trace.total_backend_calls == 1 + 2 + 2 + 2);

  cfg.num_beams = 1;
  const auto one = decode_beam(backend, ctx, cfg);
  CHECK(one.text == decode_greedy(backend, ctx, config(Strategy::kGreedy, 50)).text);
}

TEST_CASE("contrastive decoding") {
  const auto backend = scripted(R"({
    "rules": [
      {"pattern": {"max_history": 0, "image": true}, "distribution": {"a": 0.6, "b": 0.4}},
      {"pattern": {"max_history": 0, "image": false}, "distribution": {"a": 0.9, "b": 0.1}}
    ],
    "default": {"</s>": 1.0}
  })");
  const auto ctx = backend.make_context("img", "Describe.");
  auto cfg = config(Strategy::kContrastive);
  cfg.contrast = ContrastSpec{};
  cfg.contrast->alpha = 1.0;
  cfg.contrast->plausibility_cutoff = 0.0;
  // 2 ln 0.6 - ln 0.9 < 2 ln 0.4 - ln 0.1
  CHECK(2 * std::log(0.6) - std::log(0.9) < 2 * std::log(0.4) - std::log(0.1));
  const auto out = decode_contrastive(backend, ctx, cfg);
  CHECK(out.text == "b");
  CHECK(out.trace.steps[0].source == StepSource::kContrastive);
  CHECK(out.trace.steps[0].backend_calls == 2);

  cfg.contrast->alpha = 0.0;
  CHECK(decode_contrastive(backend, ctx, cfg).text == "a");

  // A cutoff above 0.4/0.6 leaves only "a" plausible.
  cfg.contrast->alpha = 1.0;
  cfg.contrast->plausibility_cutoff = 0.7;
  CHECK(decode_contrastive(backend, ctx, cfg).text == "a");

  cfg.contrast->mode = ContrastMode::kModifiedInstruction;
  CHECK_THROWS_AS(decode_contrastive(backend, ctx, cfg), Error);
  cfg.contrast->mode = ContrastMode::kNoImage;
  CHECK_THROWS_AS(decode_contrastive(backend, ctx.without_image(), cfg), Error);
}

TEST_CASE("contrast contexts and schedules") {
  const auto backend = scripted(kChain);
  const auto ctx = backend.make_context("img.jpg", "Describe.");
  ContrastSpec spec;
  spec.mode = ContrastMode::kDistortedImage;
  CHECK(contrast_context(backend, ctx, spec).image == "img.jpg#distorted");
  spec.contrast_image = "noise.jpg";
  CHECK(contrast_context(backend, ctx, spec).image == "noise.jpg");
  spec.mode = ContrastMode::kModifiedInstruction;
  spec.contrast_instruction = "Describe with errors.";
  CHECK(contrast_context(backend, ctx, spec).prompt_text == "Describe with errors.");
  spec.mode = ContrastMode::kNoImage;
  CHECK_FALSE(contrast_context(backend, ctx, spec).image);

  spec.alpha = 2.0;
  CHECK(contrast_alpha(spec, 10, 100) == 2.0);
  spec.alpha_schedule = AlphaSchedule::kLinearInT;
  CHECK(contrast_alpha(spec, 10, 100) == doctest::Approx(0.2));
  CHECK(contrast_alpha(spec, 100, 100) == doctest::Approx(2.0));
}

TEST_CASE("equal primary and contrast distributions reduce to greedy") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto backend = testing::random_scripted_backend(seed);
    const auto ctx = backend.make_context("img", "Describe.");
    auto cfg = config(Strategy::kContrastive, 40);
    cfg.contrast = ContrastSpec{};
    cfg.contrast->mode = ContrastMode::kDistortedImage;
    cfg.contrast->alpha = 3.0;
    // Scripted rules here ignore the image handle entirely.
    CHECK(decode_contrastive(backend, ctx, cfg).text ==
          decode_greedy(backend, ctx, config(Strategy::kGreedy, 40)).text);
  }
}

TEST_CASE("repetition penalty") {
  const auto d = TokenDistribution::from_entries({{0, 0.5}, {1, 0.5}}, 2);
  const std::vector<TokenId> seen = {0};
  CHECK(apply_repetition_penalty(d, seen, 1.0) == d);
  const auto p = apply_repetition_penalty(d, seen, 2.0);
  // 0.25 vs 0.5 before renormalizing.
  CHECK(p.prob(0) == doctest::Approx(1.0 / 3.0));
  CHECK(p.prob(1) == doctest::Approx(2.0 / 3.0));
}
