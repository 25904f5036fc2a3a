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

#include "sumgd/decode_config.hpp"

#include <array>
#include <set>

#include "sumgd/error.hpp"

namespace sumgd {
namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<Strategy, 5> kStrategies{{{Strategy::kGreedy, "greedy"},
                                              {Strategy::kNucleus, "nucleus"},
                                              {Strategy::kBeam, "beam"},
                                              {Strategy::kContrastive, "contrastive"},
                                              {Strategy::kSumgd, "sumgd"}}};
constexpr NameTable<ContrastMode, 3> kModes{
    {{ContrastMode::kDistortedImage, "distorted_image"},
     {ContrastMode::kModifiedInstruction, "modified_instruction"},
     {ContrastMode::kNoImage, "no_image"}}};
constexpr NameTable<AlphaSchedule, 2> kSchedules{
    {{AlphaSchedule::kConstant, "constant"},
     {AlphaSchedule::kLinearInT, "linear_in_t"}}};
constexpr NameTable<PosScope, 2> kScopes{
    {{PosScope::kImageRelated, "image_related"}, {PosScope::kAll, "all"}}};
constexpr NameTable<SummaryScope, 2> kSummaryScopes{
    {{SummaryScope::kFull, "full"}, {SummaryScope::kIncremental, "incremental"}}};
constexpr NameTable<Routing, 2> kRoutings{
    {{Routing::kSummaryFirst, "summary_first"}, {Routing::kFullFirst, "full_first"}}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) {
  for (const auto& [e, n] : table) {
    if (e == value) return n;
  }
  return "?";
}

template <typename E, std::size_t N>
E parse(const NameTable<E, N>& table, std::string_view name,
        std::string_view field) {
  for (const auto& [e, n] : table) {
    if (n == name) return e;
  }
  throw Error(ErrorCode::kConfigError, "unknown " + std::string(field) +
                                           " '" + std::string(name) + "'");
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    std::string_view where) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfigError, std::string(where) + " must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) {
      throw Error(ErrorCode::kConfigError,
                  "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

ContrastSpec contrast_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"mode", "alpha", "alpha_schedule", "plausibility_cutoff",
                     "contrast_image", "contrast_instruction"},
                 "contrast");
  ContrastSpec c;
  if (j.contains("mode")) c.mode = parse(kModes, j["mode"].get<std::string>(), "contrast mode");
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("alpha_schedule")) {
    c.alpha_schedule = parse(kSchedules, j["alpha_schedule"].get<std::string>(), "alpha_schedule");
  }
  c.plausibility_cutoff = j.value("plausibility_cutoff", c.plausibility_cutoff);
  c.contrast_image = j.value("contrast_image", "");
  c.contrast_instruction = j.value("contrast_instruction", "");
  return c;
}

SumgdSpec sumgd_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"pos_scope", "summarizer", "summary_scope", "routing",
                     "max_lookahead_tokens", "summary_max_tokens"},
                 "sumgd");
  SumgdSpec s;
  if (j.contains("pos_scope")) s.pos_scope = parse(kScopes, j["pos_scope"].get<std::string>(), "pos_scope");
  s.summarizer = j.value("summarizer", s.summarizer);
  if (j.contains("summary_scope")) {
    s.summary_scope = parse(kSummaryScopes, j["summary_scope"].get<std::string>(), "summary_scope");
  }
  if (j.contains("routing")) s.routing = parse(kRoutings, j["routing"].get<std::string>(), "routing");
  s.max_lookahead_tokens = j.value("max_lookahead_tokens", s.max_lookahead_tokens);
  s.summary_max_tokens = j.value("summary_max_tokens", s.summary_max_tokens);
  return s;
}

}  // namespace

std::string_view strategy_name(Strategy s) { return name_of(kStrategies, s); }

Strategy parse_strategy(std::string_view name) {
  return parse(kStrategies, name, "strategy");
}

void DecodeConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kConfigError, msg);
  };
  if (strategy == Strategy::kNucleus && !(top_p > 0.0 && top_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidTopP, "top_p must lie in (0, 1]");
  }
  if (num_beams == 0) fail("num_beams must be >= 1");
  if (!(repetition_penalty > 0.0)) fail("repetition_penalty must be > 0");
  if (strategy == Strategy::kContrastive) {
    if (!contrast) fail("contrastive strategy requires a contrast block");
    if (!(contrast->alpha >= 0.0)) fail("contrast alpha must be >= 0");
    if (!(contrast->plausibility_cutoff >= 0.0 && contrast->plausibility_cutoff <= 1.0)) {
      fail("plausibility_cutoff must lie in [0, 1]");
    }
    if (contrast->alpha_schedule == AlphaSchedule::kLinearInT &&
        contrast->mode != ContrastMode::kNoImage) {
      fail("alpha_schedule linear_in_t requires contrast mode no_image");
    }
  }
  if (strategy == Strategy::kSumgd && sumgd) {
    static const std::set<std::string> kSummarizers = {"identity", "extractive",
                                                       "self", "distilled"};
    if (kSummarizers.count(sumgd->summarizer) == 0) {
      fail("unknown summarizer '" + sumgd->summarizer + "'");
    }
    if (sumgd->max_lookahead_tokens == 0) fail("max_lookahead_tokens must be >= 1");
  }
}

std::string DecodeConfig::label() const {
  switch (strategy) {
    case Strategy::kBeam:
      return "beam(n=" + std::to_string(num_beams) + ")";
    case Strategy::kNucleus:
      return "nucleus";
    case Strategy::kContrastive:
      return "contrastive(" +
             std::string(name_of(kModes, contrast ? contrast->mode : ContrastMode::kNoImage)) + ")";
    case Strategy::kSumgd: {
      std::string out = "sumgd-" + (sumgd ? sumgd->summarizer : std::string("extractive"));
      if (sumgd && sumgd->pos_scope == PosScope::kAll) out += "(all-pos)";
      return out;
    }
    case Strategy::kGreedy:
      break;
  }
  return "greedy";
}

DecodeConfig decode_config_from_json(const nlohmann::json& j) {
  try {
    reject_unknown(j, {"strategy", "max_new_tokens", "top_p", "num_beams",
                       "repetition_penalty", "seed", "top_k", "contrast", "sumgd"},
                   "decode config");
    DecodeConfig cfg;
    if (j.contains("strategy")) cfg.strategy = parse_strategy(j["strategy"].get<std::string>());
    cfg.max_new_tokens = j.value("max_new_tokens", cfg.max_new_tokens);
    cfg.top_p = j.value("top_p", cfg.top_p);
    cfg.num_beams = j.value("num_beams", cfg.num_beams);
    cfg.repetition_penalty = j.value("repetition_penalty", cfg.repetition_penalty);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.top_k = j.value("top_k", cfg.top_k);
    if (j.contains("contrast")) cfg.contrast = contrast_from_json(j["contrast"]);
    if (j.contains("sumgd")) cfg.sumgd = sumgd_from_json(j["sumgd"]);
    if (cfg.strategy == Strategy::kSumgd && !cfg.sumgd) cfg.sumgd = SumgdSpec{};
    if (cfg.strategy == Strategy::kContrastive && !cfg.contrast) cfg.contrast = ContrastSpec{};
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("decode config: ") + e.what());
  }
}

nlohmann::json to_json(const DecodeConfig& cfg) {
  nlohmann::json j = {
      {"strategy", strategy_name(cfg.strategy)},
      {"max_new_tokens", cfg.max_new_tokens},
      {"top_p", cfg.top_p},
      {"num_beams", cfg.num_beams},
      {"repetition_penalty", cfg.repetition_penalty},
      {"seed", cfg.seed},
      {"top_k", cfg.top_k},
  };
  if (cfg.contrast) {
    const auto& c = *cfg.contrast;
    j["contrast"] = {{"mode", name_of(kModes, c.mode)},
                     {"alpha", c.alpha},
                     {"alpha_schedule", name_of(kSchedules, c.alpha_schedule)},
                     {"plausibility_cutoff", c.plausibility_cutoff},
                     {"contrast_image", c.contrast_image},
                     {"contrast_instruction", c.contrast_instruction}};
  }
  if (cfg.sumgd) {
    const auto& s = *cfg.sumgd;
    j["sumgd"] = {{"pos_scope", name_of(kScopes, s.pos_scope)},
                  {"summarizer", s.summarizer},
                  {"summary_scope", name_of(kSummaryScopes, s.summary_scope)},
                  {"routing", name_of(kRoutings, s.routing)},
                  {"max_lookahead_tokens", s.max_lookahead_tokens},
                  {"summary_max_tokens", s.summary_max_tokens}};
  }
  return j;
}

}  // namespace sumgd
