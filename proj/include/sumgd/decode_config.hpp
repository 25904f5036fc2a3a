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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace sumgd {

enum class Strategy { kGreedy, kNucleus, kBeam, kContrastive, kSumgd };

enum class ContrastMode {
  kDistortedImage,       // original image vs a distorted copy (VCD-style)
  kModifiedInstruction,  // original vs modified instruction (ICD-style)
  kNoImage,              // with vs without the image (M3ID-style)
};

enum class AlphaSchedule {
  kConstant,
  // alpha_t = alpha * t / max_new_tokens; approximates the growing contrast
  // strength of M3ID and is flagged as such in reports.
  kLinearInT,
};

struct ContrastSpec {
  ContrastMode mode = ContrastMode::kNoImage;
  double alpha = 1.0;
  AlphaSchedule alpha_schedule = AlphaSchedule::kConstant;
  // Tokens below cutoff * max primary probability are never chosen.
  double plausibility_cutoff = 0.1;
  // Distorted image handle; defaults to "<image>#distorted".
  std::string contrast_image;
  // Full replacement instruction for kModifiedInstruction.
  std::string contrast_instruction;
};

enum class PosScope { kImageRelated, kAll };
enum class SummaryScope { kFull, kIncremental };
enum class Routing { kSummaryFirst, kFullFirst };

struct SumgdSpec {
  PosScope pos_scope = PosScope::kImageRelated;
  // identity | extractive | self | distilled
  std::string summarizer = "extractive";
  SummaryScope summary_scope = SummaryScope::kFull;
  Routing routing = Routing::kSummaryFirst;
  std::size_t max_lookahead_tokens = 5;
  std::size_t summary_max_tokens = 64;
};

struct DecodeConfig {
  Strategy strategy = Strategy::kGreedy;
  std::size_t max_new_tokens = 512;
  double top_p = 0.9;
  std::size_t num_beams = 5;
  double repetition_penalty = 1.0;
  std::uint64_t seed = 0;
  std::size_t top_k = 50;
  std::optional<ContrastSpec> contrast;
  std::optional<SumgdSpec> sumgd;

  // Throws ConfigError on any inconsistent field.
  void validate() const;
  // Short method label for tables, e.g. "beam(n=5)" or "sumgd-extractive".
  std::string label() const;
};

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

// Unknown keys and bad enum strings are ConfigErrors; absent keys default.
DecodeConfig decode_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DecodeConfig& cfg);

}  // namespace sumgd
