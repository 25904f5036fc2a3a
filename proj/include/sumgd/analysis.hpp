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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumgd/backend.hpp"
#include "sumgd/decoders.hpp"
#include "sumgd/pos.hpp"

namespace sumgd {

inline constexpr int kProbeSchemaVersion = 1;
inline constexpr std::size_t kDefaultAnalysisWindow = 32;

struct ProbeStep {
  std::size_t position = 0;
  TokenId token = 0;
  std::string word;
  std::optional<PosTag> pos_tag;
  // JSD between the image-conditioned and the image-free distribution.
  double jsd = 0.0;
  std::optional<Attention> attention;
};

struct PriorProbe {
  std::vector<ProbeStep> steps;
};

struct ProbeOutput {
  DecodeOutput decode;
  PriorProbe probe;
};

// Decodes with `cfg` and, at every non-EOS step, also queries the same
// context without the image. The probing queries are not charged to the
// decode and do not change its output. Steps are tagged with `tagger` over
// the final text. Errors: ImageUnsupported when the backend or the context
// has no image.
ProbeOutput probe_decode(const Backend& backend, const GenerationContext& ctx,
                         const DecodeConfig& cfg, const Tagger& tagger,
                         const DecodeResources& resources = {});

struct MeanValue {
  double sum = 0.0;
  std::size_t count = 0;
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
  void add(double v) {
    sum += v;
    ++count;
  }
};

// Mean JSD per tag over the first `window` positions of each probe. Tags
// with no samples are absent.
std::map<PosTag, MeanValue> jsd_by_pos(const std::vector<PriorProbe>& probes,
                                       std::size_t window = kDefaultAnalysisWindow);

// Mean JSD per (tag, position / interval).
std::map<std::pair<PosTag, std::size_t>, MeanValue> jsd_by_pos_interval(
    const std::vector<PriorProbe>& probes, std::size_t interval = kDefaultAnalysisWindow);

struct AttentionInterval {
  std::size_t interval = 0;
  MeanValue image_mass;
  MeanValue text_mass;
};

struct AttentionBalance {
  std::vector<AttentionInterval> intervals;
  // Set when no probe step carried attention.
  std::optional<std::string> warning;
};

AttentionBalance attention_balance(const std::vector<PriorProbe>& probes,
                                   std::size_t interval = kDefaultAnalysisWindow);

struct MethodCurve {
  std::string method;
  std::string text;
  // One value per decoded step: JSD(selection distribution, image-free
  // distribution of the sourcing context).
  std::vector<double> jsd_vs_llm;
  // Contrastive methods only: JSD(primary, contrast) per step.
  std::vector<std::optional<double>> primary_vs_contrast;
  std::vector<std::optional<PosTag>> pos_tags;
  std::vector<std::string> words;
};

std::vector<MethodCurve> method_jsd_comparison(const Backend& backend,
                                               const GenerationContext& ctx,
                                               const std::vector<DecodeConfig>& methods,
                                               const DecodeResources& resources = {});

nlohmann::json to_json(const ProbeStep& step);
ProbeStep probe_step_from_json(const nlohmann::json& j);

void write_probe_jsonl(std::ostream& out, const nlohmann::json& header,
                       const PriorProbe& probe);
PriorProbe read_probe_jsonl(std::istream& in);
PriorProbe read_probe_file(const std::filesystem::path& path);

void write_pos_csv(std::ostream& out, const std::map<PosTag, MeanValue>& table);
void write_pos_interval_csv(
    std::ostream& out, const std::map<std::pair<PosTag, std::size_t>, MeanValue>& table);
void write_attention_csv(std::ostream& out, const AttentionBalance& balance);
void write_method_csv(std::ostream& out, const std::vector<MethodCurve>& curves);

}  // namespace sumgd
