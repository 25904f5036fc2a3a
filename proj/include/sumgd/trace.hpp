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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumgd/distribution.hpp"
#include "sumgd/pos.hpp"
#include "sumgd/summarizer.hpp"

namespace sumgd {

inline constexpr int kTraceSchemaVersion = 1;

enum class StepSource { kFull, kSummary, kContrastive, kNotApplicable };

std::string_view step_source_name(StepSource s);
StepSource parse_step_source(std::string_view name);

struct StepRecord {
  // 0-based index of the generated token.
  std::size_t position = 0;
  TokenId token = 0;
  // Surface form of the token; empty for EOS.
  std::string word;
  std::optional<PosTag> pos_tag;
  StepSource source = StepSource::kNotApplicable;
  // backend_calls == generation_calls + lookahead_calls + summarization_calls
  std::size_t backend_calls = 0;
  std::size_t generation_calls = 0;
  std::size_t lookahead_calls = 0;
  std::size_t summarization_calls = 0;
  std::optional<double> jsd_vs_llm;
  bool eos = false;

  bool operator==(const StepRecord&) const = default;
};

struct DecodeTrace {
  std::vector<StepRecord> steps;
  std::size_t total_backend_calls = 0;
  std::size_t generation_calls = 0;
  std::size_t lookahead_calls = 0;
  std::size_t summarization_calls = 0;
  std::vector<SummaryState> summaries;

  // Adds the step and its calls to the totals.
  void push(StepRecord step);
  // Steps that produced a non-EOS token.
  std::size_t generated_tokens() const;
};

struct DecodeOutput {
  std::string text;
  DecodeTrace trace;
};

nlohmann::json to_json(const StepRecord& step);
StepRecord step_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SummaryState& state);
SummaryState summary_state_from_json(const nlohmann::json& j);

// A trace file holds a header line, one line per step and a footer line with
// totals, summaries and the decoded text.
struct TraceFile {
  nlohmann::json header;
  DecodeTrace trace;
  std::string text;
};

void write_trace_jsonl(std::ostream& out, const nlohmann::json& header,
                       const DecodeOutput& output);
TraceFile read_trace_jsonl(std::istream& in);
TraceFile read_trace_file(const std::filesystem::path& path);

}  // namespace sumgd
