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

#include "sumgd/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "sumgd/error.hpp"

namespace sumgd {

std::string_view step_source_name(StepSource s) {
  switch (s) {
    case StepSource::kFull:
      return "full";
    case StepSource::kSummary:
      return "summary";
    case StepSource::kContrastive:
      return "contrastive";
    case StepSource::kNotApplicable:
      break;
  }
  return "n/a";
}

StepSource parse_step_source(std::string_view name) {
  if (name == "full") return StepSource::kFull;
  if (name == "summary") return StepSource::kSummary;
  if (name == "contrastive") return StepSource::kContrastive;
  if (name == "n/a") return StepSource::kNotApplicable;
  throw Error(ErrorCode::kDataError, "unknown step source '" + std::string(name) + "'");
}

void DecodeTrace::push(StepRecord step) {
  total_backend_calls += step.backend_calls;
  generation_calls += step.generation_calls;
  lookahead_calls += step.lookahead_calls;
  summarization_calls += step.summarization_calls;
  steps.push_back(std::move(step));
}

std::size_t DecodeTrace::generated_tokens() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.eos ? 0 : 1;
  return n;
}

nlohmann::json to_json(const StepRecord& step) {
  nlohmann::json j = {
      {"record", "step"},
      {"position", step.position},
      {"token", step.token},
      {"word", step.word},
      {"pos_tag", nullptr},
      {"source", step_source_name(step.source)},
      {"backend_calls", step.backend_calls},
      {"generation_calls", step.generation_calls},
      {"lookahead_calls", step.lookahead_calls},
      {"summarization_calls", step.summarization_calls},
      {"jsd_vs_llm", nullptr},
      {"eos", step.eos},
  };
  if (step.pos_tag) j["pos_tag"] = pos_tag_name(*step.pos_tag);
  if (step.jsd_vs_llm) j["jsd_vs_llm"] = *step.jsd_vs_llm;
  return j;
}

StepRecord step_from_json(const nlohmann::json& j) {
  StepRecord s;
  s.position = j.at("position").get<std::size_t>();
  s.token = j.at("token").get<TokenId>();
  s.word = j.at("word").get<std::string>();
  if (j.contains("pos_tag") && !j["pos_tag"].is_null()) {
    const auto tag = parse_pos_tag(j["pos_tag"].get<std::string>());
    if (!tag) throw Error(ErrorCode::kDataError, "unknown POS tag in trace");
    s.pos_tag = *tag;
  }
  s.source = parse_step_source(j.at("source").get<std::string>());
  s.backend_calls = j.at("backend_calls").get<std::size_t>();
  s.generation_calls = j.value("generation_calls", std::size_t{0});
  s.lookahead_calls = j.value("lookahead_calls", std::size_t{0});
  s.summarization_calls = j.value("summarization_calls", std::size_t{0});
  if (j.contains("jsd_vs_llm") && !j["jsd_vs_llm"].is_null()) {
    s.jsd_vs_llm = j["jsd_vs_llm"].get<double>();
  }
  s.eos = j.value("eos", false);
  return s;
}

nlohmann::json to_json(const SummaryState& state) {
  return {{"summary_text", state.summary_text},
          {"source_char_len", state.source_char_len},
          {"summary_char_len", state.summary_char_len},
          {"revision", state.revision}};
}

SummaryState summary_state_from_json(const nlohmann::json& j) {
  SummaryState s;
  s.summary_text = j.at("summary_text").get<std::string>();
  s.source_char_len = j.at("source_char_len").get<std::size_t>();
  s.summary_char_len = j.at("summary_char_len").get<std::size_t>();
  s.revision = j.at("revision").get<std::size_t>();
  return s;
}

void write_trace_jsonl(std::ostream& out, const nlohmann::json& header,
                       const DecodeOutput& output) {
  nlohmann::json head = header;
  head["record"] = "header";
  head["schema_version"] = kTraceSchemaVersion;
  out << head.dump() << '\n';
  for (const auto& step : output.trace.steps) out << to_json(step).dump() << '\n';
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : output.trace.summaries) summaries.push_back(to_json(s));
  const nlohmann::json footer = {
      {"record", "footer"},
      {"text", output.text},
      {"total_backend_calls", output.trace.total_backend_calls},
      {"generation_calls", output.trace.generation_calls},
      {"lookahead_calls", output.trace.lookahead_calls},
      {"summarization_calls", output.trace.summarization_calls},
      {"generated_tokens", output.trace.generated_tokens()},
      {"summaries", summaries},
  };
  out << footer.dump() << '\n';
}

TraceFile read_trace_jsonl(std::istream& in) {
  TraceFile file;
  bool have_header = false;
  bool have_footer = false;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const std::string kind = j.at("record").get<std::string>();
      if (kind == "header") {
        file.header = j;
        have_header = true;
      } else if (kind == "step") {
        file.trace.push(step_from_json(j));
      } else if (kind == "footer") {
        file.text = j.at("text").get<std::string>();
        for (const auto& s : j.at("summaries")) {
          file.trace.summaries.push_back(summary_state_from_json(s));
        }
        if (j.at("total_backend_calls").get<std::size_t>() !=
            file.trace.total_backend_calls) {
          throw Error(ErrorCode::kDataError, "trace footer totals disagree with steps");
        }
        have_footer = true;
      } else {
        throw Error(ErrorCode::kDataError, "unknown trace record '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDataError,
                "trace line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header || !have_footer) {
    throw Error(ErrorCode::kDataError, "trace is missing its header or footer");
  }
  return file;
}

TraceFile read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kDataError, "cannot open " + path.string());
  return read_trace_jsonl(in);
}

}  // namespace sumgd
