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

// Reproducible experiment runs: backend and dataset specs, decode runs with
// manifests, evaluation of finished runs and cross-run comparison.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumgd/backend.hpp"
#include "sumgd/decode_config.hpp"
#include "sumgd/http_backend.hpp"
#include "sumgd/metrics.hpp"
#include "sumgd/summarizer.hpp"

namespace sumgd {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr int kCaptionsSchemaVersion = 1;
inline constexpr std::string_view kDefaultPrompt = "Please describe this image in detail.";

// Backend specs:
//   scripted:<rules.json>   ngram:<table.json>   synthetic[:<params.json>]
//   http[:<url>] | <url>    (URL defaults to $SUMGD_SIDECAR_URL)
struct BackendHandle {
  std::string spec;
  std::unique_ptr<Backend> backend;
  // Set when the backend is the sidecar client.
  HttpBackend* http = nullptr;
};

BackendHandle open_backend(const std::string& spec);

struct DatasetImage {
  std::string image_id;
  // Opaque handle passed to the backend; defaults to image_id.
  std::string image;
};

// Dataset file (JSON): {"schema_version": 1, "images": [id | {image_id,
// image}], "annotations": path, "vocab": path, "prompt"?: string}. Paths are
// relative to the dataset file.
struct Dataset {
  std::filesystem::path path;
  std::vector<DatasetImage> images;
  std::filesystem::path annotations;
  std::filesystem::path vocab;
  std::optional<std::string> prompt;
  // Content hash over the dataset, annotation and vocabulary files.
  std::string content_hash;
};

Dataset load_dataset(const std::filesystem::path& path);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

// Builds the summarizer a SumGD config asks for. `self` summarizes with the
// generation backend; `distilled` needs either the sidecar or a separate
// summarizer backend. Returns null for strategies without summaries.
std::unique_ptr<Summarizer> make_summarizer(const DecodeConfig& cfg, const BackendHandle& generation,
                                            const BackendHandle* summarizer_backend);

struct DecodeRunOptions {
  DecodeConfig config;
  std::filesystem::path config_path;
  std::string backend_spec;
  std::optional<std::string> summarizer_backend_spec;
  std::filesystem::path dataset_path;
  std::filesystem::path out_dir;
  std::optional<std::string> prompt;
  std::size_t jobs = 1;
  std::size_t limit = 0;  // 0 = all images
  bool write_probes = false;
  bool overwrite = false;
};

struct RunManifest {
  std::string run_id;
  nlohmann::json json;
};

// Decodes every dataset image and writes captions.jsonl, traces/<id>.jsonl,
// optional probes/<id>.jsonl and manifest.json into out_dir.
RunManifest run_decode(const DecodeRunOptions& options);

// Timestamp for manifests: $SOURCE_DATE_EPOCH when set, else the clock.
std::string manifest_timestamp();

nlohmann::json read_manifest(const std::filesystem::path& run_dir);

// Evaluates a finished run directory (annotations and vocabulary from its
// dataset) and adds cost totals from its traces.
MetricsReport evaluate_run(const std::filesystem::path& run_dir, const EvaluateOptions& options);

// Cost totals over the traces referenced by a caption corpus; trace paths are
// relative to `base`. Errors: DataError for unreadable traces.
CostSummary cost_from_traces(std::span<const CaptionRecord> captions,
                             const std::filesystem::path& base);

struct CompareRow {
  std::string run_dir;
  std::string method;
  std::string strategy;
  std::string summarizer;
  MetricsReport report;
  // Calls per generated token over the greedy run's; null without a greedy run.
  std::optional<double> ric;
  // SumGD only: the same ratio without lookahead calls.
  std::optional<double> ric_summarization_only;
};

struct CompareOptions {
  // Weight of one summarization call relative to a generation call, applied
  // to runs whose summarizer is `distilled`.
  double distilled_call_weight = 1.0;
};

// Errors: UsageError (< 2 runs), IncompatibleRuns (different datasets or
// token limits), DataError (run not evaluated).
std::vector<CompareRow> compare_runs(const std::vector<std::filesystem::path>& run_dirs,
                                     const CompareOptions& options = {});

void write_compare_markdown(std::ostream& out, const std::vector<CompareRow>& rows);
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);
nlohmann::json compare_to_json(const std::vector<CompareRow>& rows);

}  // namespace sumgd
