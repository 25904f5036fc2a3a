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

#include "sumgd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "sumgd/analysis.hpp"
#include "sumgd/decoders.hpp"
#include "sumgd/error.hpp"
#include "sumgd/mock_backends.hpp"
#include "sumgd/pos.hpp"
#include "sumgd/sentence.hpp"
#include "sumgd/trace.hpp"

#ifndef SUMGD_VERSION
#define SUMGD_VERSION "0.0.0"
#endif

namespace sumgd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kDataError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const fs::path& path, ErrorCode code) {
  const std::string bytes = read_bytes(path);
  try {
    return json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(code, path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kDataError, "cannot write " + path.string());
  out << bytes;
}

SyntheticHallucinationBackend::Params synthetic_params(const json& j) {
  SyntheticHallucinationBackend::Params p;
  for (const auto& [key, value] : j.items()) {
    if (key == "slope") p.slope = value.get<double>();
    else if (key == "cap") p.cap = value.get<double>();
    else if (key == "objects_per_image") p.objects_per_image = value.get<std::size_t>();
    else if (key == "seed") p.seed = value.get<std::uint64_t>();
    else if (key == "max_sentences") p.max_sentences = value.get<std::size_t>();
    else throw Error(ErrorCode::kConfigError, "synthetic backend: unknown key '" + key + "'");
  }
  return p;
}

// Trace and probe file stem for an image id.
std::string file_stem(std::string_view image_id) {
  std::string out;
  for (char c : image_id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out;
}

std::string summarizer_name(const DecodeConfig& cfg) {
  return cfg.strategy == Strategy::kSumgd && cfg.sumgd ? cfg.sumgd->summarizer : "";
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

BackendHandle open_backend(const std::string& spec) {
  BackendHandle h;
  h.spec = spec;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "scripted" || kind == "ngram") {
    if (arg.empty()) throw Error(ErrorCode::kConfigError, kind + " backend needs a file: " + spec);
    if (kind == "scripted") {
      h.backend = std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(arg));
    } else {
      h.backend = std::make_unique<NgramBackend>(NgramBackend::from_file(arg));
    }
  } else if (kind == "synthetic") {
    const auto params = arg.empty() ? SyntheticHallucinationBackend::Params{}
                                    : synthetic_params(read_json_file(arg, ErrorCode::kConfigError));
    h.backend = std::make_unique<SyntheticHallucinationBackend>(params);
  } else if (kind == "http") {
    // "http://host:port" is accepted as a spec on its own.
    const std::string url = arg.rfind("//", 0) == 0 ? spec : arg;
    auto http = url.empty() ? HttpBackend::from_env() : std::make_unique<HttpBackend>(url);
    h.http = http.get();
    h.backend = std::move(http);
  } else {
    throw Error(ErrorCode::kConfigError, "unknown backend spec '" + spec + "'");
  }
  return h;
}

Dataset load_dataset(const fs::path& path) {
  const json j = read_json_file(path, ErrorCode::kDataError);
  Dataset d;
  d.path = path;
  const fs::path base = path.parent_path();
  try {
    if (j.value("schema_version", 1) != 1) {
      throw Error(ErrorCode::kDataError, path.string() + ": unsupported schema_version");
    }
    std::set<std::string> stems;
    for (const auto& item : j.at("images")) {
      DatasetImage img;
      if (item.is_string()) {
        img.image_id = item.get<std::string>();
      } else {
        img.image_id = item.at("image_id").get<std::string>();
        img.image = item.value("image", "");
      }
      if (img.image_id.empty()) throw Error(ErrorCode::kDataError, "empty image_id");
      if (img.image.empty()) img.image = img.image_id;
      if (!stems.insert(file_stem(img.image_id)).second) {
        throw Error(ErrorCode::kDataError, "duplicate image_id '" + img.image_id + "'");
      }
      d.images.push_back(std::move(img));
    }
    d.annotations = base / j.at("annotations").get<std::string>();
    d.vocab = base / j.at("vocab").get<std::string>();
    if (j.contains("prompt")) d.prompt = j["prompt"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDataError, path.string() + ": " + e.what());
  }
  if (d.images.empty()) throw Error(ErrorCode::kDataError, path.string() + ": no images");
  d.content_hash = fnv1a_hex(read_bytes(path) + '\0' + read_bytes(d.annotations) + '\0' +
                             read_bytes(d.vocab));
  return d;
}

std::unique_ptr<Summarizer> make_summarizer(const DecodeConfig& cfg, const BackendHandle& generation,
                                            const BackendHandle* summarizer_backend) {
  if (cfg.strategy != Strategy::kSumgd) return nullptr;
  const SumgdSpec spec = cfg.sumgd.value_or(SumgdSpec{});
  const std::string& name = spec.summarizer;
  if (name == "identity") return std::make_unique<IdentitySummarizer>();
  if (name == "extractive") {
    return std::make_unique<ExtractiveSummarizer>(default_tagger(), default_segmenter());
  }
  if (name == "self") {
    return std::make_unique<PromptSummarizer>(*generation.backend, SummaryVariant::kSelf,
                                              spec.summary_max_tokens);
  }
  if (name == "distilled") {
    if (summarizer_backend != nullptr) {
      if (summarizer_backend->http != nullptr) {
        return std::make_unique<HttpSummarizer>(*summarizer_backend->http, SummaryVariant::kDistilled);
      }
      return std::make_unique<PromptSummarizer>(*summarizer_backend->backend,
                                                SummaryVariant::kDistilled, spec.summary_max_tokens);
    }
    if (generation.http != nullptr) {
      return std::make_unique<HttpSummarizer>(*generation.http, SummaryVariant::kDistilled);
    }
    throw Error(ErrorCode::kConfigError,
                "distilled summarizer needs the sidecar or --summarizer-backend");
  }
  throw Error(ErrorCode::kConfigError, "unknown summarizer '" + name + "'");
}

std::string manifest_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest run_decode(const DecodeRunOptions& options) {
  options.config.validate();
  const Dataset dataset = load_dataset(options.dataset_path);
  const std::string prompt =
      options.prompt.value_or(dataset.prompt.value_or(std::string(kDefaultPrompt)));

  const fs::path out = options.out_dir;
  if (fs::exists(out / "manifest.json") && !options.overwrite) {
    throw Error(ErrorCode::kUsageError,
                (out / "manifest.json").string() + " exists; runs are immutable (use --overwrite)");
  }

  std::vector<DatasetImage> images = dataset.images;
  if (options.limit > 0 && options.limit < images.size()) images.resize(options.limit);

  const json config_json = to_json(options.config);
  json identity = {{"engine_version", SUMGD_VERSION},
                   {"config", config_json},
                   {"backend", options.backend_spec},
                   {"summarizer_backend", options.summarizer_backend_spec.value_or("")},
                   {"dataset", dataset.content_hash},
                   {"images", images.size()},
                   {"prompt", prompt},
                   {"probes", options.write_probes}};
  const std::string run_id = fnv1a_hex(identity.dump());
  const std::string started = manifest_timestamp();

  BackendHandle backend = open_backend(options.backend_spec);
  std::optional<BackendHandle> summ_backend;
  if (options.summarizer_backend_spec) summ_backend = open_backend(*options.summarizer_backend_spec);
  const auto summarizer =
      make_summarizer(options.config, backend, summ_backend ? &*summ_backend : nullptr);
  const DecodeResources resources{summarizer.get(), &default_tagger(), &default_segmenter()};

  struct Result {
    DecodeOutput output;
    std::optional<PriorProbe> probe;
  };
  std::vector<std::optional<Result>> results(images.size());
  std::vector<std::exception_ptr> errors(images.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < images.size(); i = next++) {
      try {
        const auto ctx = backend.backend->make_context(images[i].image, prompt);
        if (options.write_probes) {
          auto p = probe_decode(*backend.backend, ctx, options.config, default_tagger(), resources);
          results[i] = Result{std::move(p.decode), std::move(p.probe)};
        } else {
          results[i] = Result{decode(*backend.backend, ctx, options.config, resources), std::nullopt};
        }
      } catch (...) {
        errors[i] = std::current_exception();
        next = images.size();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, images.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Single writer, image order.
  fs::create_directories(out / "traces");
  if (options.write_probes) fs::create_directories(out / "probes");
  std::ostringstream captions;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Result& r = *results[i];
    const std::string stem = file_stem(images[i].image_id);
    const std::string trace_rel = "traces/" + stem + ".jsonl";
    const json header = {{"run_id", run_id},
                         {"image_id", images[i].image_id},
                         {"method", options.config.label()}};
    std::ostringstream trace;
    write_trace_jsonl(trace, header, r.output);
    write_file(out / trace_rel, trace.str());
    if (r.probe) {
      std::ostringstream probe;
      write_probe_jsonl(probe, header, *r.probe);
      write_file(out / "probes" / (stem + ".jsonl"), probe.str());
    }
    const json record = {{"schema_version", kCaptionsSchemaVersion},
                         {"run_id", run_id},
                         {"image_id", images[i].image_id},
                         {"caption", r.output.text},
                         {"trace_path", trace_rel}};
    captions << record.dump() << '\n';
  }
  write_file(out / "captions.jsonl", captions.str());

  json manifest = {
      {"schema_version", kManifestSchemaVersion},
      {"run_id", run_id},
      {"engine_version", SUMGD_VERSION},
      {"method", options.config.label()},
      {"config", config_json},
      {"config_path", options.config_path.string()},
      {"backend", options.backend_spec},
      {"summarizer_backend", options.summarizer_backend_spec
                                 ? json(*options.summarizer_backend_spec)
                                 : json(nullptr)},
      {"dataset",
       {{"path", fs::absolute(dataset.path).lexically_normal().string()},
        {"content_hash", dataset.content_hash},
        {"annotations", fs::absolute(dataset.annotations).lexically_normal().string()},
        {"vocab", fs::absolute(dataset.vocab).lexically_normal().string()},
        {"images", images.size()}}},
      {"prompt", prompt},
      {"outputs",
       {{"captions", "captions.jsonl"},
        {"traces", "traces"},
        {"probes", options.write_probes ? json("probes") : json(nullptr)}}},
      {"started_at", started},
      {"finished_at", manifest_timestamp()}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return {run_id, std::move(manifest)};
}

json read_manifest(const fs::path& run_dir) {
  const json m = read_json_file(run_dir / "manifest.json", ErrorCode::kDataError);
  if (!m.is_object() || m.value("schema_version", 0) != kManifestSchemaVersion) {
    throw Error(ErrorCode::kDataError, (run_dir / "manifest.json").string() +
                                           ": missing or unsupported schema_version");
  }
  return m;
}

CostSummary cost_from_traces(std::span<const CaptionRecord> captions, const fs::path& base) {
  CostSummary cost;
  for (const auto& c : captions) {
    if (!c.trace_path) {
      throw Error(ErrorCode::kDataError, "caption for '" + c.image_id + "' has no trace_path");
    }
    const TraceFile t = read_trace_file(base / *c.trace_path);
    cost.generated_tokens += t.trace.generated_tokens();
    cost.backend_calls += t.trace.total_backend_calls;
    cost.generation_calls += t.trace.generation_calls;
    cost.lookahead_calls += t.trace.lookahead_calls;
    cost.summarization_calls += t.trace.summarization_calls;
  }
  return cost;
}

MetricsReport evaluate_run(const fs::path& run_dir, const EvaluateOptions& options) {
  const json m = read_manifest(run_dir);
  const auto vocab = ObjectVocabulary::load(m.at("dataset").at("vocab").get<std::string>());
  const auto annotations =
      load_annotations(m.at("dataset").at("annotations").get<std::string>(), vocab);
  const auto captions = load_captions(run_dir / m.at("outputs").at("captions").get<std::string>());
  MetricsReport report = evaluate_corpus(captions, annotations, vocab, default_segmenter(), options);
  const DecodeConfig cfg = decode_config_from_json(m.at("config"));
  report.method = m.at("method").get<std::string>();
  report.max_new_tokens = cfg.max_new_tokens;
  report.cost = cost_from_traces(captions, run_dir);
  if (cfg.contrast && cfg.contrast->alpha_schedule == AlphaSchedule::kLinearInT) {
    report.notes.push_back("alpha schedule linear_in_t approximates M3ID's contrast growth");
  }
  return report;
}

std::vector<CompareRow> compare_runs(const std::vector<fs::path>& run_dirs,
                                     const CompareOptions& options) {
  if (run_dirs.size() < 2) throw Error(ErrorCode::kUsageError, "compare needs at least two runs");
  std::vector<CompareRow> rows;
  std::string dataset_hash;
  std::optional<std::size_t> max_tokens;
  for (const auto& dir : run_dirs) {
    const json m = read_manifest(dir);
    const fs::path report_path = dir / "report.json";
    if (!fs::exists(report_path)) {
      throw Error(ErrorCode::kDataError, dir.string() + " has no report.json (run evaluate first)");
    }
    CompareRow row;
    row.run_dir = dir.string();
    row.report = report_from_json(read_json_file(report_path, ErrorCode::kDataError));
    const DecodeConfig cfg = decode_config_from_json(m.at("config"));
    row.method = m.at("method").get<std::string>();
    row.strategy = std::string(strategy_name(cfg.strategy));
    row.summarizer = summarizer_name(cfg);
    const std::string hash = m.at("dataset").at("content_hash").get<std::string>();
    if (rows.empty()) {
      dataset_hash = hash;
      max_tokens = cfg.max_new_tokens;
    } else if (hash != dataset_hash) {
      throw Error(ErrorCode::kIncompatibleRuns, dir.string() + " was decoded on a different dataset");
    } else if (cfg.max_new_tokens != *max_tokens) {
      throw Error(ErrorCode::kIncompatibleRuns,
                  dir.string() + " uses a different max_new_tokens");
    }
    if (!row.report.cost) {
      throw Error(ErrorCode::kDataError, dir.string() + ": report has no cost totals");
    }
    rows.push_back(std::move(row));
  }

  const auto greedy = std::find_if(rows.begin(), rows.end(),
                                   [](const CompareRow& r) { return r.strategy == "greedy"; });
  if (greedy != rows.end() && greedy->report.cost->calls_per_token() > 0.0) {
    const double base = greedy->report.cost->calls_per_token();
    for (auto& r : rows) {
      const CostSummary& c = *r.report.cost;
      if (c.generated_tokens == 0) continue;
      const double w = r.summarizer == "distilled" ? options.distilled_call_weight : 1.0;
      const double tokens = static_cast<double>(c.generated_tokens);
      const double summ = w * static_cast<double>(c.summarization_calls);
      const double gen = static_cast<double>(c.generation_calls);
      r.ric = (gen + summ + static_cast<double>(c.lookahead_calls)) / tokens / base;
      if (r.strategy == "sumgd") r.ric_summarization_only = (gen + summ) / tokens / base;
    }
  }
  return rows;
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string ric_cell(const std::optional<double>& v) { return v ? fixed(*v, 2) : "-"; }

double fluency1(const MetricsReport& r) {
  const auto it = r.ngram_fluency.find(1);
  return it == r.ngram_fluency.end() ? 0.0 : 100.0 * it->second.mean_ratio;
}

}  // namespace

void write_compare_markdown(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "| Method | RIC | C_S | C_I | R | SPI | Fluency-1 | Calls | Calls/token |\n"
      << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    const auto& m = r.report;
    const auto& c = *m.cost;
    if (r.ric_summarization_only) {
      out << "| " << r.method << " |  |  |  |  |  |  |  |  |\n"
          << "| + Summarization | " << ric_cell(r.ric_summarization_only)
          << " | - | - | - | - | - | - | - |\n"
          << "| + Summarization + POS Tagging";
    } else {
      out << "| " << r.method;
    }
    out << " | " << ric_cell(r.ric) << " | " << fixed(100.0 * m.chair.chair_s, 1) << " | "
        << fixed(100.0 * m.chair.chair_i, 1) << " | " << fixed(100.0 * m.chair.recall, 1)
        << " | " << fixed(m.sentences.spi(), 2) << " | " << fixed(fluency1(m), 1) << " | "
        << c.backend_calls << " | " << fixed(c.calls_per_token(), 3) << " |\n";
  }
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "method,run_dir,ric,ric_summarization_only,chair_s,chair_i,recall,spi,fluency_1,"
         "backend_calls,generation_calls,lookahead_calls,summarization_calls,generated_tokens,"
         "calls_per_token\n";
  for (const auto& r : rows) {
    const auto& m = r.report;
    const auto& c = *m.cost;
    auto opt = [](const std::optional<double>& v) { return v ? fixed(*v, 6) : std::string(); };
    out << r.method << ',' << r.run_dir << ',' << opt(r.ric) << ','
        << opt(r.ric_summarization_only) << ',' << fixed(100.0 * m.chair.chair_s, 6) << ','
        << fixed(100.0 * m.chair.chair_i, 6) << ',' << fixed(100.0 * m.chair.recall, 6) << ','
        << fixed(m.sentences.spi(), 6) << ',' << fixed(fluency1(m), 6) << ',' << c.backend_calls
        << ',' << c.generation_calls << ',' << c.lookahead_calls << ',' << c.summarization_calls
        << ',' << c.generated_tokens << ',' << fixed(c.calls_per_token(), 6) << '\n';
  }
}

json compare_to_json(const std::vector<CompareRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"method", r.method},
                   {"run_dir", r.run_dir},
                   {"ric", r.ric ? json(*r.ric) : json(nullptr)},
                   {"ric_summarization_only",
                    r.ric_summarization_only ? json(*r.ric_summarization_only) : json(nullptr)},
                   {"report", to_json(r.report)}});
  }
  return {{"schema_version", 1}, {"rows", std::move(out)}};
}

}  // namespace sumgd
