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

#include "sumgd/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sumgd/analysis.hpp"
#include "sumgd/decoders.hpp"
#include "sumgd/experiment.hpp"
#include "sumgd/metrics.hpp"
#include "sumgd/pos.hpp"
#include "sumgd/sentence.hpp"

#ifndef SUMGD_VERSION
#define SUMGD_VERSION "0.0.0"
#endif

namespace sumgd {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsageError:
      return kExitUsage;
    case ErrorCode::kConfigError:
    case ErrorCode::kInvalidTopP:
    case ErrorCode::kMissingContrastContext:
      return kExitConfig;
    case ErrorCode::kContextOverflow:
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kImageUnsupported:
    case ErrorCode::kCapabilityMissing:
    case ErrorCode::kUnnormalizedDistribution:
      return kExitBackend;
    default:
      return kExitData;
  }
}

namespace {

DecodeConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, path + ": " + e.what());
  }
  DecodeConfig cfg = decode_config_from_json(j);
  cfg.validate();
  return cfg;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kUsageError,
                  std::string(what) + ": '" + item + "' is not a positive integer");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kUsageError, std::string(what) + " is empty");
  return out;
}

// Writes to `path`, or to `out` for "-".
template <typename F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path == "-") {
    write(out);
    return;
  }
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kDataError, "cannot write " + path);
  write(f);
}

struct DecodeArgs {
  std::string config;
  std::string dataset;
  std::string backend = "synthetic";
  std::string summarizer_backend;
  std::string out;
  std::size_t jobs = 1;
  std::string max_new_tokens;
  std::string prompt;
  std::size_t limit = 0;
  bool probes = false;
  bool overwrite = false;
};

int cmd_decode(const DecodeArgs& a, std::ostream& out) {
  DecodeRunOptions opts;
  opts.config = load_config(a.config);
  opts.config_path = a.config;
  opts.backend_spec = a.backend;
  if (!a.summarizer_backend.empty()) opts.summarizer_backend_spec = a.summarizer_backend;
  opts.dataset_path = a.dataset;
  if (!a.prompt.empty()) opts.prompt = a.prompt;
  opts.jobs = a.jobs;
  opts.limit = a.limit;
  opts.write_probes = a.probes;
  opts.overwrite = a.overwrite;

  if (a.max_new_tokens.empty()) {
    opts.out_dir = a.out;
    const auto m = run_decode(opts);
    out << m.run_id << '\t' << a.out << '\n';
    return kExitOk;
  }
  const auto lengths = parse_size_list(a.max_new_tokens, "--max-new-tokens");
  if (lengths.size() == 1) {
    opts.config.max_new_tokens = lengths[0];
    opts.out_dir = a.out;
    const auto m = run_decode(opts);
    out << m.run_id << '\t' << a.out << '\n';
    return kExitOk;
  }
  json sweep = {{"schema_version", kManifestSchemaVersion}, {"runs", json::array()}};
  for (std::size_t n : lengths) {
    opts.config.max_new_tokens = n;
    const std::string sub = "len_" + std::to_string(n);
    opts.out_dir = fs::path(a.out) / sub;
    const auto m = run_decode(opts);
    sweep["runs"].push_back({{"max_new_tokens", n}, {"dir", sub}, {"run_id", m.run_id}});
    out << m.run_id << '\t' << opts.out_dir.string() << '\n';
  }
  emit((fs::path(a.out) / "sweep.json").string(), out,
       [&](std::ostream& o) { o << sweep.dump(2) << '\n'; });
  return kExitOk;
}

struct EvaluateArgs {
  std::string run;
  std::string captions;
  std::string annotations;
  std::string vocab;
  std::string method;
  std::size_t max_new_tokens = 0;
  std::string out;
  std::size_t bucket_width = kDefaultBucketWidth;
  std::string ngram = "1,2";
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  EvaluateOptions opts;
  opts.bucket_width = a.bucket_width;
  opts.ngram_orders = parse_size_list(a.ngram, "--ngram");
  if (opts.bucket_width == 0) throw Error(ErrorCode::kUsageError, "--bucket-width must be positive");

  MetricsReport report;
  std::string target = a.out;
  if (!a.run.empty()) {
    if (!a.captions.empty()) {
      throw Error(ErrorCode::kUsageError, "--run and --captions are mutually exclusive");
    }
    report = evaluate_run(a.run, opts);
    if (target.empty()) target = (fs::path(a.run) / "report.json").string();
  } else {
    if (a.captions.empty() || a.annotations.empty() || a.vocab.empty()) {
      throw Error(ErrorCode::kUsageError,
                  "evaluate needs --run, or --captions with --annotations and --vocab");
    }
    const auto vocab = ObjectVocabulary::load(a.vocab);
    const auto annotations = load_annotations(a.annotations, vocab);
    const auto captions = load_captions(a.captions);
    report = evaluate_corpus(captions, annotations, vocab, default_segmenter(), opts);
    const bool traced = !captions.empty() &&
                        std::all_of(captions.begin(), captions.end(),
                                    [](const CaptionRecord& c) { return c.trace_path.has_value(); });
    if (traced) report.cost = cost_from_traces(captions, fs::path(a.captions).parent_path());
    if (target.empty()) target = "-";
  }
  if (!a.method.empty()) report.method = a.method;
  if (a.max_new_tokens > 0) report.max_new_tokens = a.max_new_tokens;

  emit(target, out, [&](std::ostream& o) { o << to_json(report).dump(2) << '\n'; });
  if (target != "-") {
    out << "CHAIR_S " << 100.0 * report.chair.chair_s << "  CHAIR_I "
        << 100.0 * report.chair.chair_i << "  Recall " << 100.0 * report.chair.recall << "  -> "
        << target << '\n';
  }
  return kExitOk;
}

struct AnalyzeArgs {
  std::string mode;
  std::vector<std::string> probes;
  std::string run;
  std::string backend;
  std::string summarizer_backend;
  std::string dataset;
  std::vector<std::string> configs;
  std::string prompt;
  std::size_t limit = 0;
  std::size_t window = kDefaultAnalysisWindow;
  std::size_t interval = kDefaultAnalysisWindow;
  std::string out = "-";
};

std::vector<PriorProbe> probes_from_files(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> dir;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.path().extension() == ".jsonl") dir.push_back(e.path());
      }
      std::sort(dir.begin(), dir.end());
      files.insert(files.end(), dir.begin(), dir.end());
    } else {
      files.emplace_back(in);
    }
  }
  if (files.empty()) throw Error(ErrorCode::kDataError, "no probe files found");
  std::vector<PriorProbe> out;
  for (const auto& f : files) out.push_back(read_probe_file(f));
  return out;
}

struct LiveSetup {
  BackendHandle backend;
  std::optional<BackendHandle> summarizer_backend;
  Dataset dataset;
  std::string prompt;
};

LiveSetup live_setup(const AnalyzeArgs& a) {
  if (a.backend.empty() || a.dataset.empty()) {
    throw Error(ErrorCode::kUsageError,
                "analyze needs --probes/--run, or --backend with --dataset");
  }
  LiveSetup s{open_backend(a.backend), std::nullopt, load_dataset(a.dataset), ""};
  if (!a.summarizer_backend.empty()) s.summarizer_backend = open_backend(a.summarizer_backend);
  s.prompt = !a.prompt.empty() ? a.prompt : s.dataset.prompt.value_or(std::string(kDefaultPrompt));
  if (a.limit > 0 && a.limit < s.dataset.images.size()) s.dataset.images.resize(a.limit);
  return s;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kModes = {"pos", "pos-interval", "attention",
                                                  "method-compare"};
  if (std::find(kModes.begin(), kModes.end(), a.mode) == kModes.end()) {
    throw Error(ErrorCode::kUsageError, "unknown --mode '" + a.mode + "'");
  }
  if (a.window == 0 || a.interval == 0) {
    throw Error(ErrorCode::kUsageError, "--window and --interval must be positive");
  }

  if (a.mode == "method-compare") {
    if (a.configs.empty()) throw Error(ErrorCode::kUsageError, "method-compare needs --config");
    LiveSetup s = live_setup(a);
    std::vector<DecodeConfig> methods;
    for (const auto& c : a.configs) methods.push_back(load_config(c));
    std::map<std::string, std::unique_ptr<Summarizer>> summarizers;
    std::vector<std::string> order;
    std::map<std::pair<std::string, std::size_t>, MeanValue> curve;
    for (const auto& img : s.dataset.images) {
      const auto ctx = s.backend.backend->make_context(img.image, s.prompt);
      for (const auto& cfg : methods) {
        auto summarizer = make_summarizer(cfg, s.backend,
                                          s.summarizer_backend ? &*s.summarizer_backend : nullptr);
        const DecodeResources res{summarizer.get(), &default_tagger(), &default_segmenter()};
        const auto curves = method_jsd_comparison(*s.backend.backend, ctx, {cfg}, res);
        const auto& c = curves.front();
        if (std::find(order.begin(), order.end(), c.method) == order.end()) order.push_back(c.method);
        for (std::size_t t = 0; t < c.jsd_vs_llm.size(); ++t) curve[{c.method, t}].add(c.jsd_vs_llm[t]);
      }
    }
    emit(a.out, out, [&](std::ostream& o) {
      o << "method,position,mean_jsd_vs_llm,count\n";
      for (const auto& m : order) {
        for (auto it = curve.lower_bound({m, 0}); it != curve.end() && it->first.first == m; ++it) {
          o << m << ',' << it->first.second << ',' << it->second.mean() << ','
            << it->second.count << '\n';
        }
      }
    });
    return kExitOk;
  }

  std::vector<PriorProbe> probes;
  if (!a.probes.empty() || !a.run.empty()) {
    std::vector<std::string> inputs = a.probes;
    if (!a.run.empty()) inputs.push_back((fs::path(a.run) / "probes").string());
    probes = probes_from_files(inputs);
  } else {
    LiveSetup s = live_setup(a);
    if (a.mode == "attention" && !s.backend.backend->capabilities().supports_attention) {
      throw Error(ErrorCode::kCapabilityMissing,
                  "backend '" + a.backend + "' does not report attention");
    }
    if (a.configs.size() > 1) {
      throw Error(ErrorCode::kUsageError, "--mode " + a.mode + " takes at most one --config");
    }
    const DecodeConfig cfg = a.configs.empty() ? DecodeConfig{} : load_config(a.configs[0]);
    auto summarizer = make_summarizer(cfg, s.backend,
                                      s.summarizer_backend ? &*s.summarizer_backend : nullptr);
    const DecodeResources res{summarizer.get(), &default_tagger(), &default_segmenter()};
    for (const auto& img : s.dataset.images) {
      const auto ctx = s.backend.backend->make_context(img.image, s.prompt);
      probes.push_back(probe_decode(*s.backend.backend, ctx, cfg, default_tagger(), res).probe);
    }
  }

  if (a.mode == "pos") {
    const auto table = jsd_by_pos(probes, a.window);
    emit(a.out, out, [&](std::ostream& o) { write_pos_csv(o, table); });
  } else if (a.mode == "pos-interval") {
    const auto table = jsd_by_pos_interval(probes, a.interval);
    emit(a.out, out, [&](std::ostream& o) { write_pos_interval_csv(o, table); });
  } else {
    const auto balance = attention_balance(probes, a.interval);
    if (balance.warning) err << "warning: " << *balance.warning << '\n';
    emit(a.out, out, [&](std::ostream& o) { write_attention_csv(o, balance); });
  }
  return kExitOk;
}

struct CompareArgs {
  std::vector<std::string> runs;
  std::string format = "markdown";
  std::string out = "-";
  double distilled_call_weight = 1.0;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> dirs(a.runs.begin(), a.runs.end());
  CompareOptions opts;
  opts.distilled_call_weight = a.distilled_call_weight;
  const auto rows = compare_runs(dirs, opts);
  if (std::none_of(rows.begin(), rows.end(), [](const CompareRow& r) { return r.ric.has_value(); })) {
    err << "warning: no greedy run among the inputs; RIC left empty\n";
  }
  emit(a.out, out, [&](std::ostream& o) {
    if (a.format == "csv") {
      write_compare_csv(o, rows);
    } else if (a.format == "json") {
      o << compare_to_json(rows).dump(2) << '\n';
    } else {
      write_compare_markdown(o, rows);
    }
  });
  return kExitOk;
}

int cmd_backend_check(const std::string& spec, std::ostream& out) {
  const BackendHandle h = open_backend(spec);
  const Backend& b = *h.backend;
  const auto caps = b.capabilities();
  json report = {{"backend", spec},
                 {"capabilities", capabilities_to_wire(caps, b.eos_token())}};
  const std::string sample = "a cat sits on a red chair .";
  const auto tokens = b.tokenize(sample);
  report["tokenize_round_trip"] = b.detokenize(tokens);
  std::optional<std::string> image;
  if (caps.supports_image) image = "backend-check";
  const auto ctx = b.make_context(image, std::string(kDefaultPrompt));
  const auto step = b.next_distribution(ctx, 5);
  json top = json::array();
  for (const auto& e : step.distribution.ranked()) {
    top.push_back({{"token", e.token},
                   {"text", b.detokenize(std::vector<TokenId>{e.token})},
                   {"prob", e.prob}});
  }
  report["top_5"] = std::move(top);
  report["residual"] = step.distribution.residual();
  report["attention"] = step.attention ? json{{"image_mass", step.attention->image_mass},
                                              {"text_mass", step.attention->text_mass}}
                                       : json(nullptr);
  out << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Summary-guided decoding engine for vision-language models", "sumgd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SUMGD_VERSION);

  DecodeArgs da;
  auto* decode = app.add_subcommand("decode", "Decode every image of a dataset");
  decode->add_option("--config", da.config, "Decode config JSON")->required();
  decode->add_option("--dataset", da.dataset, "Dataset JSON")->required();
  decode->add_option("--backend", da.backend,
                     "scripted:<file> | ngram:<file> | synthetic[:<file>] | http[:<url>]")
      ->capture_default_str();
  decode->add_option("--summarizer-backend", da.summarizer_backend,
                     "Backend for the distilled summarizer");
  decode->add_option("--out", da.out, "Run directory")->required();
  decode->add_option("--jobs", da.jobs, "Parallel decodes")->capture_default_str()->check(CLI::PositiveNumber);
  decode->add_option("--max-new-tokens", da.max_new_tokens,
                     "Override the token limit; a comma list runs a sweep into len_<N>/");
  decode->add_option("--prompt", da.prompt, "Instruction prompt (default: dataset, then built-in)");
  decode->add_option("--limit", da.limit, "Decode only the first N images (0 = all)")->capture_default_str();
  decode->add_flag("--probes", da.probes, "Also write image-free probe files for analyze");
  decode->add_flag("--overwrite", da.overwrite, "Replace an existing run in --out");

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "Compute CHAIR, SPI and fluency for captions");
  evaluate->add_option("--run", ea.run, "Run directory (writes report.json there)");
  evaluate->add_option("--captions", ea.captions, "Captions JSONL");
  evaluate->add_option("--annotations", ea.annotations, "Annotations JSON");
  evaluate->add_option("--vocab", ea.vocab, "Object vocabulary JSON");
  evaluate->add_option("--method", ea.method, "Method label for the report");
  evaluate->add_option("--max-new-tokens", ea.max_new_tokens, "Token limit recorded in the report");
  evaluate->add_option("--out", ea.out, "Report path, '-' for stdout");
  evaluate->add_option("--bucket-width", ea.bucket_width, "Word positions per bucket")->capture_default_str();
  evaluate->add_option("--ngram", ea.ngram, "Comma list of n-gram orders")->capture_default_str();

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Language-prior analyses as CSV");
  analyze->add_option("--mode", aa.mode, "pos | pos-interval | attention | method-compare")->required();
  analyze->add_option("--probes", aa.probes, "Probe JSONL files or directories");
  analyze->add_option("--run", aa.run, "Run directory decoded with --probes");
  analyze->add_option("--backend", aa.backend, "Backend spec for live analysis");
  analyze->add_option("--summarizer-backend", aa.summarizer_backend, "Backend for the distilled summarizer");
  analyze->add_option("--dataset", aa.dataset, "Dataset JSON for live analysis");
  analyze->add_option("--config", aa.configs, "Decode config (repeat for method-compare)");
  analyze->add_option("--prompt", aa.prompt, "Instruction prompt");
  analyze->add_option("--limit", aa.limit, "Only the first N images (0 = all)")->capture_default_str();
  analyze->add_option("--window", aa.window, "Positions averaged in pos mode")->capture_default_str();
  analyze->add_option("--interval", aa.interval, "Positions per interval")->capture_default_str();
  analyze->add_option("--out", aa.out, "CSV path, '-' for stdout")->capture_default_str();

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Side-by-side table of evaluated runs");
  compare->add_option("runs", ca.runs, "Run directories")->required();
  compare->add_option("--format", ca.format, "markdown | csv | json")
      ->capture_default_str()
      ->check(CLI::IsMember({"markdown", "csv", "json"}));
  compare->add_option("--out", ca.out, "Output path, '-' for stdout")->capture_default_str();
  compare->add_option("--distilled-call-weight", ca.distilled_call_weight,
                      "Cost of one distilled-summarizer call in generation calls")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  std::string check_spec = "http";
  auto* check = app.add_subcommand("backend-check", "Query a backend once and print what it reports");
  check->add_option("--backend", check_spec, "Backend spec")->capture_default_str();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*decode) return cmd_decode(da, out);
    if (*evaluate) return cmd_evaluate(ea, out);
    if (*analyze) return cmd_analyze(aa, out, err);
    if (*compare) return cmd_compare(ca, out, err);
    return cmd_backend_check(check_spec, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace sumgd
