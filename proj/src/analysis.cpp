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

#include "sumgd/analysis.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "sumgd/error.hpp"
#include "sumgd/text.hpp"

namespace sumgd {
namespace {

class PriorObserver : public DecodeObserver {
 public:
  PriorObserver(const Backend& backend, bool use_selection)
      : backend_(backend), use_selection_(use_selection) {}

  std::optional<double> on_step(const StepObservation& obs) override {
    if (obs.token == backend_.eos_token()) return std::nullopt;
    const StepResult text_only =
        backend_.next_distribution(obs.source_context->without_image());
    const TokenDistribution& p =
        use_selection_ ? *obs.selection_distribution : *obs.model_distribution;
    const double value = jsd(p, text_only.distribution);
    ProbeStep step;
    step.position = obs.position;
    step.token = obs.token;
    step.jsd = value;
    step.attention = obs.attention;
    steps.push_back(step);
    contrast.push_back(obs.contrast_distribution
                           ? std::optional<double>(
                                 jsd(*obs.model_distribution, *obs.contrast_distribution))
                           : std::nullopt);
    return value;
  }

  std::vector<ProbeStep> steps;
  std::vector<std::optional<double>> contrast;

 private:
  const Backend& backend_;
  bool use_selection_;
};

void require_image(const Backend& backend, const GenerationContext& ctx) {
  if (!backend.capabilities().supports_image || !ctx.image) {
    throw Error(ErrorCode::kImageUnsupported,
                "prior probing needs an image-conditioned context");
  }
}

// Assigns words and tags to probe steps from the decoded tokens.
void label_steps(const Backend& backend, const Tagger& tagger,
                 const std::vector<TokenId>& tokens, std::vector<ProbeStep>& steps) {
  const auto words = split_words(backend.detokenize(tokens));
  const auto tags = words.empty() ? std::vector<PosTag>{} : tagger.tag(words);
  std::vector<TokenId> prefix;
  for (auto& s : steps) {
    prefix.push_back(s.token);
    const std::size_t n = split_words(backend.detokenize(prefix)).size();
    s.word = backend.detokenize(std::span<const TokenId>(&s.token, 1));
    if (n > 0 && n <= tags.size()) s.pos_tag = tags[n - 1];
  }
}

std::vector<TokenId> emitted_tokens(const Backend& backend, const DecodeTrace& trace) {
  std::vector<TokenId> out;
  for (const auto& s : trace.steps) {
    if (s.token != backend.eos_token()) out.push_back(s.token);
  }
  return out;
}

}  // namespace

ProbeOutput probe_decode(const Backend& backend, const GenerationContext& ctx,
                         const DecodeConfig& cfg, const Tagger& tagger,
                         const DecodeResources& resources) {
  require_image(backend, ctx);
  PriorObserver observer(backend, false);
  ProbeOutput out;
  out.decode = decode(backend, ctx, cfg, resources, &observer);
  // Beam search reports only the chosen path, after the search ends.
  out.probe.steps = std::move(observer.steps);
  label_steps(backend, tagger, emitted_tokens(backend, out.decode.trace), out.probe.steps);
  return out;
}

std::map<PosTag, MeanValue> jsd_by_pos(const std::vector<PriorProbe>& probes,
                                       std::size_t window) {
  if (window == 0) throw Error(ErrorCode::kConfigError, "window must be >= 1");
  std::map<PosTag, MeanValue> out;
  for (const auto& p : probes) {
    for (const auto& s : p.steps) {
      if (s.position < window && s.pos_tag) out[*s.pos_tag].add(s.jsd);
    }
  }
  return out;
}

std::map<std::pair<PosTag, std::size_t>, MeanValue> jsd_by_pos_interval(
    const std::vector<PriorProbe>& probes, std::size_t interval) {
  if (interval == 0) throw Error(ErrorCode::kConfigError, "interval must be >= 1");
  std::map<std::pair<PosTag, std::size_t>, MeanValue> out;
  for (const auto& p : probes) {
    for (const auto& s : p.steps) {
      if (s.pos_tag) out[{*s.pos_tag, s.position / interval}].add(s.jsd);
    }
  }
  return out;
}

AttentionBalance attention_balance(const std::vector<PriorProbe>& probes,
                                   std::size_t interval) {
  if (interval == 0) throw Error(ErrorCode::kConfigError, "interval must be >= 1");
  std::map<std::size_t, AttentionInterval> buckets;
  for (const auto& p : probes) {
    for (const auto& s : p.steps) {
      if (!s.attention) continue;
      auto& b = buckets[s.position / interval];
      b.interval = s.position / interval;
      b.image_mass.add(s.attention->image_mass);
      b.text_mass.add(s.attention->text_mass);
    }
  }
  AttentionBalance out;
  for (const auto& [i, b] : buckets) out.intervals.push_back(b);
  if (out.intervals.empty()) {
    out.warning = "no attention data in probes; backend lacks the attention capability";
  }
  return out;
}

std::vector<MethodCurve> method_jsd_comparison(const Backend& backend,
                                               const GenerationContext& ctx,
                                               const std::vector<DecodeConfig>& methods,
                                               const DecodeResources& resources) {
  require_image(backend, ctx);
  std::vector<MethodCurve> curves;
  for (const auto& cfg : methods) {
    PriorObserver observer(backend, true);
    const DecodeOutput out = decode(backend, ctx, cfg, resources, &observer);
    MethodCurve c;
    c.method = cfg.label();
    c.text = out.text;
    std::vector<ProbeStep> steps = observer.steps;
    label_steps(backend, default_tagger(), emitted_tokens(backend, out.trace), steps);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      c.jsd_vs_llm.push_back(steps[i].jsd);
      c.primary_vs_contrast.push_back(observer.contrast[i]);
      c.pos_tags.push_back(steps[i].pos_tag);
      c.words.push_back(steps[i].word);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

nlohmann::json to_json(const ProbeStep& s) {
  nlohmann::json j = {{"record", "probe_step"},
                      {"position", s.position},
                      {"token", s.token},
                      {"word", s.word},
                      {"pos_tag", nullptr},
                      {"jsd", s.jsd},
                      {"attention", nullptr}};
  if (s.pos_tag) j["pos_tag"] = pos_tag_name(*s.pos_tag);
  if (s.attention) j["attention"] = {s.attention->image_mass, s.attention->text_mass};
  return j;
}

ProbeStep probe_step_from_json(const nlohmann::json& j) {
  ProbeStep s;
  s.position = j.at("position").get<std::size_t>();
  s.token = j.at("token").get<TokenId>();
  s.word = j.at("word").get<std::string>();
  if (!j.at("pos_tag").is_null()) {
    const auto tag = parse_pos_tag(j["pos_tag"].get<std::string>());
    if (!tag) throw Error(ErrorCode::kDataError, "unknown POS tag in probe");
    s.pos_tag = *tag;
  }
  s.jsd = j.at("jsd").get<double>();
  if (!j.at("attention").is_null()) {
    const auto a = j["attention"].get<std::vector<double>>();
    if (a.size() != 2) throw Error(ErrorCode::kDataError, "attention must be a pair");
    s.attention = Attention{a[0], a[1]};
  }
  return s;
}

void write_probe_jsonl(std::ostream& out, const nlohmann::json& header,
                       const PriorProbe& probe) {
  nlohmann::json head = header;
  head["record"] = "probe_header";
  head["schema_version"] = kProbeSchemaVersion;
  out << head.dump() << '\n';
  for (const auto& s : probe.steps) out << to_json(s).dump() << '\n';
}

PriorProbe read_probe_jsonl(std::istream& in) {
  PriorProbe probe;
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto kind = j.at("record").get<std::string>();
      if (kind == "probe_step") probe.steps.push_back(probe_step_from_json(j));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDataError, std::string("probe file: ") + e.what());
  }
  return probe;
}

PriorProbe read_probe_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kDataError, "cannot open " + path.string());
  return read_probe_jsonl(in);
}

void write_pos_csv(std::ostream& out, const std::map<PosTag, MeanValue>& table) {
  out << "pos_tag,mean_jsd,count\n";
  for (const auto& [tag, v] : table) {
    out << pos_tag_name(tag) << ',' << v.mean() << ',' << v.count << '\n';
  }
}

void write_pos_interval_csv(
    std::ostream& out, const std::map<std::pair<PosTag, std::size_t>, MeanValue>& table) {
  out << "pos_tag,interval,mean_jsd,count\n";
  for (const auto& [key, v] : table) {
    out << pos_tag_name(key.first) << ',' << key.second << ',' << v.mean() << ','
        << v.count << '\n';
  }
}

void write_attention_csv(std::ostream& out, const AttentionBalance& balance) {
  out << "interval,image_mass,text_mass,count\n";
  for (const auto& b : balance.intervals) {
    out << b.interval << ',' << b.image_mass.mean() << ',' << b.text_mass.mean() << ','
        << b.image_mass.count << '\n';
  }
}

void write_method_csv(std::ostream& out, const std::vector<MethodCurve>& curves) {
  out << "method,position,word,pos_tag,jsd_vs_llm,primary_vs_contrast\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.jsd_vs_llm.size(); ++i) {
      std::string word = c.words[i];
      if (word.find_first_of(",\"") != std::string::npos) {
        std::string quoted = "\"";
        for (char ch : word) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        word = quoted + "\"";
      }
      out << c.method << ',' << i << ',' << word << ','
          << (c.pos_tags[i] ? pos_tag_name(*c.pos_tags[i]) : std::string_view("")) << ','
          << c.jsd_vs_llm[i] << ',';
      if (c.primary_vs_contrast[i]) out << *c.primary_vs_contrast[i];
      out << '\n';
    }
  }
}

}  // namespace sumgd
