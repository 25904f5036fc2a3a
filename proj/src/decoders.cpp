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

#include "sumgd/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "sumgd/error.hpp"
#include "sumgd/lookahead.hpp"
#include "sumgd/simd/kernels.hpp"
#include "sumgd/text.hpp"

namespace sumgd {
namespace {

std::string surface(const Backend& backend, TokenId token) {
  if (token == backend.eos_token()) return {};
  return backend.detokenize(std::span<const TokenId>(&token, 1));
}

std::string text_of(const Backend& backend, const std::vector<TokenId>& generated) {
  std::vector<TokenId> body;
  body.reserve(generated.size());
  for (TokenId t : generated) {
    if (t != backend.eos_token()) body.push_back(t);
  }
  return backend.detokenize(body);
}

StepRecord make_step(const Backend& backend, std::size_t position, TokenId token,
                     StepSource source) {
  StepRecord s;
  s.position = position;
  s.token = token;
  s.word = surface(backend, token);
  s.source = source;
  s.eos = token == backend.eos_token();
  return s;
}

void finish_step(StepRecord& s) {
  s.backend_calls = s.generation_calls + s.lookahead_calls + s.summarization_calls;
}

std::optional<double> observe(DecodeObserver* observer, std::size_t position,
                              TokenId token, const GenerationContext& source,
                              const TokenDistribution& model,
                              const TokenDistribution& selection,
                              const TokenDistribution* contrast,
                              const std::optional<Attention>& attention) {
  if (observer == nullptr) return std::nullopt;
  StepObservation obs;
  obs.position = position;
  obs.token = token;
  obs.source_context = &source;
  obs.model_distribution = &model;
  obs.selection_distribution = &selection;
  obs.contrast_distribution = contrast;
  obs.attention = attention;
  return observer->on_step(obs);
}

// Holds either a reference to the raw distribution or a penalized copy.
class Penalized {
 public:
  Penalized(const TokenDistribution& raw, std::span<const TokenId> generated,
            double penalty) {
    if (penalty == 1.0 || generated.empty()) {
      ptr_ = &raw;
    } else {
      owned_ = apply_repetition_penalty(raw, generated, penalty);
      ptr_ = &owned_;
    }
  }
  const TokenDistribution& get() const { return *ptr_; }

 private:
  TokenDistribution owned_;
  const TokenDistribution* ptr_ = nullptr;
};

std::span<const TokenId> generated_part(const GenerationContext& cur,
                                        const GenerationContext& start) {
  return std::span<const TokenId>(cur.history).subspan(start.history.size());
}

}  // namespace

TokenDistribution apply_repetition_penalty(const TokenDistribution& dist,
                                           std::span<const TokenId> generated,
                                           double penalty) {
  if (penalty == 1.0) return dist;
  std::vector<TokenDistribution::Entry> entries;
  entries.reserve(dist.size());
  std::vector<double> probs(dist.probs().begin(), dist.probs().end());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const TokenId t = dist.tokens()[i];
    if (probs[i] > 0.0 &&
        std::find(generated.begin(), generated.end(), t) != generated.end()) {
      probs[i] = std::exp(std::log(probs[i]) * penalty);
    }
  }
  const double residual = dist.residual();
  const double total = simd::sum(probs) + residual;
  simd::scale(probs, 1.0 / total);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    entries.push_back({dist.tokens()[i], probs[i]});
  }
  return TokenDistribution::from_unnormalized(std::move(entries), dist.vocab_size(),
                                              residual / total,
                                              kNormalizationTolerance);
}

DecodeOutput decode_greedy(const Backend& backend, const GenerationContext& ctx,
                           const DecodeConfig& cfg, DecodeObserver* observer) {
  DecodeOutput out;
  GenerationContext cur = ctx;
  for (std::size_t t = 0; t < cfg.max_new_tokens; ++t) {
    const StepResult r = backend.next_distribution(cur, cfg.top_k);
    const Penalized dist(r.distribution, generated_part(cur, ctx), cfg.repetition_penalty);
    const TokenId token = argmax_token(dist.get());
    StepRecord step = make_step(backend, t, token, StepSource::kNotApplicable);
    step.generation_calls = r.calls_consumed;
    finish_step(step);
    step.jsd_vs_llm = observe(observer, t, token, cur, r.distribution, dist.get(),
                              nullptr, r.attention);
    out.trace.push(std::move(step));
    if (token == backend.eos_token()) break;
    cur.history.push_back(token);
  }
  out.text = text_of(backend, cur.history);
  return out;
}

DecodeOutput decode_nucleus(const Backend& backend, const GenerationContext& ctx,
                            const DecodeConfig& cfg, DecodeObserver* observer) {
  if (!(cfg.top_p > 0.0 && cfg.top_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidTopP, "top_p must lie in (0, 1]");
  }
  DecodeOutput out;
  GenerationContext cur = ctx;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t t = 0; t < cfg.max_new_tokens; ++t) {
    const StepResult r = backend.next_distribution(cur, cfg.top_k);
    const Penalized dist(r.distribution, generated_part(cur, ctx), cfg.repetition_penalty);
    const TokenDistribution nucleus = nucleus_filter(dist.get(), cfg.top_p);

    // 53 random bits give a uniform double in [0, 1); truncated mass is
    // never sampled.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 *
                     (1.0 - nucleus.residual());
    const auto ranked = nucleus.ranked();
    TokenId token = ranked.back().token;
    double cumulative = 0.0;
    for (const auto& e : ranked) {
      cumulative += e.prob;
      if (u < cumulative) {
        token = e.token;
        break;
      }
    }
    StepRecord step = make_step(backend, t, token, StepSource::kNotApplicable);
    step.generation_calls = r.calls_consumed;
    finish_step(step);
    step.jsd_vs_llm = observe(observer, t, token, cur, r.distribution, nucleus,
                              nullptr, r.attention);
    out.trace.push(std::move(step));
    if (token == backend.eos_token()) break;
    cur.history.push_back(token);
  }
  out.text = text_of(backend, cur.history);
  return out;
}

namespace {

struct BeamNode {
  std::shared_ptr<const BeamNode> parent;
  TokenId token = 0;
  std::size_t depth = 0;
  // Distribution the token was chosen from, kept for observers.
  std::shared_ptr<const StepResult> result;
  std::shared_ptr<const TokenDistribution> scored;
};

struct Hypothesis {
  std::shared_ptr<const BeamNode> node;
  std::vector<TokenId> tokens;
  double score = 0.0;
};

struct Candidate {
  double score;
  double step_prob;
  std::size_t beam;
  TokenId token;
};

}  // namespace

DecodeOutput decode_beam(const Backend& backend, const GenerationContext& ctx,
                         const DecodeConfig& cfg, DecodeObserver* observer) {
  if (cfg.num_beams == 0) throw Error(ErrorCode::kConfigError, "num_beams must be >= 1");
  DecodeOutput out;
  std::vector<Hypothesis> live(1);
  std::vector<Hypothesis> finished;
  std::vector<std::size_t> calls_at_depth;

  for (std::size_t depth = 0; depth < cfg.max_new_tokens && !live.empty(); ++depth) {
    calls_at_depth.push_back(0);
    std::vector<Candidate> candidates;
    std::vector<std::shared_ptr<const StepResult>> results;
    std::vector<std::shared_ptr<const TokenDistribution>> scored;
    for (std::size_t b = 0; b < live.size(); ++b) {
      GenerationContext cur = ctx;
      cur.history.insert(cur.history.end(), live[b].tokens.begin(), live[b].tokens.end());
      auto r = std::make_shared<const StepResult>(backend.next_distribution(cur, cfg.top_k));
      calls_at_depth[depth] += r->calls_consumed;
      auto dist = std::make_shared<const TokenDistribution>(
          cfg.repetition_penalty == 1.0
              ? r->distribution
              : apply_repetition_penalty(r->distribution, live[b].tokens,
                                         cfg.repetition_penalty));
      for (std::size_t i = 0; i < dist->size(); ++i) {
        const double p = dist->probs()[i];
        if (p <= 0.0) continue;
        candidates.push_back({live[b].score + std::log(p), p, b, dist->tokens()[i]});
      }
      results.push_back(std::move(r));
      scored.push_back(std::move(dist));
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.score != b.score) return a.score > b.score;
                if (a.step_prob != b.step_prob) return a.step_prob > b.step_prob;
                if (a.beam != b.beam) return a.beam < b.beam;
                return a.token < b.token;
              });
    std::vector<Hypothesis> next;
    const std::size_t take = std::min(cfg.num_beams, candidates.size());
    for (std::size_t c = 0; c < take; ++c) {
      const Candidate& cand = candidates[c];
      const Hypothesis& parent = live[cand.beam];
      auto node = std::make_shared<BeamNode>();
      node->parent = parent.node;
      node->token = cand.token;
      node->depth = depth;
      node->result = results[cand.beam];
      node->scored = scored[cand.beam];
      Hypothesis h{std::move(node), parent.tokens, cand.score};
      h.tokens.push_back(cand.token);
      if (cand.token == backend.eos_token()) {
        finished.push_back(std::move(h));
      } else {
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
  }

  std::vector<Hypothesis> pool = std::move(finished);
  for (auto& h : live) {
    if (h.node) pool.push_back(std::move(h));
  }
  if (pool.empty()) return out;
  std::size_t best = 0;
  auto normalized = [](const Hypothesis& h) {
    return h.score / static_cast<double>(h.tokens.size());
  };
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (normalized(pool[i]) > normalized(pool[best])) best = i;
  }

  std::vector<const BeamNode*> path;
  for (const BeamNode* n = pool[best].node.get(); n != nullptr; n = n->parent.get()) {
    path.push_back(n);
  }
  std::reverse(path.begin(), path.end());

  GenerationContext cur = ctx;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const BeamNode& n = *path[i];
    StepRecord step = make_step(backend, i, n.token, StepSource::kNotApplicable);
    step.generation_calls = calls_at_depth[i];
    if (i + 1 == path.size()) {
      // Hypotheses that outlived the chosen one were paid for too.
      for (std::size_t d = i + 1; d < calls_at_depth.size(); ++d) {
        step.generation_calls += calls_at_depth[d];
      }
    }
    finish_step(step);
    step.jsd_vs_llm = observe(observer, i, n.token, cur, n.result->distribution,
                              *n.scored, nullptr, n.result->attention);
    out.trace.push(std::move(step));
    if (n.token != backend.eos_token()) cur.history.push_back(n.token);
  }
  out.text = text_of(backend, pool[best].tokens);
  return out;
}

GenerationContext contrast_context(const Backend& backend,
                                   const GenerationContext& ctx,
                                   const ContrastSpec& spec) {
  switch (spec.mode) {
    case ContrastMode::kDistortedImage: {
      if (!ctx.image) {
        throw Error(ErrorCode::kMissingContrastContext,
                    "distorted-image contrast needs an image");
      }
      GenerationContext c = ctx;
      c.image = spec.contrast_image.empty() ? *ctx.image + "#distorted"
                                            : spec.contrast_image;
      return c;
    }
    case ContrastMode::kModifiedInstruction: {
      if (spec.contrast_instruction.empty()) {
        throw Error(ErrorCode::kMissingContrastContext,
                    "modified-instruction contrast needs contrast_instruction");
      }
      GenerationContext c = ctx;
      c.prompt_text = spec.contrast_instruction;
      c.prompt = backend.tokenize(spec.contrast_instruction);
      return c;
    }
    case ContrastMode::kNoImage:
      if (!ctx.image) {
        throw Error(ErrorCode::kMissingContrastContext,
                    "no-image contrast needs an image to drop");
      }
      return ctx.without_image();
  }
  throw Error(ErrorCode::kConfigError, "unknown contrast mode");
}

double contrast_alpha(const ContrastSpec& spec, std::size_t t,
                      std::size_t max_new_tokens) {
  if (spec.alpha_schedule == AlphaSchedule::kConstant || max_new_tokens == 0) {
    return spec.alpha;
  }
  return spec.alpha * static_cast<double>(t) / static_cast<double>(max_new_tokens);
}

DecodeOutput decode_contrastive(const Backend& backend,
                                const GenerationContext& ctx,
                                const DecodeConfig& cfg, DecodeObserver* observer) {
  if (!cfg.contrast) {
    throw Error(ErrorCode::kMissingContrastContext, "no contrast spec configured");
  }
  const ContrastSpec& spec = *cfg.contrast;
  const GenerationContext contrast_start = contrast_context(backend, ctx, spec);
  DecodeOutput out;
  GenerationContext cur = ctx;
  GenerationContext contrast = contrast_start;

  std::vector<double> log_p;
  std::vector<double> log_q;
  std::vector<double> scores;
  for (std::size_t t = 0; t < cfg.max_new_tokens; ++t) {
    const StepResult rp = backend.next_distribution(cur, cfg.top_k);
    const StepResult rq = backend.next_distribution(contrast, cfg.top_k);
    const Penalized primary(rp.distribution, generated_part(cur, ctx),
                            cfg.repetition_penalty);
    const TokenDistribution& p = primary.get();
    const TokenDistribution& q = rq.distribution;
    const double alpha = contrast_alpha(spec, t + 1, cfg.max_new_tokens);

    TokenId token;
    TokenDistribution selection;
    if (alpha == 0.0) {
      token = argmax_token(p);
      selection = p;
    } else {
      if (p.empty()) throw Error(ErrorCode::kEmptyDistribution, "empty primary distribution");
      const double max_p = p.probs()[simd::argmax(p.probs())];
      // Mass the contrast distribution truncated away, spread evenly.
      const std::size_t unseen = q.vocab_size() > q.size() ? q.vocab_size() - q.size() : 1;
      const double q_unseen = std::max(q.residual() / static_cast<double>(unseen),
                                       kProbabilityFloor);
      std::vector<TokenId> ids;
      log_p.clear();
      log_q.clear();
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p.probs()[i];
        if (pi <= 0.0 || pi < spec.plausibility_cutoff * max_p) continue;
        const TokenId id = p.tokens()[i];
        ids.push_back(id);
        log_p.push_back(std::log(pi));
        const double qi = q.contains(id) ? q.prob(id) : q_unseen;
        log_q.push_back(std::log(std::max(qi, kProbabilityFloor)));
      }
      scores.resize(ids.size());
      simd::weighted_difference(log_p, log_q, 1.0 + alpha, alpha, scores);
      token = ids[simd::argmax(scores)];

      std::vector<double> weights(scores.size());
      const double top = *std::max_element(scores.begin(), scores.end());
      for (std::size_t i = 0; i < scores.size(); ++i) weights[i] = std::exp(scores[i] - top);
      simd::scale(weights, 1.0 / simd::sum(weights));
      std::vector<TokenDistribution::Entry> entries;
      for (std::size_t i = 0; i < ids.size(); ++i) entries.push_back({ids[i], weights[i]});
      selection = TokenDistribution::from_unnormalized(std::move(entries), p.vocab_size(),
                                                       0.0, kNormalizationTolerance);
    }

    StepRecord step = make_step(backend, t, token, StepSource::kContrastive);
    step.generation_calls = rp.calls_consumed + rq.calls_consumed;
    finish_step(step);
    step.jsd_vs_llm = observe(observer, t, token, cur, rp.distribution, selection,
                              &rq.distribution, rp.attention);
    out.trace.push(std::move(step));
    if (token == backend.eos_token()) break;
    cur.history.push_back(token);
    contrast.history.push_back(token);
  }
  out.text = text_of(backend, cur.history);
  return out;
}

DecodeOutput decode_sumgd(const Backend& backend, const Summarizer& summarizer,
                          const Tagger& tagger, const GenerationContext& ctx,
                          const DecodeConfig& cfg, DecodeObserver* observer,
                          const SentenceSegmenter& segmenter) {
  const SumgdSpec spec = cfg.sumgd.value_or(SumgdSpec{});
  const bool summary_first = spec.routing == Routing::kSummaryFirst;
  DecodeOutput out;

  // FULL history = completed + sentence; SUMMARY history = summary + sentence.
  std::vector<TokenId> completed = ctx.history;
  std::vector<TokenId> summary_tokens = ctx.history;
  std::vector<TokenId> sentence;
  std::vector<TokenId> generated;
  SummaryState state;

  auto with_history = [&](const std::vector<TokenId>& prefix) {
    GenerationContext c = ctx;
    c.history = prefix;
    c.history.insert(c.history.end(), sentence.begin(), sentence.end());
    return c;
  };

  for (std::size_t t = 0; t < cfg.max_new_tokens; ++t) {
    const GenerationContext full = with_history(completed);
    const GenerationContext summary = with_history(summary_tokens);
    const bool same = full.history == summary.history;
    StepRecord step;

    auto query = [&](const GenerationContext& c) {
      StepResult r = backend.next_distribution(c, cfg.top_k);
      step.generation_calls += r.calls_consumed;
      return r;
    };

    const GenerationContext* source_ctx = nullptr;
    StepSource source = StepSource::kSummary;
    std::optional<PosTag> tag;
    StepResult chosen;

    if (spec.pos_scope == PosScope::kAll) {
      chosen = query(summary);
      source_ctx = &summary;
    } else {
      const GenerationContext& propose_ctx = summary_first ? summary : full;
      const GenerationContext& other_ctx = summary_first ? full : summary;
      StepResult proposed = query(propose_ctx);
      const TokenId candidate =
          argmax_token(Penalized(proposed.distribution, generated, cfg.repetition_penalty).get());
      const LookaheadResult la =
          lookahead_pos(backend, tagger, propose_ctx, candidate, sentence.size(),
                        spec.max_lookahead_tokens, cfg.top_k);
      step.lookahead_calls = la.backend_calls;
      tag = la.tag;
      const bool to_summary = is_image_related(la.tag);
      source = to_summary ? StepSource::kSummary : StepSource::kFull;
      if (to_summary == summary_first) {
        chosen = std::move(proposed);
        source_ctx = &propose_ctx;
      } else {
        chosen = same ? std::move(proposed) : query(other_ctx);
        source_ctx = &other_ctx;
      }
    }

    const Penalized dist(chosen.distribution, generated, cfg.repetition_penalty);
    const TokenId token = argmax_token(dist.get());
    StepRecord record = make_step(backend, t, token, source);
    record.pos_tag = tag;
    record.generation_calls = step.generation_calls;
    record.lookahead_calls = step.lookahead_calls;
    record.jsd_vs_llm = observe(observer, t, token, *source_ctx, chosen.distribution,
                                dist.get(), nullptr, chosen.attention);

    if (token != backend.eos_token()) {
      generated.push_back(token);
      sentence.push_back(token);
      const std::string sentence_text = backend.detokenize(sentence);
      if (segmenter.sentence_boundary(sentence_text)) {
        completed.insert(completed.end(), sentence.begin(), sentence.end());
        sentence.clear();
        const std::string full_text = backend.detokenize(generated);
        const std::string input =
            spec.summary_scope == SummaryScope::kFull ? full_text : trim(sentence_text);
        try {
          const SummaryResult r = summarizer.summarize(input);
          record.summarization_calls += r.backend_calls;
          if (spec.summary_scope == SummaryScope::kFull || state.summary_text.empty()) {
            state.summary_text = r.text;
          } else {
            state.summary_text += " " + r.text;
          }
        } catch (const EmptySummaryError& e) {
          // The previous summary stays in force.
          record.summarization_calls += e.backend_calls();
        }
        ++state.revision;
        state.source_char_len = full_text.size();
        state.summary_char_len = state.summary_text.size();
        out.trace.summaries.push_back(state);
        summary_tokens = ctx.history;
        const auto toks = backend.tokenize(state.summary_text);
        summary_tokens.insert(summary_tokens.end(), toks.begin(), toks.end());
      }
    }
    finish_step(record);
    out.trace.push(std::move(record));
    if (token == backend.eos_token()) break;
  }
  out.text = text_of(backend, generated);
  return out;
}

DecodeOutput decode(const Backend& backend, const GenerationContext& ctx,
                    const DecodeConfig& cfg, const DecodeResources& resources,
                    DecodeObserver* observer) {
  switch (cfg.strategy) {
    case Strategy::kGreedy:
      return decode_greedy(backend, ctx, cfg, observer);
    case Strategy::kNucleus:
      return decode_nucleus(backend, ctx, cfg, observer);
    case Strategy::kBeam:
      return decode_beam(backend, ctx, cfg, observer);
    case Strategy::kContrastive:
      return decode_contrastive(backend, ctx, cfg, observer);
    case Strategy::kSumgd:
      if (resources.summarizer == nullptr || resources.tagger == nullptr) {
        throw Error(ErrorCode::kConfigError, "sumgd needs a summarizer and a tagger");
      }
      return decode_sumgd(backend, *resources.summarizer, *resources.tagger, ctx, cfg,
                          observer,
                          resources.segmenter ? *resources.segmenter : default_segmenter());
  }
  throw Error(ErrorCode::kConfigError, "unknown strategy");
}

}  // namespace sumgd
