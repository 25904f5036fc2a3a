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

#include "sumgd/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "sumgd/error.hpp"
#include "sumgd/simd/kernels.hpp"

namespace sumgd {
namespace {

void check_normalized(const TokenDistribution& d, const char* which) {
  const double total = simd::sum(d.probs()) + d.residual();
  if (d.empty() || std::abs(total - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorCode::kUnnormalizedDistribution,
                std::string(which) + " sums to " + std::to_string(total));
  }
}

// p * ln(p / q) with the probability floor applied to p.
double kl_term(double p, double q) {
  if (p < kProbabilityFloor) return 0.0;
  if (q < kProbabilityFloor) {
    throw Error(ErrorCode::kInfiniteDivergence,
                "p has mass where q has none");
  }
  return p * std::log(p / q);
}

// Contribution of one support element to 2 * JSD. Symmetric in (a, b) bit for
// bit: both the mixture and the final addition are commutative.
double jsd_term(double a, double b) {
  const double m = 0.5 * (a + b);
  const double ta = a < kProbabilityFloor ? 0.0 : a * std::log(a / m);
  const double tb = b < kProbabilityFloor ? 0.0 : b * std::log(b / m);
  return ta + tb;
}

// Walks the union of both supports in id order, calling fn(p_x, q_x).
template <typename Fn>
void for_each_union(const TokenDistribution& p, const TokenDistribution& q,
                    Fn&& fn) {
  const auto pt = p.tokens();
  const auto pp = p.probs();
  const auto qt = q.tokens();
  const auto qp = q.probs();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < pt.size() || j < qt.size()) {
    if (j == qt.size() || (i < pt.size() && pt[i] < qt[j])) {
      fn(pp[i], 0.0);
      ++i;
    } else if (i == pt.size() || qt[j] < pt[i]) {
      fn(0.0, qp[j]);
      ++j;
    } else {
      fn(pp[i], qp[j]);
      ++i;
      ++j;
    }
  }
}

}  // namespace

TokenDistribution TokenDistribution::from_entries(std::vector<Entry> entries,
                                                  std::size_t vocab_size,
                                                  double residual) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.token < b.token; });
  TokenDistribution d;
  d.vocab_size_ = vocab_size;
  d.residual_ = residual;
  d.tokens_.reserve(entries.size());
  d.probs_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].token == entries[i - 1].token) {
      throw Error(ErrorCode::kDataError,
                  "duplicate token id " + std::to_string(entries[i].token));
    }
    if (!(entries[i].prob >= 0.0) || entries[i].token < 0) {
      throw Error(ErrorCode::kUnnormalizedDistribution,
                  "negative probability or token id");
    }
    d.tokens_.push_back(entries[i].token);
    d.probs_.push_back(entries[i].prob);
  }
  if (!(residual >= 0.0)) {
    throw Error(ErrorCode::kUnnormalizedDistribution, "negative residual");
  }
  check_normalized(d, "distribution");
  return d;
}

TokenDistribution TokenDistribution::from_unnormalized(
    std::vector<Entry> entries, std::size_t vocab_size, double residual,
    double tolerance) {
  double total = residual;
  for (const Entry& e : entries) total += e.prob;
  if (!(std::abs(total - 1.0) <= tolerance)) {
    throw Error(ErrorCode::kUnnormalizedDistribution,
                "mass " + std::to_string(total) + " outside tolerance");
  }
  for (Entry& e : entries) e.prob /= total;
  return from_entries(std::move(entries), vocab_size, residual / total);
}

TokenDistribution TokenDistribution::from_weights(
    std::span<const double> weights, std::size_t top_k) {
  std::vector<double> probs(weights.begin(), weights.end());
  const double total = simd::sum(probs);
  if (probs.empty() || !(total > 0.0)) {
    throw Error(ErrorCode::kEmptyDistribution, "weights carry no mass");
  }
  simd::scale(probs, 1.0 / total);

  std::vector<TokenId> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  if (top_k > 0 && top_k < order.size()) {
    auto by_rank = [&](TokenId a, TokenId b) {
      return probs[a] > probs[b] || (probs[a] == probs[b] && a < b);
    };
    std::nth_element(order.begin(), order.begin() + top_k, order.end(),
                     by_rank);
    order.resize(top_k);
    std::sort(order.begin(), order.end());
  }

  TokenDistribution d;
  d.vocab_size_ = weights.size();
  std::vector<bool> kept(probs.size(), order.size() == probs.size());
  for (TokenId id : order) {
    if (probs[id] <= 0.0) continue;
    kept[id] = true;
    d.tokens_.push_back(id);
    d.probs_.push_back(probs[id]);
  }
  double dropped = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!kept[i]) dropped += probs[i];
  }
  d.residual_ = dropped;
  check_normalized(d, "weights");
  return d;
}

double TokenDistribution::prob(TokenId token) const {
  const auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token);
  if (it == tokens_.end() || *it != token) return 0.0;
  return probs_[static_cast<std::size_t>(it - tokens_.begin())];
}

bool TokenDistribution::contains(TokenId token) const {
  return std::binary_search(tokens_.begin(), tokens_.end(), token);
}

std::vector<TokenDistribution::Entry> TokenDistribution::ranked() const {
  std::vector<Entry> out;
  out.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out.push_back({tokens_[i], probs_[i]});
  }
  std::stable_sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    return a.prob > b.prob;
  });
  return out;
}

double kl_divergence(const TokenDistribution& p, const TokenDistribution& q) {
  check_normalized(p, "p");
  check_normalized(q, "q");
  double total = 0.0;
  for_each_union(p, q, [&](double a, double b) { total += kl_term(a, b); });
  total += kl_term(p.residual(), q.residual());
  return std::max(total, 0.0);
}

double jsd(const TokenDistribution& p, const TokenDistribution& q) {
  check_normalized(p, "p");
  check_normalized(q, "q");
  double total = 0.0;
  for_each_union(p, q, [&](double a, double b) { total += jsd_term(a, b); });
  total += jsd_term(p.residual(), q.residual());
  return std::clamp(0.5 * total, 0.0, std::numbers::ln2);
}

TokenId argmax_token(const TokenDistribution& p) {
  if (p.empty()) {
    throw Error(ErrorCode::kEmptyDistribution, "argmax of empty distribution");
  }
  return p.tokens()[simd::argmax(p.probs())];
}

TokenDistribution nucleus_filter(const TokenDistribution& p, double top_p) {
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidTopP, "top_p must lie in (0, 1]");
  }
  if (p.empty()) {
    throw Error(ErrorCode::kEmptyDistribution, "nucleus of empty distribution");
  }
  if (top_p == 1.0) return p;

  std::vector<TokenDistribution::Entry> kept;
  double cumulative = 0.0;
  for (const auto& e : p.ranked()) {
    kept.push_back(e);
    cumulative += e.prob;
    // Slack for rounding in the running sum, e.g. 0.6 + 0.3 < 0.9.
    if (cumulative >= top_p - 1e-12) break;
  }
  std::vector<double> probs;
  probs.reserve(kept.size());
  for (const auto& e : kept) probs.push_back(e.prob);
  simd::scale(probs, 1.0 / simd::sum(probs));
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].prob = probs[i];
  return TokenDistribution::from_entries(std::move(kept), p.vocab_size());
}

}  // namespace sumgd
