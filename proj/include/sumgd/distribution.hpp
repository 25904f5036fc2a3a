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

// Sparse next-token distributions and the divergences computed over them.
//
// All divergences are in nats. A distribution may be truncated to its top-k
// entries; the dropped mass is kept as `residual` and is treated as a single
// pseudo-token shared by both arguments of kl_divergence and jsd. That is an
// approximation whenever k does not cover the full support.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sumgd {

using TokenId = std::int32_t;

inline constexpr double kNormalizationTolerance = 1e-6;
// Probabilities below this are treated as zero inside log terms.
inline constexpr double kProbabilityFloor = 1e-12;

class TokenDistribution {
 public:
  struct Entry {
    TokenId token;
    double prob;
  };

  TokenDistribution() = default;

  // Validates the invariants: probabilities >= 0, no duplicate ids, and
  // sum(entries) + residual within kNormalizationTolerance of 1.
  static TokenDistribution from_entries(std::vector<Entry> entries,
                                        std::size_t vocab_size,
                                        double residual = 0.0);

  // Like from_entries, but first rescales entries and residual so they sum to
  // exactly one. The unscaled total must lie within `tolerance` of 1; this is
  // how wire payloads (exp of logprobs) are brought back to the invariant.
  static TokenDistribution from_unnormalized(std::vector<Entry> entries,
                                             std::size_t vocab_size,
                                             double residual, double tolerance);

  // Normalizes non-negative weights indexed by token id. With top_k > 0 only
  // the k most probable tokens are kept (ties to the lower id) and the rest is
  // recorded as residual.
  static TokenDistribution from_weights(std::span<const double> weights,
                                        std::size_t top_k = 0);

  // Ids ascending; probs() is parallel to tokens().
  std::span<const TokenId> tokens() const { return tokens_; }
  std::span<const double> probs() const { return probs_; }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::size_t vocab_size() const { return vocab_size_; }
  double residual() const { return residual_; }
  bool truncated() const { return residual_ > 0.0; }

  // Probability of `token`, 0 when absent.
  double prob(TokenId token) const;
  bool contains(TokenId token) const;

  // Entries ordered by probability descending, ties by ascending id.
  std::vector<Entry> ranked() const;

  bool operator==(const TokenDistribution&) const = default;

 private:
  std::vector<TokenId> tokens_;
  std::vector<double> probs_;
  std::size_t vocab_size_ = 0;
  double residual_ = 0.0;
};

// Sum p(x) ln(p(x)/q(x)) over the union support. Throws InfiniteDivergence
// when p(x) > 0 where q(x) == 0.
double kl_divergence(const TokenDistribution& p, const TokenDistribution& q);

// Jensen-Shannon divergence with mixture (p+q)/2. Symmetric, in [0, ln 2].
double jsd(const TokenDistribution& p, const TokenDistribution& q);

// Most probable token; ties resolve to the lowest id.
TokenId argmax_token(const TokenDistribution& p);

// Smallest probability-sorted prefix whose mass reaches top_p, renormalized.
// top_p == 1 returns the input unchanged.
TokenDistribution nucleus_filter(const TokenDistribution& p, double top_p);

}  // namespace sumgd
