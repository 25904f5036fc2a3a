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

// Compiled with -mavx2 only; callers reach these through avx2_kernels(),
// which checks CPU support first.
#include "sumgd/simd/kernels.hpp"

#if defined(SUMGD_HAVE_AVX2)
#include <immintrin.h>

namespace sumgd::simd {
namespace {

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += x[i];
  return total;
}

void scale_avx2(double* x, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  }
  for (; i < n; ++i) x[i] *= factor;
}

std::size_t argmax_avx2(const double* x, std::size_t n) {
  if (n < 8) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (x[i] > x[best]) best = i;
    }
    return best;
  }
  // Per-lane running maximum; strict comparison keeps the earliest index
  // within each lane.
  __m256d best_val = _mm256_loadu_pd(x);
  __m256d best_idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  __m256d idx = best_idx;
  const __m256d step = _mm256_set1_pd(4.0);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    idx = _mm256_add_pd(idx, step);
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d gt = _mm256_cmp_pd(v, best_val, _CMP_GT_OQ);
    best_val = _mm256_blendv_pd(best_val, v, gt);
    best_idx = _mm256_blendv_pd(best_idx, idx, gt);
  }
  alignas(32) double vals[4];
  alignas(32) double idxs[4];
  _mm256_store_pd(vals, best_val);
  _mm256_store_pd(idxs, best_idx);
  std::size_t best = static_cast<std::size_t>(idxs[0]);
  double best_v = vals[0];
  for (int lane = 1; lane < 4; ++lane) {
    const auto lane_idx = static_cast<std::size_t>(idxs[lane]);
    if (vals[lane] > best_v || (vals[lane] == best_v && lane_idx < best)) {
      best_v = vals[lane];
      best = lane_idx;
    }
  }
  for (; i < n; ++i) {
    if (x[i] > best_v) {
      best_v = x[i];
      best = i;
    }
  }
  return best;
}

void weighted_difference_avx2(const double* a, const double* b, std::size_t n,
                              double primary_weight, double contrast_weight,
                              double* out) {
  const __m256d wp = _mm256_set1_pd(primary_weight);
  const __m256d wc = _mm256_set1_pd(contrast_weight);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lhs = _mm256_mul_pd(wp, _mm256_loadu_pd(a + i));
    const __m256d rhs = _mm256_mul_pd(wc, _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(lhs, rhs));
  }
  for (; i < n; ++i) {
    const double lhs = primary_weight * a[i];
    const double rhs = contrast_weight * b[i];
    out[i] = lhs - rhs;
  }
}

constexpr KernelTable kAvx2Table{Isa::kAvx2, &sum_avx2, &scale_avx2,
                                 &argmax_avx2, &weighted_difference_avx2};

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2") != 0;
  return supported ? &kAvx2Table : nullptr;
}

}  // namespace sumgd::simd

#else

namespace sumgd::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace sumgd::simd

#endif
