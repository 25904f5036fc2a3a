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

#include "sumgd/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace sumgd::simd {
namespace {

// Two float64x2 accumulators reproduce the four-lane order of the reference.
double sum_neon(const double* x, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  double total = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
                 (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) total += x[i];
  return total;
}

void scale_neon(double* x, std::size_t n, double factor) {
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), f));
  for (; i < n; ++i) x[i] *= factor;
}

std::size_t argmax_neon(const double* x, std::size_t n) {
  // Argmax is branchy enough that the reference loop is already optimal here.
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

void weighted_difference_neon(const double* a, const double* b, std::size_t n,
                              double primary_weight, double contrast_weight,
                              double* out) {
  const float64x2_t wp = vdupq_n_f64(primary_weight);
  const float64x2_t wc = vdupq_n_f64(contrast_weight);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t lhs = vmulq_f64(wp, vld1q_f64(a + i));
    const float64x2_t rhs = vmulq_f64(wc, vld1q_f64(b + i));
    vst1q_f64(out + i, vsubq_f64(lhs, rhs));
  }
  for (; i < n; ++i) {
    const double lhs = primary_weight * a[i];
    const double rhs = contrast_weight * b[i];
    out[i] = lhs - rhs;
  }
}

constexpr KernelTable kNeonTable{Isa::kNeon, &sum_neon, &scale_neon,
                                 &argmax_neon, &weighted_difference_neon};

}  // namespace

const KernelTable* neon_kernels() { return &kNeonTable; }

}  // namespace sumgd::simd

#else

namespace sumgd::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace sumgd::simd

#endif
