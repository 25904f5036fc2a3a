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

// Data-parallel kernels over contiguous double arrays.
//
// Every kernel has a scalar reference implementation and optional AVX2 / NEON
// variants. The variants are bit-identical to the reference: reductions use
// the same four-lane accumulation order in every implementation, and no fused
// multiply-add is used. The active table is chosen once at first use from the
// CPU's capabilities; SUMGD_SIMD=scalar|avx2|neon overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace sumgd::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // Sum with four interleaved partial accumulators, combined as
  // (a0 + a1) + (a2 + a3), then the tail added left to right.
  double (*sum)(const double* x, std::size_t n);
  // x[i] *= factor
  void (*scale)(double* x, std::size_t n, double factor);
  // Index of the maximum element, lowest index on ties. n must be > 0.
  std::size_t (*argmax)(const double* x, std::size_t n);
  // out[i] = primary_weight * a[i] - contrast_weight * b[i]
  void (*weighted_difference)(const double* a, const double* b, std::size_t n,
                              double primary_weight, double contrast_weight,
                              double* out);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// The table selected for this process.
const KernelTable& active_kernels();

inline double sum(std::span<const double> x) {
  return active_kernels().sum(x.data(), x.size());
}
inline void scale(std::span<double> x, double factor) {
  active_kernels().scale(x.data(), x.size(), factor);
}
inline std::size_t argmax(std::span<const double> x) {
  return active_kernels().argmax(x.data(), x.size());
}
inline void weighted_difference(std::span<const double> a,
                                std::span<const double> b,
                                double primary_weight, double contrast_weight,
                                std::span<double> out) {
  active_kernels().weighted_difference(a.data(), b.data(), a.size(),
                                       primary_weight, contrast_weight,
                                       out.data());
}

}  // namespace sumgd::simd
