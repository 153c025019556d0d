// Copyright 2026 The ballfield Authors
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

#include <immintrin.h>

#include <bit>

#include "ballfield/simd/kernels.hpp"

namespace ballfield::simd::avx2 {

std::uint64_t count_in_both_caps(PointColumns pts, std::span<const double> a, double ta,
                                 std::span<const double> b, double tb) {
  const std::size_t m = pts.cols.size();
  const std::size_t n4 = pts.count & ~std::size_t{3};
  const __m256d vta = _mm256_set1_pd(ta);
  const __m256d vtb = _mm256_set1_pd(tb);
  std::uint64_t hits = 0;
  for (std::size_t j = 0; j < n4; j += 4) {
    __m256d da = _mm256_setzero_pd();
    __m256d db = _mm256_setzero_pd();
    for (std::size_t k = 0; k < m; ++k) {
      const __m256d x = _mm256_loadu_pd(pts.cols[k] + j);
      da = _mm256_add_pd(da, _mm256_mul_pd(x, _mm256_set1_pd(a[k])));
      db = _mm256_add_pd(db, _mm256_mul_pd(x, _mm256_set1_pd(b[k])));
    }
    const __m256d in = _mm256_and_pd(_mm256_cmp_pd(da, vta, _CMP_GT_OQ),
                                     _mm256_cmp_pd(db, vtb, _CMP_GT_OQ));
    hits += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(in))));
  }
  for (std::size_t j = n4; j < pts.count; ++j) {
    double da = 0.0;
    double db = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double x = pts.cols[k][j];
      da = da + x * a[k];
      db = db + x * b[k];
    }
    hits += (da > ta && db > tb) ? 1u : 0u;
  }
  return hits;
}

std::uint64_t count_covering(PointColumns pts, const double* thresh, std::span<const double> z) {
  const std::size_t m = pts.cols.size();
  const std::size_t n4 = pts.count & ~std::size_t{3};
  std::uint64_t hits = 0;
  for (std::size_t j = 0; j < n4; j += 4) {
    __m256d d = _mm256_setzero_pd();
    for (std::size_t k = 0; k < m; ++k) {
      d = _mm256_add_pd(d, _mm256_mul_pd(_mm256_loadu_pd(pts.cols[k] + j), _mm256_set1_pd(z[k])));
    }
    const __m256d in = _mm256_cmp_pd(d, _mm256_loadu_pd(thresh + j), _CMP_GT_OQ);
    hits += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(in))));
  }
  for (std::size_t j = n4; j < pts.count; ++j) {
    double d = 0.0;
    for (std::size_t k = 0; k < m; ++k) d = d + pts.cols[k][j] * z[k];
    hits += (d > thresh[j]) ? 1u : 0u;
  }
  return hits;
}

}  // namespace ballfield::simd::avx2
