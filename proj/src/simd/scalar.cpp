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

#include "ballfield/simd/kernels.hpp"

namespace ballfield::simd::scalar {

std::uint64_t count_in_both_caps(PointColumns pts, std::span<const double> a, double ta,
                                 std::span<const double> b, double tb) {
  const std::size_t m = pts.cols.size();
  std::uint64_t hits = 0;
  for (std::size_t j = 0; j < pts.count; ++j) {
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
  std::uint64_t hits = 0;
  for (std::size_t j = 0; j < pts.count; ++j) {
    double d = 0.0;
    for (std::size_t k = 0; k < m; ++k) d = d + pts.cols[k][j] * z[k];
    hits += (d > thresh[j]) ? 1u : 0u;
  }
  return hits;
}

}  // namespace ballfield::simd::scalar
