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

#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "ballfield/error.hpp"
#include "ballfield/simd/kernels.hpp"

namespace ballfield::simd {
namespace {

// -1: no override; otherwise the Isa value.
std::atomic<int> g_forced{-1};

Isa detect() noexcept {
  if (const char* env = std::getenv("BALLFIELD_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

const char* isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) noexcept {
  if (isa == Isa::scalar) return true;
#if defined(BALLFIELD_BUILD_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() noexcept {
  const int f = g_forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa detected = detect();
  return detected;
}

void force_isa(std::optional<Isa> isa) {
  if (isa && !isa_available(*isa)) {
    throw DomainError(std::string("SIMD variant not available: ") + isa_name(*isa));
  }
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

std::uint64_t count_in_both_caps(PointColumns pts, std::span<const double> a, double ta,
                                 std::span<const double> b, double tb) {
#if defined(BALLFIELD_BUILD_AVX2)
  if (active_isa() == Isa::avx2) return avx2::count_in_both_caps(pts, a, ta, b, tb);
#endif
  return scalar::count_in_both_caps(pts, a, ta, b, tb);
}

std::uint64_t count_covering(PointColumns pts, const double* thresh, std::span<const double> z) {
#if defined(BALLFIELD_BUILD_AVX2)
  if (active_isa() == Isa::avx2) return avx2::count_covering(pts, thresh, z);
#endif
  return scalar::count_covering(pts, thresh, z);
}

}  // namespace ballfield::simd
