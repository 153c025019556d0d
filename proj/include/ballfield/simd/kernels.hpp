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

#pragma once

// Cap-membership counting over point sets stored column-wise (one array per
// ambient coordinate). Every variant accumulates the inner product in the
// same order without fused multiply-add, so all variants return identical
// counts for identical inputs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace ballfield::simd {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa) noexcept;

/// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Variant used by the dispatching entry points. Defaults to the best
/// available one; the environment variable BALLFIELD_SIMD=scalar|avx2
/// overrides the default.
Isa active_isa() noexcept;

/// Pins the variant (tests). std::nullopt restores the default. Throws
/// DomainError when the requested variant is unavailable.
void force_isa(std::optional<Isa> isa);

/// Column view of `count` points of R^m: cols[k][j] is coordinate k of point j.
struct PointColumns {
  std::span<const double* const> cols;
  std::size_t count = 0;
};

/// #{j : <x_j, a> > ta and <x_j, b> > tb}
std::uint64_t count_in_both_caps(PointColumns pts, std::span<const double> a, double ta,
                                 std::span<const double> b, double tb);

/// #{j : <x_j, z> > thresh[j]}
std::uint64_t count_covering(PointColumns pts, const double* thresh, std::span<const double> z);

namespace scalar {
std::uint64_t count_in_both_caps(PointColumns pts, std::span<const double> a, double ta,
                                 std::span<const double> b, double tb);
std::uint64_t count_covering(PointColumns pts, const double* thresh, std::span<const double> z);
}  // namespace scalar

namespace avx2 {
std::uint64_t count_in_both_caps(PointColumns pts, std::span<const double> a, double ta,
                                 std::span<const double> b, double tb);
std::uint64_t count_covering(PointColumns pts, const double* thresh, std::span<const double> z);
}  // namespace avx2

}  // namespace ballfield::simd
