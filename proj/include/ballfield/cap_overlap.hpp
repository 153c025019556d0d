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

// psi_n(u, r): measure of the intersection of two caps of radius r on S^n
// whose centers are u apart.
//
// For n >= 2 the value is computed through the deficit
//   D_n(u, r) = phi_n(r) - psi_n(u, r),
// which satisfies D_n(u, r) = D_n(u, pi - r), vanishes for r >= pi, equals
// phi_n(r) for r <= u/2, and otherwise obeys the slicing recurrence
//   D_n(u, r) = 2 int_0^{sin r} (1 - a^2)^{(n-2)/2} D_{n-1}(u, r(a)) da,
//   r(a) = arccos(cos r / sqrt(1 - a^2)),
// with D_1(u, s) = min(2s, u, 2pi - 2s).

#include <cstdint>
#include <string>

#include "ballfield/rng.hpp"

namespace ballfield {

struct PsiResult {
  double value = 0.0;
  double error = 0.0;   // absolute error estimate
  std::string method;   // "closed_form" or "recurrence"
};

/// Default absolute tolerance of psi(): 1e-8 for n <= 2, 1e-6 above.
double default_psi_tol(int n);

/// Four-branch closed form of psi_1(u, r).
double psi_circle(double u, double r);

/// D_n(u, r) with its quadrature error estimate. The requested accuracy is
/// max(abs_tol, rel_tol * D).
PsiResult deficit(int n, double u, double r, double abs_tol, double rel_tol = 0.0);

/// psi_n(u, r) to absolute tolerance `tol`; throws QuadratureError when the
/// tolerance cannot be met.
PsiResult psi(int n, double u, double r, double tol);
inline PsiResult psi(int n, double u, double r) { return psi(n, u, r, default_psi_tol(n)); }

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

/// Monte Carlo psi_n(u, r): sigma(S^n) times the fraction of uniform points
/// lying in both caps, with the binomial standard error.
McEstimate psi_mc(int n, double u, double r, std::uint64_t samples, Rng& rng);

/// psi in the regime 2H < n, psi - sigma(S^n) in the regime 2H > n.
double psi_h(int n, double H, double u, double r, double tol);
inline double psi_h(int n, double H, double u, double r) {
  return psi_h(n, H, u, r, default_psi_tol(n));
}

}  // namespace ballfield
