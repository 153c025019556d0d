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

#include "ballfield/cap_overlap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "ballfield/error.hpp"
#include "ballfield/quadrature.hpp"
#include "ballfield/regime.hpp"
#include "ballfield/simd/kernels.hpp"
#include "ballfield/sphere_geom.hpp"

namespace ballfield {
namespace {

using std::numbers::pi;

void check_query(int n, double u, double r) {
  if (n < 1) throw DomainError("sphere dimension must be >= 1");
  if (!(u >= 0.0 && u <= pi)) throw DomainError("center distance u must lie in [0, pi]");
  if (!(r >= 0.0)) throw DomainError("radius r must be >= 0");
}

double deficit_circle(double u, double s) {
  if (s >= pi) return 0.0;
  return std::min({2.0 * s, u, 2.0 * pi - 2.0 * s});
}

// r(a) from t = sin r - a, where sr = sin r, cr = cos r.
double sliced_radius(double t, double sr, double cr) {
  return std::atan2(std::sqrt(std::max(0.0, t * (2.0 * sr - t))), cr);
}

double slice_weight(int n, double a) {
  if (n == 2) return 1.0;
  const double w = (1.0 - a) * (1.0 + a);
  if (n == 3) return std::sqrt(w);
  return std::pow(w, 0.5 * (n - 2));
}

struct Estimate {
  double value;
  double error;
};

// D_n(u, r) for n >= 2, u > 0 and u/2 < r <= pi/2.
Estimate deficit_core(int n, double u, double r, double abs_tol, double rel_tol) {
  const double sr = std::sin(r);
  const double cr = std::cos(r);
  const double ch = std::cos(0.5 * u);
  const double sh = std::sin(0.5 * u);
  const double a_star = std::sqrt(std::max(0.0, std::sin(r - 0.5 * u) * std::sin(r + 0.5 * u))) / ch;
  // sin r - a*, written to stay accurate when it is tiny.
  const double gap = (sh * sh * cr * cr) / (ch * ch * (sr + a_star));

  quad::Options opt;
  opt.abs_tol = 0.5 * abs_tol;
  opt.rel_tol = rel_tol;

  // Upper slices a in (a*, sin r) lie entirely inside one cap only: D_{n-1} = phi_{n-1}.
  // Substituting a = sin r - gap (1-s)^2 removes the square-root endpoint.
  const auto upper = [&](double s) {
    const double q = 1.0 - s;
    const double t = gap * q * q;
    const double rr = sliced_radius(t, sr, cr);
    return 2.0 * gap * q * slice_weight(n, sr - t) * cap_area(n - 1, rr);
  };
  Estimate out{0.0, 0.0};
  if (gap > 0.0) {
    const auto res = quad::integrate(upper, 0.0, 1.0, opt);
    out.value += 2.0 * res.value;
    out.error += 2.0 * res.error;
  }
  if (a_star <= 0.0) return out;

  if (n == 2) {
    out.value += 2.0 * u * a_star;
    return out;
  }
  // Lower slices: a = a* s (2 - s) smooths the onset of overlap at a*.
  const double inner_abs = 0.1 * abs_tol / (2.0 * a_star);
  const double inner_rel = 0.1 * rel_tol;
  const auto lower = [&](double s) {
    const double q = 1.0 - s;
    const double a = a_star * s * (2.0 - s);
    const double t = gap + a_star * q * q;
    const double rr = sliced_radius(t, sr, cr);
    double inner = 0.0;
    if (rr <= 0.5 * u) {
      inner = cap_area(n - 1, rr);
    } else {
      inner = deficit_core(n - 1, u, rr, inner_abs, inner_rel).value;
    }
    return 2.0 * a_star * q * slice_weight(n, a) * inner;
  };
  const auto res = quad::integrate(lower, 0.0, 1.0, opt);
  out.value += 2.0 * res.value;
  out.error += 2.0 * res.error;
  return out;
}

}  // namespace

double default_psi_tol(int n) { return n <= 2 ? 1e-8 : 1e-6; }

double psi_circle(double u, double r) {
  check_query(1, u, r);
  if (r < 0.5 * u) return 0.0;
  if (r <= pi - 0.5 * u) return 2.0 * r - u;
  if (r <= pi) return 4.0 * r - 2.0 * pi;
  return 2.0 * pi;
}

PsiResult deficit(int n, double u, double r, double abs_tol, double rel_tol) {
  check_query(n, u, r);
  if (!(abs_tol > 0.0) || !(rel_tol >= 0.0)) throw DomainError("tolerances must be positive");
  if (r >= pi || u == 0.0) return {0.0, 0.0, "closed_form"};
  if (n == 1) return {deficit_circle(u, r), 0.0, "closed_form"};
  const double s = r > 0.5 * pi ? pi - r : r;
  if (s <= 0.5 * u) return {cap_area(n, s), 0.0, "closed_form"};
  const Estimate e = deficit_core(n, u, s, abs_tol, rel_tol);
  return {e.value, e.error, "recurrence"};
}

PsiResult psi(int n, double u, double r, double tol) {
  check_query(n, u, r);
  if (!(tol > 0.0)) throw DomainError("psi tolerance must be > 0");
  if (n == 1) return {psi_circle(u, r), 0.0, "closed_form"};
  if (r >= pi) return {sphere_area(n), 0.0, "closed_form"};
  const PsiResult d = deficit(n, u, r, tol);
  const double phi = cap_area(n, r);
  const double value = std::clamp(phi - d.value, 0.0, phi);
  return {value, d.error, d.method};
}

McEstimate psi_mc(int n, double u, double r, std::uint64_t samples, Rng& rng) {
  check_query(n, u, r);
  if (samples < 1) throw DomainError("psi_mc needs at least one sample");
  const std::size_t m = static_cast<std::size_t>(n) + 1;
  std::vector<double> za(m, 0.0), zb(m, 0.0);
  za[0] = 1.0;
  zb[0] = std::cos(u);
  zb[1] = std::sin(u);
  // Open caps: d(x, z) < r  <=>  <x, z> > cos r; every point qualifies once r >= pi.
  const double thr = r >= pi ? -2.0 : std::cos(r);

  constexpr std::size_t kBatch = 4096;
  std::vector<std::vector<double>> cols(m, std::vector<double>(kBatch));
  std::vector<const double*> ptrs(m);
  for (std::size_t k = 0; k < m; ++k) ptrs[k] = cols[k].data();
  std::normal_distribution<double> normal;
  std::uint64_t hits = 0;
  std::uint64_t done = 0;
  while (done < samples) {
    const std::size_t batch = static_cast<std::size_t>(std::min<std::uint64_t>(kBatch, samples - done));
    for (std::size_t j = 0; j < batch; ++j) {
      double s2 = 0.0;
      do {
        s2 = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const double g = normal(rng);
          cols[k][j] = g;
          s2 += g * g;
        }
      } while (s2 == 0.0);
      const double inv = 1.0 / std::sqrt(s2);
      for (std::size_t k = 0; k < m; ++k) cols[k][j] *= inv;
    }
    hits += simd::count_in_both_caps({ptrs, batch}, za, thr, zb, thr);
    done += batch;
  }
  const double sigma = sphere_area(n);
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {sigma * p, sigma * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), hits, samples};
}

double psi_h(int n, double H, double u, double r, double tol) {
  require_admissible(n, H);
  const double v = psi(n, u, r, tol).value;
  return above_critical(n, H) ? v - sphere_area(n) : v;
}

}  // namespace ballfield
