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

// The limit covariance kernel
//   K_H(u) = int_0^inf psi^{(H)}(u, r) r^{2H-n-1} dr
// and quantities built from it.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ballfield/sphere_geom.hpp"

namespace ballfield {

struct KernelSpec {
  int n = 1;
  double H = 0.25;
  /// Relative accuracy requested from every kernel quadrature.
  double rel_tol = 1e-10;

  /// Validates H > 0, 2H != n and rel_tol > 0.
  KernelSpec(int n, double H, double rel_tol = 1e-10);

  /// Exponent 2H - n - 1 of the radius weight.
  double alpha() const noexcept { return 2.0 * H - n - 1.0; }
  bool above_critical() const noexcept { return 2.0 * H > n; }
};

/// Finite signed combination of Dirac masses on S^n.
class DiscreteSphereMeasure {
 public:
  struct Atom {
    SpherePoint point;
    double weight;
  };

  DiscreteSphereMeasure() = default;
  explicit DiscreteSphereMeasure(std::vector<Atom> atoms);

  /// delta_z - delta_w
  static DiscreteSphereMeasure dipole(const SpherePoint& z, const SpherePoint& w);

  void add(const SpherePoint& p, double weight);
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }
  /// Sphere dimension, or 0 for the empty measure.
  int dim() const noexcept { return atoms_.empty() ? 0 : atoms_.front().point.dim(); }
  double total_mass() const noexcept;
  double total_variation() const noexcept;
  /// |total mass| <= 1e-12 * max(1, total variation)
  bool zero_mass() const noexcept;
  DiscreteSphereMeasure scaled(double c) const;

 private:
  std::vector<Atom> atoms_;
};

/// int_a^b phi_n(r) r^alpha dr, with phi_n(r) = sigma(S^n) for r >= pi.
double cap_power_integral(int n, double alpha, double a, double b, double rel_tol = 1e-10);

/// int_a^b D_n(u, r) r^alpha dr with D_n = phi_n - psi_n (zero for r >= pi).
double deficit_power_integral(int n, double alpha, double u, double a, double b,
                              double rel_tol = 1e-10);

double kernel_value(const KernelSpec& spec, double u);

/// K_H(0) - K_H(u), computed without cancellation.
double kernel_increment(const KernelSpec& spec, double u);

/// 2 (K_H(0) - K_H(u)), the variance of W(z) - W(z') at distance u.
double increment_variance(const KernelSpec& spec, double u);

/// Circle closed form, 0 < H < 1/2:
///   (2 (2 pi)^{2H} - u^{2H} - (2 pi - u)^{2H}) / (H (1 - 2H) 2^{2H}).
double kernel_closed_form_circle(double H, double u);

/// Same expression with the leading (2 pi)^{2H} replaced by (2H)^{2H}. Kept
/// only so the test suite can show that this variant disagrees with quadrature.
double kernel_closed_form_circle_alt(double H, double u);

/// K_H on [0, pi] tabulated at `size` nodes uniform in t = u^{min(2H, 1)},
/// interpolated by PCHIP. Intended for large covariance matrices.
class KernelTable {
 public:
  explicit KernelTable(const KernelSpec& spec, std::size_t size = 2048);

  const KernelSpec& spec() const noexcept { return spec_; }
  double k0() const noexcept { return k0_; }
  double increment(double u) const;
  double value(double u) const { return k0_ - increment(u); }

 private:
  KernelSpec spec_;
  double k0_ = 0.0;
  double power_ = 1.0;
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// sum_ij mu_i nu_j K_H(d(z_i, z'_j)). When 2H > n both measures must have
/// zero total mass. With a zero-mass argument the centered kernel
/// K_H - K_H(0) is used, which gives the same value with less cancellation.
double quadratic_form(const KernelSpec& spec, const DiscreteSphereMeasure& mu,
                      const DiscreteSphereMeasure& nu, const KernelTable* table = nullptr);

/// Covariance of the limit field at `points`. For 2H < n: K_H(d(z, z')) and
/// no basepoint. For 2H > n the field is pinned at the required basepoint z0:
/// K_H(d(z,z')) - K_H(d(z,z0)) - K_H(d(z',z0)) + K_H(0).
Eigen::MatrixXd covariance_matrix(const KernelSpec& spec, std::span<const SpherePoint> points,
                                  const std::optional<SpherePoint>& basepoint,
                                  const KernelTable* table = nullptr);

struct PsdFactor {
  Eigen::MatrixXd factor;     // factor * factor^T reproduces the input
  double min_eigenvalue = 0;  // before clipping
  double norm = 0;            // spectral norm of the input
  int clipped = 0;            // eigenvalues set to zero
};

/// Spectral factorization. Eigenvalues below tol * norm are clipped to 0;
/// any eigenvalue below -tol * norm raises PsdError.
PsdFactor psd_factorize(const Eigen::MatrixXd& matrix, double tol = 1e-10);

/// K_2 = int_0^inf L(n, r) r^{2H-n-1} dr, where L(n, r) is the volume of a
/// Euclidean ball of radius r minus its overlap with a translate at unit
/// distance. Requires 0 < H < 1/2.
double k2_constant(int n, double H, double rel_tol = 1e-12);

struct AsymptoteFit {
  double exponent = 0.0;      // least-squares slope of log(K1 - K(u)) on log u
  double k2_estimate = 0.0;   // geometric mean of (K1 - K(u)) / u^p, p = min(2H, 1)
  double k2_intercept = 0.0;  // exp(intercept) of the free least-squares fit
  double k1 = 0.0;
  std::vector<double> u;
  std::vector<double> gap;    // K1 - K(u)
};

/// Fits K_H(u) ~ K1 - K2 u^p on a grid inside (0, 0.1]. Throws NumericError
/// if K1 - K(u) <= 0 somewhere.
AsymptoteFit asymptote_fit(const KernelSpec& spec, std::span<const double> u_grid);

/// n log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace ballfield
