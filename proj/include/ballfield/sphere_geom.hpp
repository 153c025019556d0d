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

// Geometry of the unit n-sphere S^n embedded in R^{n+1}.

#include <cstddef>
#include <span>
#include <vector>

#include "ballfield/rng.hpp"

namespace ballfield {

/// Radius of the exponential chart used by exp_map and the dilation of
/// tangent measures. Any value in (1, pi] is accepted.
inline constexpr double kDefaultChartRadius = 3.0;

/// A point of S^n stored as a unit vector of R^{n+1}.
class SpherePoint {
 public:
  /// Validates that `coords` has unit norm (within 1e-12) and length >= 2.
  explicit SpherePoint(std::vector<double> coords);

  /// Normalizes an arbitrary nonzero vector.
  static SpherePoint normalized(std::vector<double> coords);

  /// Spherical coordinates (phi_1, ..., phi_n):
  ///   x_1 = cos phi_1, x_2 = sin phi_1 cos phi_2, ...,
  ///   x_{n+1} = sin phi_1 ... sin phi_{n-1} sin phi_n.
  static SpherePoint from_angles(std::span<const double> angles);

  /// e_1, the point with all angles zero.
  static SpherePoint north_pole(int n);

  int dim() const noexcept { return static_cast<int>(coords_.size()) - 1; }
  std::size_t ambient() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  std::vector<double> coords_;
};

double dot(const SpherePoint& p, const SpherePoint& q);

/// Orthonormal basis of the tangent space at a base point, built by
/// Gram-Schmidt from the standard basis. Candidates are taken in order of
/// increasing |base_k| (ties by index), so the frame is reproducible.
class TangentFrame {
 public:
  explicit TangentFrame(const SpherePoint& base);

  const SpherePoint& base() const noexcept { return base_; }
  int dim() const noexcept { return base_.dim(); }
  /// k-th frame vector, length n+1.
  std::span<const double> vector(int k) const;

  /// sum_k components[k] * vector(k)
  std::vector<double> embed(std::span<const double> components) const;

 private:
  SpherePoint base_;
  std::vector<double> vectors_;  // n rows of length n+1
};

/// A vector of R^n read in the tangent frame of `base`.
struct TangentVector {
  SpherePoint base;
  std::vector<double> components;

  TangentVector(SpherePoint base_point, std::vector<double> comps);
  double norm() const;
};

/// Angle between p and q, arccos of the clamped inner product.
double geodesic_distance(const SpherePoint& p, const SpherePoint& q);

/// sigma(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_area(int n);

/// Volume of the Euclidean unit ball of R^n.
double unit_ball_volume(int n);

/// phi(r), surface measure of a cap of angular radius r on S^n.
double cap_area(int n, double r);

/// Inverse of cap_area on [0, pi]: the radius whose cap has the given area.
double cap_radius_for_area(int n, double area);

SpherePoint sample_uniform(int n, Rng& rng);

/// Uniform point of the cap B(center, r), 0 < r <= pi.
SpherePoint sample_uniform_cap(const SpherePoint& center, double r, Rng& rng);

/// Repeated cap sampling around a fixed center; keeps the tangent frame.
class CapSampler {
 public:
  explicit CapSampler(const SpherePoint& center);

  const SpherePoint& center() const noexcept { return frame_.base(); }

  /// Writes a uniform point of B(center, r) into `out` (length n+1).
  void sample(double r, Rng& rng, std::span<double> out);

 private:
  TangentFrame frame_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
  std::vector<double> direction_;
};

/// Exponential map at base; requires |y| < chart_radius, chart_radius in (1, pi].
SpherePoint exp_map(const TangentVector& y, double chart_radius = kDefaultChartRadius);

/// Inverse of exp_map; rejects points antipodal to base.
TangentVector log_map(const SpherePoint& base, const SpherePoint& p);

}  // namespace ballfield
