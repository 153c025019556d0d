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

#include "ballfield/sphere_geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "ballfield/error.hpp"

namespace ballfield {
namespace {

using std::numbers::pi;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void require_dim(int n) {
  if (n < 1) throw DomainError("sphere dimension must be >= 1");
}

}  // namespace

SpherePoint::SpherePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw DomainError("SpherePoint needs at least 2 ambient coordinates");
  const double nrm = std::sqrt(norm2(coords_));
  if (!(std::abs(nrm - 1.0) <= 1e-12)) {
    std::ostringstream msg;
    msg << "SpherePoint coordinates must have unit norm (got " << nrm << ")";
    throw DomainError(msg.str());
  }
}

SpherePoint SpherePoint::normalized(std::vector<double> coords) {
  const double nrm = std::sqrt(norm2(coords));
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw DomainError("cannot normalize a zero vector");
  for (double& x : coords) x /= nrm;
  // One more pass brings the norm within an ulp or two of 1.
  const double again = std::sqrt(norm2(coords));
  for (double& x : coords) x /= again;
  return SpherePoint(std::move(coords));
}

SpherePoint SpherePoint::from_angles(std::span<const double> angles) {
  const std::size_t n = angles.size();
  if (n < 1) throw DomainError("need at least one angle");
  std::vector<double> x(n + 1);
  double sin_prod = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = sin_prod * std::cos(angles[i]);
    sin_prod *= std::sin(angles[i]);
  }
  x[n] = sin_prod;
  return normalized(std::move(x));
}

SpherePoint SpherePoint::north_pole(int n) {
  require_dim(n);
  std::vector<double> x(static_cast<std::size_t>(n) + 1, 0.0);
  x[0] = 1.0;
  return SpherePoint(std::move(x));
}

double dot(const SpherePoint& p, const SpherePoint& q) {
  if (p.dim() != q.dim()) throw DomainError("sphere dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.ambient(); ++i) s += p[i] * q[i];
  return s;
}

TangentFrame::TangentFrame(const SpherePoint& base) : base_(base) {
  const std::size_t m = base.ambient();
  const std::size_t n = m - 1;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(base[a]) < std::abs(base[b]);
  });
  vectors_.reserve(n * m);
  std::vector<double> v(m);
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(v.begin(), v.end(), 0.0);
    v[order[k]] = 1.0;
    // Two rounds of classical Gram-Schmidt against base and earlier vectors.
    for (int round = 0; round < 2; ++round) {
      double c = 0.0;
      for (std::size_t i = 0; i < m; ++i) c += v[i] * base[i];
      for (std::size_t i = 0; i < m; ++i) v[i] -= c * base[i];
      for (std::size_t j = 0; j < k; ++j) {
        const double* w = vectors_.data() + j * m;
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) d += v[i] * w[i];
        for (std::size_t i = 0; i < m; ++i) v[i] -= d * w[i];
      }
    }
    const double nrm = std::sqrt(norm2(v));
    for (double x : v) vectors_.push_back(x / nrm);
  }
}

std::span<const double> TangentFrame::vector(int k) const {
  const std::size_t m = base_.ambient();
  return {vectors_.data() + static_cast<std::size_t>(k) * m, m};
}

std::vector<double> TangentFrame::embed(std::span<const double> components) const {
  const std::size_t m = base_.ambient();
  if (components.size() != m - 1) throw DomainError("tangent components must have length n");
  std::vector<double> out(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double c = components[k];
    const double* w = vectors_.data() + k * m;
    for (std::size_t i = 0; i < m; ++i) out[i] += c * w[i];
  }
  return out;
}

TangentVector::TangentVector(SpherePoint base_point, std::vector<double> comps)
    : base(std::move(base_point)), components(std::move(comps)) {
  if (components.size() != static_cast<std::size_t>(base.dim())) {
    throw DomainError("tangent vector length must equal the sphere dimension");
  }
}

double TangentVector::norm() const { return std::sqrt(norm2(components)); }

double geodesic_distance(const SpherePoint& p, const SpherePoint& q) {
  return std::acos(std::clamp(dot(p, q), -1.0, 1.0));
}

double sphere_area(int n) {
  require_dim(n);
  const double h = 0.5 * (n + 1);
  return 2.0 * std::pow(pi, h) / std::tgamma(h);
}

double unit_ball_volume(int n) {
  require_dim(n);
  const double h = 0.5 * n;
  return std::pow(pi, h) / std::tgamma(h + 1.0);
}

double cap_area(int n, double r) {
  require_dim(n);
  if (!(r >= 0.0)) throw DomainError("cap radius must be >= 0");
  if (r >= pi) return sphere_area(n);
  if (n == 1) return 2.0 * r;
  if (n == 2) {
    const double s = std::sin(0.5 * r);
    return 4.0 * pi * s * s;
  }
  // phi(r) = sigma/2 * I_{sin^2 r}(n/2, 1/2) on [0, pi/2], mirrored beyond.
  const double sigma = sphere_area(n);
  const double a = 0.5 * n;
  if (r <= 0.5 * pi) {
    const double s = std::sin(r);
    return 0.5 * sigma * boost::math::ibeta(a, 0.5, s * s);
  }
  const double s = std::sin(pi - r);
  return sigma - 0.5 * sigma * boost::math::ibeta(a, 0.5, s * s);
}

double cap_radius_for_area(int n, double area) {
  require_dim(n);
  const double sigma = sphere_area(n);
  if (!(area >= 0.0 && area <= sigma * (1.0 + 1e-15))) {
    throw DomainError("cap area outside [0, sigma(S^n)]");
  }
  area = std::min(area, sigma);
  if (n == 1) return 0.5 * area;
  if (n == 2) return 2.0 * std::asin(std::sqrt(std::clamp(area / (4.0 * pi), 0.0, 1.0)));
  const double a = 0.5 * n;
  if (area <= 0.5 * sigma) {
    const double x = boost::math::ibeta_inv(a, 0.5, 2.0 * area / sigma);
    return std::asin(std::sqrt(x));
  }
  const double x = boost::math::ibeta_inv(a, 0.5, 2.0 * (sigma - area) / sigma);
  return pi - std::asin(std::sqrt(x));
}

SpherePoint sample_uniform(int n, Rng& rng) {
  require_dim(n);
  std::normal_distribution<double> normal;
  std::vector<double> x(static_cast<std::size_t>(n) + 1);
  double s = 0.0;
  do {
    s = 0.0;
    for (double& v : x) {
      v = normal(rng);
      s += v * v;
    }
  } while (s == 0.0);
  return SpherePoint::normalized(std::move(x));
}

CapSampler::CapSampler(const SpherePoint& center)
    : frame_(center), direction_(static_cast<std::size_t>(center.dim())) {}

void CapSampler::sample(double r, Rng& rng, std::span<double> out) {
  const int n = frame_.dim();
  const std::size_t m = frame_.base().ambient();
  // Colatitude by exact inverse CDF: phi(theta) = U * phi(r).
  const double theta = cap_radius_for_area(n, uniform_(rng) * cap_area(n, r));
  double s = 0.0;
  do {
    s = 0.0;
    for (double& d : direction_) {
      d = normal_(rng);
      s += d * d;
    }
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const auto base = frame_.base().coords();
  for (std::size_t i = 0; i < m; ++i) out[i] = c * base[i];
  for (int k = 0; k < n; ++k) {
    const double coef = sn * direction_[static_cast<std::size_t>(k)] * inv;
    const auto w = frame_.vector(k);
    for (std::size_t i = 0; i < m; ++i) out[i] += coef * w[i];
  }
}

SpherePoint sample_uniform_cap(const SpherePoint& center, double r, Rng& rng) {
  if (!(r > 0.0 && r <= pi)) throw DomainError("cap radius must lie in (0, pi]");
  CapSampler sampler(center);
  std::vector<double> out(center.ambient());
  sampler.sample(r, rng, out);
  return SpherePoint::normalized(std::move(out));
}

SpherePoint exp_map(const TangentVector& y, double chart_radius) {
  if (!(chart_radius > 1.0 && chart_radius <= pi)) {
    throw DomainError("chart radius must lie in (1, pi]");
  }
  const double t = y.norm();
  if (!(t < chart_radius) || !(t < pi)) {
    std::ostringstream msg;
    msg << "exp_map: |y| = " << t << " is outside the chart radius " << chart_radius;
    throw DomainError(msg.str());
  }
  if (t == 0.0) return y.base;
  const TangentFrame frame(y.base);
  std::vector<double> v = frame.embed(y.components);
  const double c = std::cos(t);
  const double s = std::sin(t) / t;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * y.base[i] + s * v[i];
  return SpherePoint::normalized(std::move(v));
}

TangentVector log_map(const SpherePoint& base, const SpherePoint& p) {
  const double c = dot(base, p);
  const std::size_t m = base.ambient();
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - c * base[i];
  const double s = std::sqrt(norm2(w));
  const double t = std::atan2(s, c);
  const int n = base.dim();
  if (pi - t < 1e-12) throw DomainError("log_map: point is antipodal to the base point");
  std::vector<double> comps(static_cast<std::size_t>(n), 0.0);
  if (s == 0.0) return {base, std::move(comps)};
  const TangentFrame frame(base);
  for (int k = 0; k < n; ++k) {
    const auto f = frame.vector(k);
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) d += w[i] * f[i];
    comps[static_cast<std::size_t>(k)] = d * t / s;
  }
  return {base, std::move(comps)};
}

}  // namespace ballfield
