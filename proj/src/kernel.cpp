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

#include "ballfield/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

// fpclassify must precede pchip.hpp, which calls an unqualified isnan.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "ballfield/cap_overlap.hpp"
#include "ballfield/error.hpp"
#include "ballfield/quadrature.hpp"
#include "ballfield/regime.hpp"

namespace ballfield {
namespace {

using std::numbers::pi;

constexpr double kTiny = std::numeric_limits<double>::min();

quad::Options rel_options(double rel_tol) {
  quad::Options opt;
  opt.abs_tol = kTiny;
  opt.rel_tol = rel_tol;
  return opt;
}

// int_0^c phi(r) r^alpha dr with 2H = alpha + n + 1 < 1: the substitution
// r = c w^{1/(2H)} turns r^{2H-1} dr into c^{2H}/(2H) dw.
double cap_power_from_zero(int n, double alpha, double c, double rel_tol) {
  const double two_h = alpha + n + 1.0;
  const double scale = std::pow(c, two_h) / two_h;
  const auto f = [&](double w) {
    const double r = c * std::pow(w, 1.0 / two_h);
    if (r <= 0.0) return unit_ball_volume(n);
    return cap_area(n, r) / std::pow(r, n);
  };
  return scale * quad::integrate(f, 0.0, 1.0, rel_options(rel_tol)).value;
}

void check_range(double a, double b) {
  if (!(a >= 0.0) || !(b >= a)) throw DomainError("integration range must satisfy 0 <= a <= b");
}

double radius_moment(double alpha, double a, double b) {
  // int_a^b r^alpha dr; alpha != -1 is guaranteed by 2H != n.
  const double p = alpha + 1.0;
  if (std::isinf(b)) {
    if (p >= 0.0) throw DomainError("divergent tail integral");
    return -std::pow(a, p) / p;
  }
  return (std::pow(b, p) - std::pow(a, p)) / p;
}

}  // namespace

KernelSpec::KernelSpec(int n_, double H_, double rel_tol_) : n(n_), H(H_), rel_tol(rel_tol_) {
  require_admissible(n, H);
  if (!(rel_tol > 0.0)) throw DomainError("kernel tolerance must be > 0");
}

DiscreteSphereMeasure::DiscreteSphereMeasure(std::vector<Atom> atoms) {
  for (auto& a : atoms) add(a.point, a.weight);
}

DiscreteSphereMeasure DiscreteSphereMeasure::dipole(const SpherePoint& z, const SpherePoint& w) {
  DiscreteSphereMeasure m;
  m.add(z, 1.0);
  m.add(w, -1.0);
  return m;
}

void DiscreteSphereMeasure::add(const SpherePoint& p, double weight) {
  if (!std::isfinite(weight)) throw DomainError("measure weights must be finite");
  if (!atoms_.empty() && atoms_.front().point.dim() != p.dim()) {
    throw DomainError("all atoms of a measure must share one sphere dimension");
  }
  atoms_.push_back({p, weight});
}

double DiscreteSphereMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

double DiscreteSphereMeasure::total_variation() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms_) s += std::abs(a.weight);
  return s;
}

bool DiscreteSphereMeasure::zero_mass() const noexcept {
  return std::abs(total_mass()) <= 1e-12 * std::max(1.0, total_variation());
}

DiscreteSphereMeasure DiscreteSphereMeasure::scaled(double c) const {
  DiscreteSphereMeasure m;
  for (const auto& a : atoms_) m.add(a.point, c * a.weight);
  return m;
}

double cap_power_integral(int n, double alpha, double a, double b, double rel_tol) {
  check_range(a, b);
  double total = 0.0;
  const double c = std::min(b, pi);
  if (c > a) {
    const double two_h = alpha + n + 1.0;
    if (a == 0.0 && two_h < 1.0) {
      total += cap_power_from_zero(n, alpha, c, rel_tol);
    } else {
      const auto f = [&](double r) { return cap_area(n, r) * std::pow(r, alpha); };
      total += quad::integrate(f, a, c, rel_options(rel_tol)).value;
    }
  }
  if (b > pi) total += sphere_area(n) * radius_moment(alpha, std::max(a, pi), b);
  return total;
}

double deficit_power_integral(int n, double alpha, double u, double a, double b, double rel_tol) {
  check_range(a, b);
  if (!(u >= 0.0 && u <= pi)) throw DomainError("center distance u must lie in [0, pi]");
  b = std::min(b, pi);
  if (u == 0.0 || b <= a) return 0.0;

  const double h = 0.5 * u;
  double total = 0.0;
  // No overlap below u/2: D = phi.
  if (a < h) total += cap_power_integral(n, alpha, a, std::min(b, h), rel_tol);
  // Mirror image above pi - u/2: D(u, r) = phi(pi - r).
  const double top = pi - h;
  if (b > top) {
    const auto f = [&](double r) { return cap_area(n, pi - r) * std::pow(r, alpha); };
    total += quad::integrate(f, std::max(a, top), b, rel_options(rel_tol)).value;
  }
  const double lo = std::max(a, h);
  const double hi = std::min(b, top);
  if (hi > lo) {
    // Geometric breakpoints resolve the overlap onset at u/2 and its mirror.
    std::vector<double> pts{lo, hi};
    for (double x = h * 2.0; x < 0.5 * pi; x *= 2.0) {
      pts.push_back(x);
      pts.push_back(pi - x);
    }
    pts.push_back(0.5 * pi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double x) { return x < lo || x > hi; }),
              pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double inner_rel = 0.1 * rel_tol;
    const auto f = [&](double r) {
      const double d = deficit(n, u, r, kTiny, inner_rel).value;
      return d * std::pow(r, alpha);
    };
    total += quad::integrate(f, std::span<const double>(pts), rel_options(rel_tol)).value;
  }
  return total;
}

namespace {

double kernel_at_zero(int n, double alpha, double rel_tol) {
  // Tail over (pi, inf) where psi = sigma, or minus the compensating integral
  // over (0, pi) when 2H > n; both equal sigma pi^{2H-n} / (n - 2H).
  const double p = alpha + 1.0;
  return cap_power_integral(n, alpha, 0.0, pi, rel_tol) + sphere_area(n) * std::pow(pi, p) / (-p);
}

}  // namespace

double kernel_increment(const KernelSpec& spec, double u) {
  if (!(u >= 0.0 && u <= pi)) throw DomainError("kernel argument u must lie in [0, pi]");
  return deficit_power_integral(spec.n, spec.alpha(), u, 0.0, pi, spec.rel_tol);
}

double kernel_value(const KernelSpec& spec, double u) {
  if (!(u >= 0.0 && u <= pi)) throw DomainError("kernel argument u must lie in [0, pi]");
  const double k0 = kernel_at_zero(spec.n, spec.alpha(), spec.rel_tol);
  return u == 0.0 ? k0 : k0 - kernel_increment(spec, u);
}

double increment_variance(const KernelSpec& spec, double u) { return 2.0 * kernel_increment(spec, u); }

double kernel_closed_form_circle(double H, double u) {
  if (!(H > 0.0 && H < 0.5)) throw DomainError("closed form requires 0 < H < 1/2");
  if (!(u >= 0.0 && u <= pi)) throw DomainError("kernel argument u must lie in [0, pi]");
  const double p = 2.0 * H;
  const double c = 1.0 / (H * (1.0 - p) * std::pow(2.0, p));
  return c * (2.0 * std::pow(2.0 * pi, p) - std::pow(u, p) - std::pow(2.0 * pi - u, p));
}

double kernel_closed_form_circle_alt(double H, double u) {
  if (!(H > 0.0 && H < 0.5)) throw DomainError("closed form requires 0 < H < 1/2");
  const double p = 2.0 * H;
  const double c = 1.0 / (H * (1.0 - p) * std::pow(2.0, p));
  return c * (2.0 * std::pow(p, p) - std::pow(u, p) - std::pow(2.0 * pi - u, p));
}

struct KernelTable::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

KernelTable::KernelTable(const KernelSpec& spec, std::size_t size) : spec_(spec) {
  if (size < 4) throw DomainError("kernel table needs at least 4 nodes");
  power_ = std::min(2.0 * spec.H, 1.0);
  k0_ = kernel_at_zero(spec.n, spec.alpha(), spec.rel_tol);
  const double t_max = std::pow(pi, power_);
  std::vector<double> t(size), y(size);
  for (std::size_t i = 0; i < size; ++i) {
    // Quadratic grading: the increment is least smooth in t near the origin.
    const double s = static_cast<double>(i) / static_cast<double>(size - 1);
    t[i] = t_max * s * s;
    const double u = i + 1 == size ? pi : std::pow(t[i], 1.0 / power_);
    y[i] = kernel_increment(spec, std::min(u, pi));
  }
  impl_ = std::make_shared<Impl>(Impl{{std::move(t), std::move(y)}});
}

double KernelTable::increment(double u) const {
  if (!(u >= 0.0 && u <= pi)) throw DomainError("kernel argument u must lie in [0, pi]");
  return impl_->spline(std::pow(u, power_));
}

namespace {

// Memoized K_H(u) - K_H(0) or K_H(u), keyed by distance.
class KernelCache {
 public:
  KernelCache(const KernelSpec& spec, const KernelTable* table, bool centered)
      : spec_(spec), table_(table), centered_(centered) {}

  double operator()(double u) {
    auto it = cache_.find(u);
    if (it != cache_.end()) return it->second;
    const double inc = table_ ? table_->increment(u) : (u == 0.0 ? 0.0 : kernel_increment(spec_, u));
    const double v = centered_ ? -inc : k0() - inc;
    cache_.emplace(u, v);
    return v;
  }

  double k0() {
    if (!k0_) k0_ = table_ ? table_->k0() : kernel_at_zero(spec_.n, spec_.alpha(), spec_.rel_tol);
    return *k0_;
  }

 private:
  const KernelSpec& spec_;
  const KernelTable* table_;
  bool centered_;
  std::optional<double> k0_;
  std::map<double, double> cache_;
};

void check_table(const KernelSpec& spec, const KernelTable* table) {
  if (table && (table->spec().n != spec.n || table->spec().H != spec.H)) {
    throw DomainError("kernel table was built for a different (n, H)");
  }
}

}  // namespace

double quadratic_form(const KernelSpec& spec, const DiscreteSphereMeasure& mu,
                      const DiscreteSphereMeasure& nu, const KernelTable* table) {
  check_table(spec, table);
  if (spec.above_critical() && (!mu.zero_mass() || !nu.zero_mass())) {
    std::ostringstream msg;
    msg << "for 2H > n the measures must have zero total mass (got " << mu.total_mass() << " and "
        << nu.total_mass() << ")";
    throw DomainError(msg.str());
  }
  if (mu.empty() || nu.empty()) return 0.0;
  if (mu.dim() != spec.n || nu.dim() != spec.n) throw DomainError("measure dimension differs from n");
  KernelCache kernel(spec, table, mu.zero_mass() || nu.zero_mass());
  double total = 0.0;
  for (const auto& a : mu.atoms()) {
    for (const auto& b : nu.atoms()) {
      total += a.weight * b.weight * kernel(geodesic_distance(a.point, b.point));
    }
  }
  return total;
}

Eigen::MatrixXd covariance_matrix(const KernelSpec& spec, std::span<const SpherePoint> points,
                                  const std::optional<SpherePoint>& basepoint,
                                  const KernelTable* table) {
  check_table(spec, table);
  const bool pinned = spec.above_critical();
  if (pinned && !basepoint) throw DomainError("2H > n: covariance_matrix requires a basepoint");
  if (!pinned && basepoint) throw DomainError("2H < n: covariance_matrix takes no basepoint");
  for (const auto& p : points) {
    if (p.dim() != spec.n) throw DomainError("point dimension differs from n");
  }
  if (basepoint && basepoint->dim() != spec.n) throw DomainError("basepoint dimension differs from n");

  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd cov(m, m);
  // Pinned case in terms of I(u) = K(0) - K(u): I(d(z,z0)) + I(d(z',z0)) - I(d(z,z')).
  KernelCache inc(spec, table, true);  // returns -I(u)
  std::vector<double> to_base(points.size(), 0.0);
  if (pinned) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      to_base[i] = -inc(geodesic_distance(points[i], *basepoint));
    }
  }
  const double k0 = pinned ? 0.0 : inc.k0();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double ij = -inc(geodesic_distance(points[static_cast<std::size_t>(i)],
                                               points[static_cast<std::size_t>(j)]));
      const double v = pinned ? to_base[static_cast<std::size_t>(i)] +
                                    to_base[static_cast<std::size_t>(j)] - ij
                              : k0 - ij;
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return cov;
}

PsdFactor psd_factorize(const Eigen::MatrixXd& matrix, double tol) {
  if (matrix.rows() != matrix.cols()) throw DomainError("psd_factorize needs a square matrix");
  if (!(tol > 0.0)) throw DomainError("psd tolerance must be > 0");
  if (!matrix.allFinite()) throw NumericError("psd_factorize: matrix has non-finite entries");
  PsdFactor out;
  const auto m = matrix.rows();
  if (m == 0) return out;
  const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  const double scale = matrix.cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0)) throw DomainError("psd_factorize needs a symmetric matrix");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix);
  if (eig.info() != Eigen::Success) throw NumericError("eigen decomposition failed");
  const Eigen::VectorXd& lam = eig.eigenvalues();
  out.min_eigenvalue = lam.minCoeff();
  out.norm = lam.cwiseAbs().maxCoeff();
  const double cut = tol * out.norm;
  if (out.min_eigenvalue < -cut) {
    std::ostringstream msg;
    msg << "matrix is not positive semidefinite: eigenvalue " << out.min_eigenvalue
        << " < -" << tol << " * " << out.norm;
    throw PsdError(msg.str());
  }
  Eigen::VectorXd root(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (lam(k) < cut) {
      root(k) = 0.0;
      ++out.clipped;
    } else {
      root(k) = std::sqrt(lam(k));
    }
  }
  out.factor = eig.eigenvectors() * root.asDiagonal();
  return out;
}

double k2_constant(int n, double H, double rel_tol) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  if (!(H > 0.0 && H < 0.5)) throw DomainError("k2_constant requires 0 < H < 1/2");
  const double v = unit_ball_volume(n);
  const double p = 2.0 * H;
  // r <= 1/2: L = V_n r^n exactly.
  const double inner = v * std::pow(0.5, p) / p;
  // r > 1/2: L = V_n r^n I_{1/(4r^2)}(1/2, (n+1)/2). With r = 1/(2s) and
  // s = w^{1/(1-2H)} the integrand becomes smooth on (0, 1].
  const double b = 0.5 * (n + 1);
  const double q = 1.0 - p;
  const auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double s = std::pow(w, 1.0 / q);
    // V_n 2^q s^{-1-2H} I_{s^2}(1/2, b) / 2 times ds/dw = s^{2H} / q.
    const double ib = boost::math::ibeta(0.5, b, s * s);
    return v * std::pow(2.0, q) * 0.5 * ib / (q * s);
  };
  quad::Options opt;
  opt.abs_tol = kTiny;
  opt.rel_tol = rel_tol;
  return inner + quad::integrate(f, 0.0, 1.0, opt).value;
}

AsymptoteFit asymptote_fit(const KernelSpec& spec, std::span<const double> u_grid) {
  if (u_grid.size() < 2) throw DomainError("asymptote_fit needs at least two grid points");
  AsymptoteFit fit;
  fit.k1 = kernel_value(spec, 0.0);
  const double p = std::min(2.0 * spec.H, 1.0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, slog = 0;
  for (double u : u_grid) {
    if (!(u > 0.0 && u <= 0.1)) throw DomainError("asymptote grid must lie in (0, 0.1]");
    const double g = kernel_increment(spec, u);
    if (!(g > 0.0)) {
      std::ostringstream msg;
      msg << "K1 - K(u) = " << g << " <= 0 at u = " << u;
      throw NumericError(msg.str());
    }
    fit.u.push_back(u);
    fit.gap.push_back(g);
    const double x = std::log(u);
    const double y = std::log(g);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    slog += y - p * x;
  }
  const double m = static_cast<double>(u_grid.size());
  const double denom = m * sxx - sx * sx;
  if (!(denom > 0.0)) throw DomainError("asymptote grid needs distinct points");
  fit.exponent = (m * sxy - sx * sy) / denom;
  fit.k2_intercept = std::exp((sy - fit.exponent * sx) / m);
  fit.k2_estimate = std::exp(slog / m);
  return fit;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw DomainError("log_grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace ballfield
