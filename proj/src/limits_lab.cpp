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

#include "ballfield/limits_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "ballfield/error.hpp"

namespace ballfield {
namespace {

double euclid_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Eigen::MatrixXd gaussian_draws(const Eigen::MatrixXd& cov, std::size_t replicates, Rng& rng) {
  const PsdFactor f = psd_factorize(cov);
  const auto m = cov.rows();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(replicates), m);
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(m);
  for (std::size_t k = 0; k < replicates; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) g(i) = normal(rng);
    out.row(static_cast<Eigen::Index>(k)) = (f.factor * g).transpose();
  }
  return out;
}

// Exact shape of X(mu) when mu(B) takes at most the values {0, w} or {0, +-w}.
void exact_shape(const DiscreteSphereMeasure& mu, double raw_mean, double raw_var,
                 MeasureSummary& out) {
  const auto& atoms = mu.atoms();
  if (!(raw_var > 0.0)) return;
  if (atoms.size() == 1) {
    // X = w N with N Poisson.
    const double lambda = raw_mean / atoms[0].weight;
    out.exact_skewness = (atoms[0].weight > 0 ? 1.0 : -1.0) / std::sqrt(lambda);
    out.exact_excess_kurtosis = 1.0 / lambda;
  } else if (atoms.size() == 2 && atoms[0].weight == -atoms[1].weight) {
    // Odd cumulants cancel by symmetry; the fourth equals w^2 times the second.
    const double w2 = atoms[0].weight * atoms[0].weight;
    out.exact_skewness = 0.0;
    out.exact_excess_kurtosis = w2 / raw_var;
  }
}

}  // namespace

TangentMeasure::TangentMeasure(int n, std::vector<Atom> atoms) : n_(n), atoms_(std::move(atoms)) {
  if (n < 1) throw DomainError("tangent dimension must be >= 1");
  double mass = 0.0, tv = 0.0;
  for (const auto& a : atoms_) {
    if (a.x.size() != static_cast<std::size_t>(n)) throw DomainError("tangent atom has wrong length");
    if (!std::isfinite(a.weight)) throw DomainError("tangent weights must be finite");
    mass += a.weight;
    tv += std::abs(a.weight);
  }
  if (std::abs(mass) > 1e-12 * std::max(1.0, tv)) {
    std::ostringstream msg;
    msg << "tangent measure must have zero total mass (got " << mass << ")";
    throw DomainError(msg.str());
  }
}

TangentMeasure TangentMeasure::dipole(std::vector<double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<Atom> atoms;
  atoms.push_back({std::move(x), 1.0});
  atoms.push_back({std::vector<double>(static_cast<std::size_t>(n), 0.0), -1.0});
  return TangentMeasure(n, std::move(atoms));
}

double TangentMeasure::max_norm() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) {
    double s = 0.0;
    for (double v : a.x) s += v * v;
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

DiscreteSphereMeasure dilate_to_sphere(const SpherePoint& base, const TangentMeasure& tau, double eps,
                                       double chart_radius) {
  if (!(eps > 0.0)) throw DomainError("dilation factor eps must be > 0");
  if (tau.dim() != base.dim()) throw DomainError("tangent measure dimension differs from base");
  if (!(eps * tau.max_norm() < chart_radius)) {
    std::ostringstream msg;
    msg << "dilated atom leaves the chart: eps * max|x| = " << eps * tau.max_norm()
        << " >= " << chart_radius;
    throw DomainError(msg.str());
  }
  DiscreteSphereMeasure mu;
  for (const auto& a : tau.atoms()) {
    std::vector<double> y(a.x);
    for (double& v : y) v *= eps;
    mu.add(exp_map(TangentVector(base, std::move(y)), chart_radius), a.weight);
  }
  return mu;
}

double tangent_covariance(const TangentMeasure& tau, const TangentMeasure& tau2, double H, double k2) {
  if (tau.dim() != tau2.dim()) throw DomainError("tangent measures differ in dimension");
  if (!(H > 0.0)) throw DomainError("H must be > 0");
  double s = 0.0;
  for (const auto& a : tau.atoms()) {
    for (const auto& b : tau2.atoms()) {
      const double d = euclid_distance(a.x, b.x);
      if (d > 0.0) s += a.weight * b.weight * std::pow(d, 2.0 * H);
    }
  }
  return -k2 * s;
}

LassReport lass_experiment(const KernelSpec& spec, const SpherePoint& base, const TangentMeasure& tau,
                           std::span<const double> eps_grid) {
  if (!(spec.H < 0.5)) throw DomainError("lass_experiment requires 0 < H < 1/2");
  if (eps_grid.empty()) throw DomainError("lass_experiment needs a nonempty eps grid");
  for (std::size_t i = 1; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] < eps_grid[i - 1])) throw DomainError("eps grid must be strictly decreasing");
  }
  LassReport rep;
  rep.k2 = k2_constant(spec.n, spec.H);
  rep.target = tangent_covariance(tau, tau, spec.H, rep.k2);
  for (double eps : eps_grid) {
    const DiscreteSphereMeasure mu = dilate_to_sphere(base, tau, eps);
    const double ratio = quadratic_form(spec, mu, mu) / std::pow(eps, 2.0 * spec.H);
    rep.eps.push_back(eps);
    rep.ratio.push_back(ratio);
    rep.rel_error.push_back(rep.target != 0.0 ? std::abs(ratio / rep.target - 1.0) : std::abs(ratio));
  }
  const std::size_t k = rep.rel_error.size();
  rep.error_decreasing = k >= 3 && rep.rel_error[k - 2] < rep.rel_error[k - 3] &&
                         rep.rel_error[k - 1] < rep.rel_error[k - 2];
  return rep;
}

Eigen::MatrixXd sample_limit_field(const KernelSpec& spec, std::span<const SpherePoint> points,
                                   const std::optional<SpherePoint>& basepoint,
                                   std::size_t replicates, Rng& rng, const KernelTable* table) {
  return gaussian_draws(covariance_matrix(spec, points, basepoint, table), replicates, rng);
}

Eigen::MatrixXd tangent_field_covariance(std::span<const std::vector<double>> points, double H,
                                         double k2) {
  if (!(H > 0.0)) throw DomainError("H must be > 0");
  const auto m = static_cast<Eigen::Index>(points.size());
  const double p = 2.0 * H;
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& x = points[static_cast<std::size_t>(i)];
    if (x.size() != points[0].size()) throw DomainError("tangent points differ in dimension");
    const std::vector<double> zero(x.size(), 0.0);
    for (Eigen::Index j = i; j < m; ++j) {
      const auto& y = points[static_cast<std::size_t>(j)];
      const double v = k2 * (std::pow(euclid_distance(x, zero), p) + std::pow(euclid_distance(y, zero), p) -
                             std::pow(euclid_distance(x, y), p));
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return cov;
}

Eigen::MatrixXd sample_tangent_field(std::span<const std::vector<double>> points, double H,
                                     double k2, std::size_t replicates, Rng& rng) {
  return gaussian_draws(tangent_field_covariance(points, H, k2), replicates, rng);
}

GaussianityReport scaling_experiment(const ModelSpec& spec,
                                     std::span<const DiscreteSphereMeasure> measures,
                                     const ScalingOptions& options) {
  spec.validate();
  if (measures.empty()) throw DomainError("scaling_experiment needs at least one measure");
  if (options.replicates < 100) throw DomainError("scaling_experiment needs at least 100 replicates");
  const KernelSpec kspec(spec.law.n, spec.law.H);
  for (const auto& mu : measures) {
    if (mu.empty()) throw DomainError("scaling_experiment: empty measure");
    if (mu.dim() != spec.law.n) throw DomainError("measure dimension differs from n");
    if (kspec.above_critical() && !mu.zero_mass()) {
      throw DomainError("for 2H > n only zero-mass measures have a scaling limit");
    }
  }
  const std::size_t R = options.replicates;
  const std::size_t M = measures.size();
  const double norm = normalizer(spec);
  const ReplicateRun run = simulate_replicates(spec, measures, R, options.seed, options.threads);
  std::vector<double> values(R * M);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = run.values[i] / norm;

  GaussianityReport rep;
  rep.rho = spec.rho;
  rep.normalizer = norm;
  rep.replicates = R;
  double total_balls = 0.0;
  for (const auto s : run.balls) total_balls += static_cast<double>(s);
  rep.mean_balls = total_balls / static_cast<double>(R);

  std::vector<std::vector<double>> series(M, std::vector<double>(R));
  for (std::size_t k = 0; k < R; ++k) {
    for (std::size_t j = 0; j < M; ++j) series[j][k] = values[k * M + j];
  }
  const auto m = static_cast<Eigen::Index>(M);
  rep.empirical_cov.resize(m, m);
  rep.limit_cov.resize(m, m);
  for (std::size_t i = 0; i < M; ++i) {
    MeasureSummary s;
    s.stats = moment_stats(series[i]);
    const Moments ex = moments_exact(spec, measures[i]);
    s.exact_mean = ex.mean / norm;
    s.exact_variance = ex.variance / (norm * norm);
    s.limit_variance = quadratic_form(kspec, measures[i], measures[i]);
    exact_shape(measures[i], ex.mean, ex.variance, s);
    rep.measures.push_back(s);
    for (std::size_t j = i; j < M; ++j) {
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      rep.empirical_cov(a, b) = rep.empirical_cov(b, a) = sample_covariance(series[i], series[j]);
      rep.limit_cov(a, b) = rep.limit_cov(b, a) =
          i == j ? s.limit_variance : quadratic_form(kspec, measures[i], measures[j]);
    }
  }
  if (options.keep_samples) {
    rep.samples.assign(R, std::vector<double>(M));
    for (std::size_t k = 0; k < R; ++k) {
      for (std::size_t j = 0; j < M; ++j) rep.samples[k][j] = values[k * M + j];
    }
  }
  return rep;
}

StationarityReport stationarity_experiment(const ModelSpec& spec, double u, std::size_t pairs,
                                           const ScalingOptions& options) {
  spec.validate();
  if (!(u > 0.0 && u < std::numbers::pi)) throw DomainError("pair distance u must lie in (0, pi)");
  if (pairs < 2) throw DomainError("stationarity_experiment needs at least two pairs");
  const int n = spec.law.n;
  // Pair placement draws from a stream of its own, disjoint from the replicates.
  Rng placement = make_stream(mix64(options.seed ^ 0x5bd1e995ULL), 0);
  StationarityReport rep;
  rep.u = u;
  double wsum = 0.0, wmean = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    const SpherePoint z = sample_uniform(n, placement);
    std::normal_distribution<double> normal;
    std::vector<double> dir(static_cast<std::size_t>(n));
    double s = 0.0;
    do {
      s = 0.0;
      for (double& d : dir) {
        d = normal(placement);
        s += d * d;
      }
    } while (s == 0.0);
    for (double& d : dir) d *= u / std::sqrt(s);
    const SpherePoint w = exp_map(TangentVector(z, dir), std::numbers::pi);
    const DiscreteSphereMeasure mu = DiscreteSphereMeasure::dipole(z, w);
    ScalingOptions opt = options;
    opt.seed = stream_seed(options.seed, 1000003 + p);
    opt.keep_samples = false;
    const GaussianityReport g = scaling_experiment(spec, std::span(&mu, 1), opt);
    rep.variance.push_back(g.measures[0].stats.variance);
    rep.std_error.push_back(g.measures[0].stats.se_variance);
    rep.exact_variance = g.measures[0].exact_variance;
    const double wt = 1.0 / (rep.std_error.back() * rep.std_error.back());
    wsum += wt;
    wmean += wt * rep.variance.back();
  }
  wmean /= wsum;
  for (std::size_t p = 0; p < pairs; ++p) {
    const double z = (rep.variance[p] - wmean) / rep.std_error[p];
    rep.chi_square += z * z;
  }
  const boost::math::chi_squared dist(static_cast<double>(pairs - 1));
  rep.p_value = boost::math::cdf(boost::math::complement(dist, rep.chi_square));
  return rep;
}

}  // namespace ballfield
