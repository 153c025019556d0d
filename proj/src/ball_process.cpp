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

#include "ballfield/ball_process.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "ballfield/error.hpp"
#include "ballfield/regime.hpp"
#include "ballfield/simd/kernels.hpp"

namespace ballfield {
namespace {

using std::numbers::pi;

std::uint64_t draw_poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  if (!std::isfinite(mean) || mean > 1e15) throw NumericError("Poisson mean too large to simulate");
  std::poisson_distribution<std::int64_t> pois(mean);
  return static_cast<std::uint64_t>(pois(rng));
}

// Uniform on [0, 1) from the top 53 bits of one engine call.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Radius in (lo, hi) with density proportional to r^{q-1}, q != 0.
inline double power_radius(double lo_q, double span_q, double inv_q, double uniform) {
  const double x = lo_q + uniform * span_q;
  if (inv_q == 2.0) return x * x;
  if (inv_q == 1.0) return x;
  return std::pow(x, inv_q);
}

}  // namespace

void RadiusLaw::validate() const {
  require_admissible(n, H);
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw DomainError("cutoff fraction c_f must lie in (0, 1)");
  if (!(r_min >= 0.0 && r_min < cutoff * pi)) throw DomainError("r_min must lie in [0, c_f pi)");
}

double RadiusLaw::density(double r) const {
  if (!(r > r_min && r < cutoff * pi)) return 0.0;
  return std::pow(r, 2.0 * H - n - 1.0);
}

void ModelSpec::validate() const {
  law.validate();
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw DomainError("scale rho must be >= 1");
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  const double bound = 2.0 * law.H - law.n;
  if (!(theta > bound)) {
    std::ostringstream msg;
    msg << "theta = " << theta << " must exceed 2H - n = " << bound
        << " so that lambda(rho) rho^{n-2H} diverges";
    throw DomainError(msg.str());
  }
}

double ModelSpec::lambda() const { return std::pow(rho, theta); }

double ModelSpec::coefficient() const { return std::pow(rho, theta + law.n - 2.0 * law.H); }

double ModelSpec::radius_hi() const { return rho * law.cutoff * pi; }

double scaled_radius_density(const ModelSpec& spec, double r) {
  return spec.lambda() / spec.rho * spec.law.density(r / spec.rho);
}

double normalizer(const ModelSpec& spec) { return std::sqrt(spec.coefficient()); }

BallConfiguration::BallConfiguration(int dim)
    : n(dim), centers(static_cast<std::size_t>(dim) + 1) {
  if (dim < 1) throw DomainError("sphere dimension must be >= 1");
}

void BallConfiguration::clear() {
  for (auto& c : centers) c.clear();
  radius.clear();
  threshold.clear();
  whole_sphere = 0;
}

void BallConfiguration::add(std::span<const double> center, double r) {
  if (center.size() != centers.size()) throw DomainError("ball center has the wrong dimension");
  if (!(r > 0.0)) throw DomainError("ball radius must be > 0");
  for (std::size_t k = 0; k < centers.size(); ++k) centers[k].push_back(center[k]);
  radius.push_back(r);
  threshold.push_back(r >= pi ? -2.0 : std::cos(r));
}

SpherePoint BallConfiguration::center(std::size_t j) const {
  std::vector<double> c(centers.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = centers[k][j];
  return SpherePoint::normalized(std::move(c));
}

void sample_covering_balls(const ModelSpec& spec, std::span<const SpherePoint> points, Rng& rng,
                           BallConfiguration& out) {
  spec.validate();
  const int n = spec.law.n;
  if (points.empty()) throw DomainError("sample_covering_balls needs at least one point");
  for (const auto& p : points) {
    if (p.dim() != n) throw DomainError("point dimension differs from the model dimension");
  }
  if (out.n != n) out = BallConfiguration(n);
  out.clear();
  out.sampler = "covering";

  const double coeff = spec.coefficient();
  const double lo = spec.radius_lo();
  const double hi_all = spec.radius_hi();
  const double hi = std::min(hi_all, pi);
  const double two_h = 2.0 * spec.law.H;
  const double alpha = two_h - n - 1.0;
  const std::size_t m = points.size();
  const std::size_t amb = static_cast<std::size_t>(n) + 1;

  if (hi > lo) {
    const double vn = unit_ball_volume(n);
    const double lo_q = std::pow(lo, two_h);
    const double span_q = std::pow(hi, two_h) - lo_q;
    const double inv_q = 1.0 / two_h;
    const double mass = coeff * vn * span_q / two_h;
    const std::uint64_t proposals = draw_poisson(static_cast<double>(m) * mass, rng);

    std::vector<CapSampler> samplers;
    std::vector<std::vector<double>> tangent;  // n = 1 only
    if (n == 1) {
      for (const auto& p : points) tangent.push_back({-p[1], p[0]});
    } else {
      for (const auto& p : points) samplers.emplace_back(p);
    }
    std::vector<double> c(amb);
    const double dm = static_cast<double>(m);
    for (std::uint64_t k = 0; k < proposals; ++k) {
      const std::size_t i = m == 1 ? 0 : std::min(m - 1, static_cast<std::size_t>(uniform01(rng) * dm));
      const double r = power_radius(lo_q, span_q, inv_q, uniform01(rng));
      if (n == 1) {
        const double t = r * (2.0 * uniform01(rng) - 1.0);
        const double ct = std::cos(t);
        const double st = std::sin(t);
        c[0] = ct * points[i][0] + st * tangent[i][0];
        c[1] = ct * points[i][1] + st * tangent[i][1];
      } else {
        if (uniform01(rng) * vn * std::pow(r, n) >= cap_area(n, r)) continue;
        samplers[i].sample(r, rng, c);
      }
      const double cr = std::cos(r);
      std::size_t covered = 0;
      for (const auto& p : points) {
        double d = 0.0;
        for (std::size_t a = 0; a < amb; ++a) d += c[a] * p[a];
        covered += d > cr ? 1 : 0;
      }
      if (covered == 0) continue;
      if (covered > 1 && uniform01(rng) * static_cast<double>(covered) >= 1.0) continue;
      for (std::size_t a = 0; a < amb; ++a) out.centers[a].push_back(c[a]);
      out.radius.push_back(r);
      out.threshold.push_back(cr);
    }
  }
  if (hi_all > pi) {
    const double p = alpha + 1.0;
    const double from = std::max(lo, pi);
    const double mean =
        coeff * sphere_area(n) * (std::pow(hi_all, p) - std::pow(from, p)) / p;
    out.whole_sphere = draw_poisson(mean, rng);
  }
}

BallConfiguration sample_covering_balls(const ModelSpec& spec, std::span<const SpherePoint> points,
                                        Rng& rng) {
  BallConfiguration out(spec.law.n);
  sample_covering_balls(spec, points, rng, out);
  return out;
}

BallConfiguration sample_truncated_global(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  if (!(spec.law.r_min > 0.0)) throw DomainError("sample_truncated_global requires r_min > 0");
  const int n = spec.law.n;
  BallConfiguration out(n);
  out.sampler = "truncated_global";
  const double q = 2.0 * spec.law.H - n;  // alpha + 1
  const double lo = spec.radius_lo();
  const double hi = spec.radius_hi();
  const double lo_q = std::pow(lo, q);
  const double span_q = std::pow(hi, q) - lo_q;
  const double mean = spec.coefficient() * sphere_area(n) * span_q / q;
  const std::uint64_t count = draw_poisson(mean, rng);
  for (std::uint64_t k = 0; k < count; ++k) {
    const SpherePoint c = sample_uniform(n, rng);
    const double r = power_radius(lo_q, span_q, 1.0 / q, uniform01(rng));
    if (r >= pi) {
      ++out.whole_sphere;
    } else {
      out.add(c.coords(), r);
    }
  }
  return out;
}

double field_value(const BallConfiguration& config, const DiscreteSphereMeasure& mu) {
  if (mu.empty()) return 0.0;
  if (mu.dim() != config.n) throw DomainError("measure dimension differs from the configuration");
  std::vector<const double*> cols(config.centers.size());
  for (std::size_t k = 0; k < cols.size(); ++k) cols[k] = config.centers[k].data();
  const simd::PointColumns pts{cols, config.size()};
  double total = 0.0;
  for (const auto& atom : mu.atoms()) {
    const auto hits = simd::count_covering(pts, config.threshold.data(), atom.point.coords());
    total += atom.weight * static_cast<double>(hits + config.whole_sphere);
  }
  return total;
}

ReplicateRun simulate_replicates(const ModelSpec& spec, std::span<const DiscreteSphereMeasure> measures,
                                 std::size_t replicates, std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (measures.empty()) throw DomainError("simulation needs at least one measure");
  if (replicates < 1) throw DomainError("replicates must be >= 1");
  std::vector<SpherePoint> points;
  for (const auto& mu : measures) {
    if (mu.empty()) throw DomainError("simulation: empty measure");
    if (mu.dim() != spec.law.n) throw DomainError("measure dimension differs from n");
    for (const auto& a : mu.atoms()) {
      const auto same = [&](const SpherePoint& p) {
        return std::equal(p.coords().begin(), p.coords().end(), a.point.coords().begin());
      };
      if (std::none_of(points.begin(), points.end(), same)) points.push_back(a.point);
    }
  }
  const std::size_t M = measures.size();
  ReplicateRun run;
  run.replicates = replicates;
  run.measures = M;
  run.values.assign(replicates * M, 0.0);
  run.balls.assign(replicates, 0);
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(replicates, 1024))));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&](unsigned t) {
    try {
      BallConfiguration config(spec.law.n);
      for (std::size_t k = t; k < replicates; k += workers) {
        Rng rng = make_stream(seed, k);
        sample_covering_balls(spec, points, rng, config);
        run.balls[k] = config.size() + config.whole_sphere;
        for (std::size_t j = 0; j < M; ++j) run.values[k * M + j] = field_value(config, measures[j]);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return run;
}

double covering_mass(const ModelSpec& spec, double rel_tol) {
  spec.validate();
  const double alpha = 2.0 * spec.law.H - spec.law.n - 1.0;
  return spec.coefficient() *
         cap_power_integral(spec.law.n, alpha, spec.radius_lo(), spec.radius_hi(), rel_tol);
}

Moments moments_exact(const ModelSpec& spec, const DiscreteSphereMeasure& mu, double rel_tol) {
  spec.validate();
  if (!mu.empty() && mu.dim() != spec.law.n) throw DomainError("measure dimension differs from n");
  const int n = spec.law.n;
  const double alpha = 2.0 * spec.law.H - n - 1.0;
  const double lo = spec.radius_lo();
  const double hi = spec.radius_hi();
  const double coeff = spec.coefficient();
  const double mass = mu.total_mass();
  const double cover = cap_power_integral(n, alpha, lo, hi, rel_tol);
  Moments out;
  out.mean = coeff * mass * cover;
  // sum_ij w_i w_j psi(d_ij, r) = (sum w)^2 phi(r) - sum_{i != j} w_i w_j D(d_ij, r).
  double var = mass * mass * cover;
  const auto& atoms = mu.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const double w = atoms[i].weight * atoms[j].weight;
      if (w == 0.0) continue;
      const double d = geodesic_distance(atoms[i].point, atoms[j].point);
      var -= 2.0 * w * deficit_power_integral(n, alpha, d, lo, hi, rel_tol);
    }
  }
  out.variance = coeff * var;
  return out;
}

}  // namespace ballfield
