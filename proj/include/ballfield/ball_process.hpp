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

// Poisson random balls on S^n with the truncated power-law radius density
//   f(r) = r^{2H-n-1} on (r_min, c_f pi)
// and its scaled version with intensity
//   lambda(rho) rho^{-1} f(r / rho) sigma(dx) dr,  lambda(rho) = rho^theta.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ballfield/kernel.hpp"
#include "ballfield/rng.hpp"
#include "ballfield/sphere_geom.hpp"

namespace ballfield {

struct RadiusLaw {
  int n = 1;
  double H = 0.25;
  double cutoff = 0.9;  // c_f in (0, 1)
  double r_min = 0.0;

  /// Validates every field; throws DomainError.
  void validate() const;
  /// f(r) = r^{2H-n-1} on (r_min, cutoff * pi), 0 elsewhere.
  double density(double r) const;
};

struct ModelSpec {
  RadiusLaw law;
  double rho = 1.0;
  double theta = 1.0;

  /// Checks the radius law, rho >= 1, 2H != n and theta > 2H - n.
  void validate() const;

  double lambda() const;
  /// rho^{theta + n - 2H}: the scaled density is coefficient() * r^{2H-n-1}.
  double coefficient() const;
  double radius_lo() const { return rho * law.r_min; }
  double radius_hi() const;
};

/// lambda(rho) rho^{-1} f(r / rho).
double scaled_radius_density(const ModelSpec& spec, double r);

/// sqrt(lambda(rho) rho^{n - 2H}).
double normalizer(const ModelSpec& spec);

/// One Poisson sample. Centers are stored column-wise (ambient coordinate k
/// of ball j is centers[k][j]) so coverage tests vectorize. Balls of radius
/// at least pi cover the whole sphere; the samplers record them only as a
/// count.
struct BallConfiguration {
  int n = 1;
  std::vector<std::vector<double>> centers;
  std::vector<double> radius;
  std::vector<double> threshold;  // cos(radius), or -2 for radius >= pi
  std::uint64_t whole_sphere = 0;
  std::string sampler;
  std::uint64_t seed = 0;

  explicit BallConfiguration(int dim = 1);
  std::size_t size() const noexcept { return radius.size(); }
  void clear();
  void add(std::span<const double> center, double r);
  SpherePoint center(std::size_t j) const;
};

/// Exact sample of the balls that cover at least one of `points`, plus the
/// count of whole-sphere balls. Proposals are drawn by thinning: a point
/// index uniformly, a radius from r^{2H-1}, acceptance phi(r) / (V_n r^n), a
/// center uniform in the cap around that point, and a final acceptance
/// 1 / (number of points covered) that removes multiple counting.
BallConfiguration sample_covering_balls(const ModelSpec& spec, std::span<const SpherePoint> points,
                                        Rng& rng);
/// Same, reusing the storage of `out`.
void sample_covering_balls(const ModelSpec& spec, std::span<const SpherePoint> points, Rng& rng,
                           BallConfiguration& out);

/// Every ball of the process; requires r_min > 0.
BallConfiguration sample_truncated_global(const ModelSpec& spec, Rng& rng);

/// X(mu) = sum over balls of mu(ball).
double field_value(const BallConfiguration& config, const DiscreteSphereMeasure& mu);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact mean and variance of X(mu) under the scaled model.
Moments moments_exact(const ModelSpec& spec, const DiscreteSphereMeasure& mu, double rel_tol = 1e-10);

struct ReplicateRun {
  std::size_t replicates = 0;
  std::size_t measures = 0;
  std::vector<double> values;       // values[k * measures + j] = X(mu_j) in replicate k
  std::vector<std::uint64_t> balls; // configuration size per replicate, whole-sphere balls included
};

/// Raw X(mu_j) over independent replicates. Replicate k draws from
/// make_stream(seed, k) and the covering balls of all atoms of all measures;
/// `threads` workers stride over k, so the output does not depend on it.
ReplicateRun simulate_replicates(const ModelSpec& spec, std::span<const DiscreteSphereMeasure> measures,
                                 std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

/// Mean number of balls covering a fixed point: int phi(r) density(r) dr.
double covering_mass(const ModelSpec& spec, double rel_tol = 1e-10);

}  // namespace ballfield
