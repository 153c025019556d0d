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

// Experiments on the scaling limit and on local self-similarity.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ballfield/ball_process.hpp"
#include "ballfield/kernel.hpp"
#include "ballfield/stats.hpp"

namespace ballfield {

/// Finite signed combination of Dirac masses on R^n with zero total mass.
class TangentMeasure {
 public:
  struct Atom {
    std::vector<double> x;
    double weight;
  };

  /// Throws DomainError unless every atom has length n and the weights sum
  /// to 0 within 1e-12 * max(1, total variation).
  TangentMeasure(int n, std::vector<Atom> atoms);

  /// delta_x - delta_0
  static TangentMeasure dipole(std::vector<double> x);

  int dim() const noexcept { return n_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double max_norm() const noexcept;

 private:
  int n_;
  std::vector<Atom> atoms_;
};

/// Push-forward of tau dilated by eps through the exponential chart at base.
/// Throws DomainError when an atom leaves the chart.
DiscreteSphereMeasure dilate_to_sphere(const SpherePoint& base, const TangentMeasure& tau,
                                       double eps, double chart_radius = kDefaultChartRadius);

/// -K2 sum_ij w_i w'_j |x_i - x'_j|^{2H}
double tangent_covariance(const TangentMeasure& tau, const TangentMeasure& tau2, double H, double k2);

struct LassReport {
  std::vector<double> eps;        // as given, strictly decreasing
  std::vector<double> ratio;      // Var W(mu_eps) / eps^{2H}
  std::vector<double> rel_error;  // |ratio / target - 1|
  double target = 0.0;
  double k2 = 0.0;
  bool error_decreasing = false;  // over the last three grid points
};

/// Requires 0 < H < 1/2.
LassReport lass_experiment(const KernelSpec& spec, const SpherePoint& base, const TangentMeasure& tau,
                           std::span<const double> eps_grid);

/// replicates x points matrix of exact draws of the limit field (pinned at
/// the basepoint when 2H > n).
Eigen::MatrixXd sample_limit_field(const KernelSpec& spec, std::span<const SpherePoint> points,
                                   const std::optional<SpherePoint>& basepoint,
                                   std::size_t replicates, Rng& rng,
                                   const KernelTable* table = nullptr);

/// Covariance of x -> T(delta_x - delta_0):
/// K2 (|x|^{2H} + |x'|^{2H} - |x - x'|^{2H}).
Eigen::MatrixXd tangent_field_covariance(std::span<const std::vector<double>> points, double H,
                                         double k2);

/// replicates x points matrix of exact draws of the tangent field at `points`.
Eigen::MatrixXd sample_tangent_field(std::span<const std::vector<double>> points, double H,
                                     double k2, std::size_t replicates, Rng& rng);

struct ScalingOptions {
  std::size_t replicates = 10000;
  std::uint64_t seed = 2026;
  unsigned threads = 1;
  bool keep_samples = false;
};

struct MeasureSummary {
  MomentStats stats;             // of X_rho(mu) / normalizer
  double limit_variance = 0.0;   // quadratic form of the limit kernel
  double exact_mean = 0.0;       // of the normalized value at this rho
  double exact_variance = 0.0;
  // Exact skewness and excess kurtosis, available for a single atom and for
  // a two-atom measure with opposite weights.
  std::optional<double> exact_skewness;
  std::optional<double> exact_excess_kurtosis;
};

struct GaussianityReport {
  double rho = 0.0;
  double normalizer = 0.0;
  std::size_t replicates = 0;
  double mean_balls = 0.0;  // average configuration size
  std::vector<MeasureSummary> measures;
  Eigen::MatrixXd empirical_cov;
  Eigen::MatrixXd limit_cov;
  std::vector<std::vector<double>> samples;  // [replicate][measure], if kept
};

/// Simulates X_rho(mu) / normalizer for every measure. Replicate k uses the
/// random stream stream_seed(seed, k), so results do not depend on threads.
GaussianityReport scaling_experiment(const ModelSpec& spec,
                                     std::span<const DiscreteSphereMeasure> measures,
                                     const ScalingOptions& options);

struct StationarityReport {
  double u = 0.0;
  std::vector<double> variance;  // normalized increment variance per pair
  std::vector<double> std_error;
  double chi_square = 0.0;       // homogeneity statistic, pairs - 1 dof
  double p_value = 0.0;
  double exact_variance = 0.0;
};

/// Normalized increments over `pairs` randomly placed pairs at distance u.
StationarityReport stationarity_experiment(const ModelSpec& spec, double u, std::size_t pairs,
                                           const ScalingOptions& options);

}  // namespace ballfield
