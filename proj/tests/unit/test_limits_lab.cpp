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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ballfield/error.hpp"
#include "ballfield/limits_lab.hpp"

using namespace ballfield;
using std::numbers::pi;

TEST_CASE("tangent measures must have zero mass") {
  CHECK_THROWS_AS(TangentMeasure(1, {{{1.0}, 1.0}}), DomainError);
  CHECK_THROWS_AS(TangentMeasure(2, {{{1.0}, 1.0}, {{0.0}, -1.0}}), DomainError);
  const TangentMeasure d = TangentMeasure::dipole({3.0, 4.0});
  CHECK(d.atoms().size() == 2);
  CHECK(d.max_norm() == doctest::Approx(5.0));
}

TEST_CASE("dilation places atoms at distance eps |x|") {
  Rng rng(1);
  const SpherePoint base = sample_uniform(2, rng);
  const TangentMeasure tau(2, {{{0.3, -0.4}, 2.0}, {{1.0, 1.0}, -0.5}, {{0.0, 0.0}, -1.5}});
  const DiscreteSphereMeasure mu = dilate_to_sphere(base, tau, 0.01);
  REQUIRE(mu.atoms().size() == 3);
  CHECK(geodesic_distance(base, mu.atoms()[0].point) == doctest::Approx(0.005));
  CHECK(geodesic_distance(base, mu.atoms()[1].point) == doctest::Approx(0.01 * std::sqrt(2.0)));
  CHECK(geodesic_distance(base, mu.atoms()[2].point) == doctest::Approx(0.0));
  CHECK(mu.atoms()[0].weight == 2.0);
  CHECK(mu.zero_mass());
  CHECK_THROWS_AS(dilate_to_sphere(base, tau, 10.0), DomainError);
  CHECK_THROWS_AS(dilate_to_sphere(base, tau, 0.0), DomainError);
}

TEST_CASE("tangent covariance examples") {
  const double H = 0.25, k2 = 2.0;
  const TangentMeasure a = TangentMeasure::dipole({0.0, 2.0});
  const TangentMeasure b = TangentMeasure::dipole({1.0, 0.0});
  CHECK(tangent_covariance(a, a, H, k2) == doctest::Approx(2.0 * k2 * std::pow(2.0, 2.0 * H)));
  CHECK(tangent_covariance(a, b, H, k2) ==
        doctest::Approx(k2 * (std::pow(2.0, 0.5) + 1.0 - std::pow(std::sqrt(5.0), 0.5))));
  const TangentMeasure same(2, {{{1.0, 1.0}, 1.0}, {{1.0, 1.0}, -1.0}});
  CHECK(tangent_covariance(same, same, H, k2) == 0.0);
  // Homogeneity of degree 2H.
  const TangentMeasure a3 = TangentMeasure::dipole({0.0, 6.0});
  CHECK(tangent_covariance(a3, a3, H, k2) == doctest::Approx(std::pow(3.0, 2.0 * H) * tangent_covariance(a, a, H, k2)));
}

TEST_CASE("local self-similarity of the limit field") {
  for (int n : {1, 2}) {
    const KernelSpec spec(n, 0.25);
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    x[0] = 1.0;
    const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
    const LassReport r = lass_experiment(spec, SpherePoint::north_pole(n), TangentMeasure::dipole(x), eps);
    CHECK(r.target == doctest::Approx(2.0 * k2_constant(n, 0.25)));
    CHECK(r.rel_error.back() < 0.05);
    CHECK(r.rel_error.back() < r.rel_error[1]);
    CHECK(r.error_decreasing);
  }
  // Base point is immaterial.
  Rng rng(9);
  const KernelSpec spec(2, 0.25);
  const std::vector<double> eps = {1e-2, 1e-3};
  const auto tau = TangentMeasure::dipole({0.6, 0.8});
  const LassReport a = lass_experiment(spec, SpherePoint::north_pole(2), tau, eps);
  const LassReport b = lass_experiment(spec, sample_uniform(2, rng), tau, eps);
  CHECK(a.ratio[1] == doctest::Approx(b.ratio[1]).epsilon(1e-8));
  CHECK_THROWS_AS(lass_experiment(KernelSpec(1, 0.75), SpherePoint::north_pole(1), TangentMeasure::dipole({1.0}), eps),
                  DomainError);
}

TEST_CASE("null tangent measure gives ratio 0") {
  const TangentMeasure zero(1, {{{0.5}, 0.0}});
  const std::vector<double> eps = {1e-2, 1e-3};
  const LassReport r = lass_experiment(KernelSpec(1, 0.25), SpherePoint::north_pole(1), zero, eps);
  for (double v : r.ratio) CHECK(v == 0.0);
}

TEST_CASE("limit field samples reproduce the kernel") {
  Rng rng(2026);
  const KernelSpec spec(2, 0.4);
  const double a[] = {0.8, 0.0};
  const std::vector<SpherePoint> pts = {SpherePoint::north_pole(2), SpherePoint::from_angles(a)};
  const Eigen::MatrixXd s = sample_limit_field(spec, pts, std::nullopt, 100000, rng);
  const double var0 = s.col(0).squaredNorm() / 1e5;
  CHECK(var0 == doctest::Approx(kernel_value(spec, 0.0)).epsilon(0.02));
  const Eigen::VectorXd d = s.col(0) - s.col(1);
  CHECK(d.squaredNorm() / 1e5 == doctest::Approx(increment_variance(spec, 0.8)).epsilon(0.02));
}

TEST_CASE("pinned field vanishes at the base point") {
  Rng rng(3);
  const KernelSpec spec(1, 0.75);
  const SpherePoint z0 = SpherePoint::north_pole(1);
  const double a = 1.0;
  const std::vector<SpherePoint> pts = {z0, SpherePoint::from_angles(std::span(&a, 1))};
  const Eigen::MatrixXd s = sample_limit_field(spec, pts, z0, 1000, rng);
  CHECK(s.col(0).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(s.col(1).squaredNorm() > 0.0);
}

TEST_CASE("tangent field increments scale like |x - x'|^{2H}") {
  Rng rng(21);
  const double H = 0.25, k2 = k2_constant(1, H);
  const std::vector<std::vector<double>> pts = {{0.5}, {1.5}, {4.0}};
  const Eigen::MatrixXd c = tangent_field_covariance(pts, H, k2);
  CHECK(c(0, 0) == doctest::Approx(2.0 * k2 * std::pow(0.5, 0.5)));
  const Eigen::MatrixXd s = sample_tangent_field(pts, H, k2, 100000, rng);
  const Eigen::VectorXd d = s.col(2) - s.col(1);
  CHECK(d.squaredNorm() / 1e5 == doctest::Approx(2.0 * k2 * std::pow(2.5, 0.5)).epsilon(0.02));
}

TEST_CASE("scaling experiment reports consistent moments") {
  ModelSpec s;
  s.law = RadiusLaw{1, 0.25, 0.9, 0.0};
  s.rho = 10.0;
  const double a = 1.0;
  const auto mu = DiscreteSphereMeasure::dipole(SpherePoint::north_pole(1), SpherePoint::from_angles(std::span(&a, 1)));
  ScalingOptions opt;
  opt.replicates = 4000;
  opt.keep_samples = true;
  const GaussianityReport g = scaling_experiment(s, std::span(&mu, 1), opt);
  REQUIRE(g.measures.size() == 1);
  const MeasureSummary& m = g.measures[0];
  CHECK(m.exact_mean == doctest::Approx(0.0));
  CHECK(std::abs(m.stats.mean) < 4.0 * m.stats.se_mean);
  CHECK(m.exact_variance == doctest::Approx(m.limit_variance).epsilon(1e-6));
  CHECK(std::abs(m.stats.variance - m.exact_variance) < 4.0 * m.stats.se_variance);
  CHECK(*m.exact_skewness == 0.0);
  CHECK(g.samples.size() == 4000);
  CHECK(g.empirical_cov(0, 0) == doctest::Approx(m.stats.variance));
  opt.threads = 2;
  opt.keep_samples = true;
  const GaussianityReport g2 = scaling_experiment(s, std::span(&mu, 1), opt);
  CHECK(g2.samples == g.samples);
  DiscreteSphereMeasure point;
  point.add(SpherePoint::north_pole(1), 1.0);
  s.law.H = 0.75;
  CHECK_THROWS_AS(scaling_experiment(s, std::span(&point, 1), opt), DomainError);
}

TEST_CASE("increment variance is the same for every pair placement") {
  ModelSpec s;
  s.law = RadiusLaw{2, 0.4, 0.9, 0.0};
  s.rho = 5.0;
  ScalingOptions opt;
  opt.replicates = 2000;
  const StationarityReport r = stationarity_experiment(s, 0.6, 5, opt);
  REQUIRE(r.variance.size() == 5);
  CHECK(r.p_value > 0.001);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(r.variance[i] - r.exact_variance) < 4.0 * r.std_error[i]);
}
