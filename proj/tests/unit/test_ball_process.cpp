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

#include "ballfield/ball_process.hpp"
#include "ballfield/error.hpp"
#include "ballfield/stats.hpp"

using namespace ballfield;
using std::numbers::pi;

namespace {

ModelSpec model(int n, double H, double rho, double theta = 1.0, double r_min = 0.0) {
  ModelSpec s;
  s.law = RadiusLaw{n, H, 0.9, r_min};
  s.rho = rho;
  s.theta = theta;
  return s;
}

DiscreteSphereMeasure delta(const SpherePoint& p, double w = 1.0) {
  DiscreteSphereMeasure m;
  m.add(p, w);
  return m;
}

SpherePoint at_angle(int n, double a) {
  std::vector<double> ang(static_cast<std::size_t>(n), 0.0);
  ang[0] = a;
  return SpherePoint::from_angles(ang);
}

}  // namespace

TEST_CASE("model validation") {
  CHECK_NOTHROW(model(1, 0.25, 10).validate());
  CHECK_THROWS_AS(model(1, 0.5, 10).validate(), DomainError);
  CHECK_THROWS_AS(model(1, 0.25, 0.5).validate(), DomainError);
  // theta must exceed 2H - n.
  CHECK_THROWS_AS(model(1, 0.25, 10, -0.5).validate(), DomainError);
  CHECK_NOTHROW(model(1, 0.75, 10, 0.6).validate());
  ModelSpec bad = model(1, 0.25, 10);
  bad.law.cutoff = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("scaled density is lambda rho^{-1} f(r / rho)") {
  const ModelSpec s = model(2, 0.4, 10.0, 1.5);
  const double r = 3.0;
  CHECK(scaled_radius_density(s, r) == doctest::Approx(std::pow(10.0, 1.5) / 10.0 * std::pow(0.3, 0.8 - 3.0)));
  CHECK(scaled_radius_density(s, s.radius_hi() * 1.01) == 0.0);
  CHECK(normalizer(s) == doctest::Approx(std::sqrt(std::pow(10.0, 1.5) * std::pow(10.0, 2.0 - 0.8))));
}

TEST_CASE("configuration storage") {
  BallConfiguration c(2);
  const SpherePoint p = SpherePoint::north_pole(2);
  c.add(p.coords(), 0.5);
  c.add(p.coords(), 4.0);
  CHECK(c.size() == 2);
  CHECK(c.threshold[0] == doctest::Approx(std::cos(0.5)));
  CHECK(c.threshold[1] == -2.0);
  CHECK(c.center(0)[0] == 1.0);
  CHECK_THROWS_AS(c.add(std::vector<double>{1.0, 0.0}, 0.5), DomainError);
  CHECK(field_value(c, delta(p)) == 2.0);
  CHECK(field_value(c, delta(SpherePoint({-1.0, 0.0, 0.0}))) == 1.0);
  c.whole_sphere = 3;
  CHECK(field_value(c, delta(SpherePoint({-1.0, 0.0, 0.0}), 2.0)) == 8.0);
}

TEST_CASE("field value is linear in the measure") {
  Rng rng(4);
  const ModelSpec s = model(2, 0.4, 3.0, 1.0, 0.05);
  const BallConfiguration c = sample_truncated_global(s, rng);
  const SpherePoint a = sample_uniform(2, rng);
  const SpherePoint b = sample_uniform(2, rng);
  const DiscreteSphereMeasure m1 = DiscreteSphereMeasure::dipole(a, b);
  DiscreteSphereMeasure m2 = delta(b, 0.5);
  DiscreteSphereMeasure sum({{a, 1.0}, {b, -1.0}, {b, 0.5}});
  CHECK(field_value(c, sum) == field_value(c, m1) + field_value(c, m2));
}

TEST_CASE("covering count is Poisson at rho = 1") {
  const ModelSpec s = model(1, 0.25, 1.0);
  const SpherePoint z = SpherePoint::north_pole(1);
  const DiscreteSphereMeasure mu = delta(z);
  const ReplicateRun run = simulate_replicates(s, std::span(&mu, 1), 10000, 2026);
  const MomentStats st = moment_stats(run.values);
  const double ratio = st.variance / st.mean;
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.05);
  const Moments ex = moments_exact(s, mu);
  CHECK(ex.mean == doctest::Approx(ex.variance));
  CHECK(ex.mean == doctest::Approx(covering_mass(s)));
  CHECK(std::abs(st.mean - ex.mean) < 4.0 * st.se_mean);
}

TEST_CASE("exact moments of a point evaluation") {
  // n = 1: mean = rho^{theta + 1 - 2H} int_0^{c pi rho} 2r r^{2H-2} dr.
  const ModelSpec s = model(1, 0.25, 10.0);
  const double hi = 0.9 * pi * 10.0;
  const double expected = std::pow(10.0, 1.5) * (2.0 * std::pow(pi, 0.5) / 0.5 + 2.0 * pi * (std::pow(hi, -0.5) - std::pow(pi, -0.5)) / -0.5);
  CHECK(moments_exact(s, delta(SpherePoint::north_pole(1))).mean == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("covering and truncated samplers agree") {
  // With r_min > 0 both samplers describe the same law of (X(z1), X(z2)).
  const ModelSpec s = model(2, 0.4, 2.0, 1.0, 0.1);
  const SpherePoint z1 = SpherePoint::north_pole(2);
  const SpherePoint z2 = at_angle(2, 0.7);
  const std::vector<SpherePoint> pts = {z1, z2};
  const int R = 4000;
  std::vector<double> a1, a2, b1, b2;
  BallConfiguration cfg(2);
  for (int k = 0; k < R; ++k) {
    Rng r1 = make_stream(1, static_cast<std::uint64_t>(k));
    sample_covering_balls(s, pts, r1, cfg);
    a1.push_back(field_value(cfg, delta(z1)));
    a2.push_back(field_value(cfg, delta(z2)));
    Rng r2 = make_stream(2, static_cast<std::uint64_t>(k));
    const BallConfiguration g = sample_truncated_global(s, r2);
    b1.push_back(field_value(g, delta(z1)));
    b2.push_back(field_value(g, delta(z2)));
  }
  const MomentStats sa = moment_stats(a1), sb = moment_stats(b1);
  CHECK(std::abs(sa.mean - sb.mean) < 4.0 * std::hypot(sa.se_mean, sb.se_mean));
  CHECK(std::abs(sa.variance - sb.variance) < 4.0 * std::hypot(sa.se_variance, sb.se_variance));
  const double ca = sample_covariance(a1, a2), cb = sample_covariance(b1, b2);
  // Covariance of X(z1), X(z2) equals the mean number of balls covering both.
  const Moments m1 = moments_exact(s, delta(z1)), m2 = moments_exact(s, delta(z2));
  const Moments msum = moments_exact(s, DiscreteSphereMeasure({{z1, 1.0}, {z2, 1.0}}));
  const double cov = 0.5 * (msum.variance - m1.variance - m2.variance);
  const double se = std::sqrt(sa.variance * moment_stats(a2).variance / R);
  CHECK(std::abs(ca - cov) < 4.0 * se);
  CHECK(std::abs(cb - cov) < 4.0 * se);
}

TEST_CASE("whole-sphere balls are counted, not placed") {
  ModelSpec s = model(1, 0.25, 1.0);
  s.law.cutoff = 0.95;
  s.rho = 2.0;  // radii up to 1.9 pi
  Rng rng(12);
  const BallConfiguration g = sample_truncated_global(
      [&] {
        ModelSpec t = s;
        t.law.r_min = 0.01;
        return t;
      }(),
      rng);
  for (double r : g.radius) CHECK(r < pi);
  CHECK(g.whole_sphere > 0);
  CHECK_THROWS_AS(sample_truncated_global(s, rng), DomainError);
}

TEST_CASE("replicates do not depend on the thread count") {
  const ModelSpec s = model(2, 0.4, 5.0);
  const auto mu = DiscreteSphereMeasure::dipole(SpherePoint::north_pole(2), at_angle(2, 0.5));
  const ReplicateRun a = simulate_replicates(s, std::span(&mu, 1), 300, 77, 1);
  const ReplicateRun b = simulate_replicates(s, std::span(&mu, 1), 300, 77, 3);
  CHECK(a.values == b.values);
  CHECK(a.balls == b.balls);
}

TEST_CASE("zero-mass increments have mean zero") {
  const ModelSpec s = model(1, 0.75, 5.0);
  const auto mu = DiscreteSphereMeasure::dipole(SpherePoint::north_pole(1), at_angle(1, 1.0));
  CHECK(moments_exact(s, mu).mean == doctest::Approx(0.0));
  const ReplicateRun r = simulate_replicates(s, std::span(&mu, 1), 2000, 5);
  const MomentStats st = moment_stats(r.values);
  CHECK(std::abs(st.mean) < 4.0 * st.se_mean);
  CHECK(std::abs(st.variance - moments_exact(s, mu).variance) < 4.0 * st.se_variance);
}
