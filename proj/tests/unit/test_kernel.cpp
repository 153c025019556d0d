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

#include <Eigen/Eigenvalues>

#include "ballfield/error.hpp"
#include "ballfield/kernel.hpp"
#include "oracles.hpp"

using namespace ballfield;
using std::numbers::pi;

TEST_CASE("kernel spec rejects the excluded index") {
  CHECK_THROWS_AS(KernelSpec(1, 0.5), DomainError);
  CHECK_THROWS_AS(KernelSpec(2, 1.0), DomainError);
  CHECK_THROWS_AS(KernelSpec(1, -0.1), DomainError);
  CHECK(KernelSpec(2, 0.4).alpha() == doctest::Approx(-2.2));
  CHECK(KernelSpec(1, 0.75).above_critical());
}

TEST_CASE("circle kernel against direct integration of the arc overlap") {
  for (double H : {0.1, 0.25, 0.4}) {
    const KernelSpec spec(1, H);
    for (double u : {0.0, 0.2, 1.0, 2.5, pi}) {
      CAPTURE(H);
      CAPTURE(u);
      CHECK(kernel_value(spec, u) == doctest::Approx(oracle::circle_kernel(H, u)).epsilon(1e-9));
    }
  }
  CHECK(kernel_value(KernelSpec(1, 0.25), 0.0) == doctest::Approx(8.0 * std::sqrt(pi)).epsilon(1e-10));
  CHECK(kernel_value(KernelSpec(1, 0.25), pi) == doctest::Approx(8.30623541744025).epsilon(1e-10));
  CHECK(increment_variance(KernelSpec(1, 0.25), 1.0) == doctest::Approx(8.95921028120879).epsilon(1e-10));
}

TEST_CASE("circle closed form and its misprinted variant") {
  for (double u : {0.0, 0.5, 1.7, 3.0}) {
    CHECK(kernel_closed_form_circle(0.25, u) == doctest::Approx(kernel_value(KernelSpec(1, 0.25), u)).epsilon(1e-9));
  }
  CHECK(std::abs(kernel_closed_form_circle_alt(0.25, 1.0) - kernel_value(KernelSpec(1, 0.25), 1.0)) > 1.0);
}

TEST_CASE("frozen kernel values on S^2") {
  // Oracle: polar-slicing psi integrated against r^{2H-3}.
  CHECK(kernel_value(KernelSpec(2, 0.4), 0.0) == doctest::Approx(10.5497495201717).epsilon(1e-9));
  CHECK(kernel_value(KernelSpec(2, 0.4), 0.5) == doctest::Approx(7.306551848510285).epsilon(1e-8));
  CHECK(kernel_value(KernelSpec(2, 0.4), 2.0) == doctest::Approx(4.768154892691121).epsilon(1e-8));
  CHECK(kernel_value(KernelSpec(2, 0.75), 0.7) == doctest::Approx(20.0764277517324).epsilon(1e-8));
  CHECK(kernel_value(KernelSpec(2, 1.5), 0.0) == doctest::Approx(-2.0 * pi * pi).epsilon(1e-9));
  CHECK(kernel_value(KernelSpec(2, 1.5), 1.0) == doctest::Approx(-23.409598519627405).epsilon(1e-8));
}

TEST_CASE("increment is K(0) - K(u) and vanishes at 0") {
  for (auto [n, H] : {std::pair{1, 0.25}, {1, 0.75}, {2, 0.4}, {3, 1.0}}) {
    const KernelSpec spec(n, H);
    CHECK(kernel_increment(spec, 0.0) == 0.0);
    for (double u : {0.3, 2.0}) {
      CHECK(kernel_increment(spec, u) ==
            doctest::Approx(kernel_value(spec, 0.0) - kernel_value(spec, u)).epsilon(1e-8));
      CHECK(kernel_increment(spec, u) > 0.0);
    }
  }
}

TEST_CASE("kernel table interpolates the kernel") {
  const KernelSpec spec(2, 0.4);
  const KernelTable table(spec, 1024);
  CHECK(table.k0() == doctest::Approx(kernel_value(spec, 0.0)).epsilon(1e-12));
  for (double u : {0.001, 0.05, 0.8, 2.2, 3.1}) {
    CHECK(table.value(u) == doctest::Approx(kernel_value(spec, u)).epsilon(1e-6));
  }
}

TEST_CASE("quadratic forms") {
  const KernelSpec spec(1, 0.25);
  const double a = 1.0;
  const SpherePoint z = SpherePoint::north_pole(1);
  const SpherePoint w = SpherePoint::from_angles(std::span(&a, 1));
  const auto mu = DiscreteSphereMeasure::dipole(z, w);
  CHECK(quadratic_form(spec, mu, mu) == doctest::Approx(increment_variance(spec, 1.0)).epsilon(1e-10));
  DiscreteSphereMeasure point;
  point.add(z, 2.0);
  CHECK(quadratic_form(spec, point, point) == doctest::Approx(4.0 * kernel_value(spec, 0.0)));
  CHECK(quadratic_form(spec, mu.scaled(3.0), mu) == doctest::Approx(3.0 * quadratic_form(spec, mu, mu)));
  // Above the critical index only zero-mass measures are admissible.
  CHECK_THROWS_AS(quadratic_form(KernelSpec(1, 0.75), point, point), DomainError);
  CHECK(quadratic_form(KernelSpec(1, 0.75), mu, mu) > 0.0);
}

TEST_CASE("covariance matrices are PSD in both regimes") {
  Rng rng(8);
  for (auto [n, H] : {std::pair{1, 0.25}, {1, 0.75}, {2, 0.4}, {2, 1.5}}) {
    const KernelSpec spec(n, H);
    std::vector<SpherePoint> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(sample_uniform(n, rng));
    std::optional<SpherePoint> base;
    if (spec.above_critical()) base = sample_uniform(n, rng);
    const Eigen::MatrixXd m = covariance_matrix(spec, pts, base);
    CHECK(m.allFinite());
    CHECK((m - m.transpose()).norm() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  CHECK_THROWS_AS(covariance_matrix(KernelSpec(1, 0.75), std::vector<SpherePoint>{SpherePoint::north_pole(1)},
                                    std::nullopt),
                  DomainError);
}

TEST_CASE("PSD factorization") {
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 1.0, 1.0, 2.0;
  const PsdFactor f = psd_factorize(m);
  CHECK((f.factor * f.factor.transpose() - m).norm() < 1e-12);
  CHECK(f.min_eigenvalue == doctest::Approx(1.0));
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(psd_factorize(bad), PsdError);
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK(psd_factorize(singular).clipped == 1);
}

TEST_CASE("K2 against closed-form lens volumes") {
  CHECK(k2_constant(1, 0.25) == doctest::Approx(1.0 / (0.25 * 0.5 * std::sqrt(2.0))).epsilon(1e-12));
  for (int n : {1, 2, 3}) {
    for (double H : {0.1, 0.25, 0.4}) {
      CAPTURE(n);
      CAPTURE(H);
      CHECK(k2_constant(n, H) == doctest::Approx(oracle::k2(n, H)).epsilon(1e-9));
    }
  }
  CHECK(k2_constant(2, 0.25) == doctest::Approx(9.88839827894065).epsilon(1e-10));
  CHECK(k2_constant(2, 0.1) == doctest::Approx(17.79354076145399).epsilon(1e-10));
  CHECK_THROWS_AS(k2_constant(1, 0.6), DomainError);
}

TEST_CASE("small-u asymptote") {
  const auto grid = log_grid(1e-4, 1e-2, 21);
  CHECK(grid.size() == 21);
  CHECK(grid.front() == doctest::Approx(1e-4));
  CHECK(grid.back() == doctest::Approx(1e-2));
  const AsymptoteFit a = asymptote_fit(KernelSpec(1, 0.25), grid);
  CHECK(a.exponent == doctest::Approx(0.5).epsilon(0.04));
  CHECK(a.k2_estimate == doctest::Approx(k2_constant(1, 0.25)).epsilon(0.03));
  const AsymptoteFit b = asymptote_fit(KernelSpec(2, 0.75), grid);
  CHECK(std::abs(b.exponent - 1.0) < 0.05);
}
