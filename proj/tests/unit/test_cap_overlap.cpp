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

#include "ballfield/cap_overlap.hpp"
#include "ballfield/error.hpp"
#include "ballfield/sphere_geom.hpp"
#include "oracles.hpp"

using namespace ballfield;
using std::numbers::pi;

TEST_CASE("circle closed form on its four branches") {
  CHECK(psi_circle(1.0, 0.3) == 0.0);                   // disjoint arcs
  CHECK(psi_circle(1.0, 0.8) == doctest::Approx(0.6));  // one overlap
  // Overlap on both sides of the circle: 2(2r) - 2pi.
  CHECK(psi_circle(3.0, 2.0) == doctest::Approx(8.0 - 2.0 * pi));
  CHECK(psi_circle(1.0, 3.5) == doctest::Approx(2.0 * pi));  // whole circle
  CHECK(psi_circle(0.0, 1.2) == doctest::Approx(2.4));
}

TEST_CASE("psi(n, 0, r) is the cap area") {
  for (int n : {1, 2, 3, 4}) {
    for (double r : {0.3, 1.0, 2.5}) {
      CHECK(psi(n, 0.0, r).value == doctest::Approx(cap_area(n, r)).epsilon(1e-9));
    }
  }
  CHECK(psi(2, 0.0, 1.0).value == doctest::Approx(2.0 * pi * (1.0 - std::cos(1.0))).epsilon(1e-12));
}

TEST_CASE("frozen S^2 and S^3 values") {
  // Recomputed by polar slicing (independent oracle) before freezing.
  CHECK(psi(2, 1.0, 1.0).value == doctest::Approx(1.2381525145977283).epsilon(1e-10));
  CHECK(psi(2, 0.5, 1.3).value == doctest::Approx(3.6396764088467671).epsilon(1e-10));
  CHECK(psi(2, pi / 2, pi / 2).value == doctest::Approx(pi).epsilon(1e-10));
  CHECK(psi(2, 0.3, 0.2).value == doctest::Approx(0.018188250672201441).epsilon(1e-8));
  CHECK(psi(2, 2.0, 2.5).value == doctest::Approx(10.06746758829045).epsilon(1e-10));
  CHECK(psi(3, 0.8, 0.9).value == doctest::Approx(1.1086243257203418).epsilon(1e-7));
  CHECK(psi(3, 1.5, 2.0).value == doctest::Approx(11.245226828813186).epsilon(1e-7));
}

TEST_CASE("recurrence agrees with polar slicing") {
  for (int n : {2, 3}) {
    const double tol = default_psi_tol(n);
    for (double u : {0.1, 0.7, 1.6, 2.4, 3.1}) {
      for (double r : {0.05, 0.4, 1.0, 1.57, 2.2, 2.9, 3.3}) {
        CAPTURE(n);
        CAPTURE(u);
        CAPTURE(r);
        CHECK(std::abs(psi(n, u, r).value - oracle::psi_polar(n, u, r)) <= 5.0 * tol);
      }
    }
  }
}

TEST_CASE("symmetry and monotonicity") {
  for (int n : {1, 2, 3}) {
    const double s = sphere_area(n);
    for (double u : {0.4, 1.9}) {
      double prev = -1.0;
      for (double r = 0.1; r < 3.2; r += 0.3) {
        const double v = psi(n, u, r).value;
        CHECK(v >= prev - 1e-9);
        prev = v;
        // Complement identity: psi(u, r) - psi(u, pi - r) = 2 phi(r) - sigma.
        if (r < pi) {
          CHECK(v - psi(n, u, pi - r).value == doctest::Approx(2.0 * cap_area(n, r) - s).epsilon(1e-7));
        }
      }
    }
  }
}

TEST_CASE("psi is zero for disjoint caps and sigma for r >= pi") {
  CHECK(psi(2, 2.0, 0.9).value == 0.0);
  CHECK(psi(3, 2.0, 3.2).value == doctest::Approx(sphere_area(3)));
}

TEST_CASE("Monte Carlo estimator is consistent") {
  Rng rng(2026);
  const McEstimate m = psi_mc(2, 1.0, 1.0, 400000, rng);
  CHECK(m.samples == 400000);
  CHECK(std::abs(m.estimate - psi(2, 1.0, 1.0).value) < 4.0 * m.std_error);
  Rng rng3(99);
  const McEstimate m3 = psi_mc(3, 1.5, 2.0, 400000, rng3);
  CHECK(std::abs(m3.estimate - psi(3, 1.5, 2.0).value) < 4.0 * m3.std_error);
}

TEST_CASE("psi_h switches to psi - sigma above the critical index") {
  CHECK(psi_h(2, 0.4, 1.0, 1.0) == doctest::Approx(psi(2, 1.0, 1.0).value));
  CHECK(psi_h(2, 1.5, 1.0, 1.0) == doctest::Approx(psi(2, 1.0, 1.0).value - 4.0 * pi));
  CHECK_THROWS_AS(psi_h(2, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(psi(2, -0.1, 1.0), DomainError);
  CHECK_THROWS_AS(psi(2, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(psi(0, 1.0, 1.0), DomainError);
}
