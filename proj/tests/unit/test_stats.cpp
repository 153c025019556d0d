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
#include <random>
#include <vector>

#include "ballfield/error.hpp"
#include "ballfield/stats.hpp"

using namespace ballfield;

TEST_CASE("constant samples are flagged") {
  const std::vector<double> x(500, 3.0);
  const MomentStats s = moment_stats(x);
  CHECK(s.degenerate);
  CHECK(s.variance == 0.0);
  CHECK(s.mean == 3.0);
  CHECK(s.skewness == 0.0);
}

TEST_CASE("at least 100 samples are required") {
  const std::vector<double> x(99, 1.0);
  CHECK_THROWS_AS(moment_stats(x), DomainError);
}

TEST_CASE("standard normal input") {
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> g;
  std::vector<double> x(100000);
  for (double& v : x) v = g(rng);
  const MomentStats s = moment_stats(x);
  const double N = static_cast<double>(x.size());
  CHECK(std::abs(s.skewness) <= 3.0 * std::sqrt(6.0 / N));
  CHECK(std::abs(s.excess_kurtosis) <= 3.0 * std::sqrt(24.0 / N));
  CHECK(s.variance == doctest::Approx(1.0).epsilon(0.02));
  // Jackknife errors agree with the classical asymptotic ones.
  CHECK(s.se_mean == doctest::Approx(1.0 / std::sqrt(N)).epsilon(0.05));
  CHECK(s.se_skewness == doctest::Approx(std::sqrt(6.0 / N)).epsilon(0.1));
  CHECK(s.se_kurtosis == doctest::Approx(std::sqrt(24.0 / N)).epsilon(0.15));
}

TEST_CASE("Poisson(4) input has skewness 1/2") {
  std::mt19937_64 rng(7);
  std::poisson_distribution<int> p(4.0);
  std::vector<double> x(100000);
  for (double& v : x) v = p(rng);
  const MomentStats s = moment_stats(x);
  CHECK(std::abs(s.skewness - 0.5) < 3.0 * s.se_skewness);
  CHECK(std::abs(s.excess_kurtosis - 0.25) < 3.0 * s.se_kurtosis);
  CHECK(std::abs(s.mean - 4.0) < 3.0 * s.se_mean);
}

TEST_CASE("unbiased estimators on a small exact set") {
  std::vector<double> x;
  for (int rep = 0; rep < 25; ++rep) {
    for (double v : {1.0, 2.0, 3.0, 10.0}) x.push_back(v);
  }
  const MomentStats s = moment_stats(x);
  CHECK(s.mean == doctest::Approx(4.0));
  // Population variance 12.5, unbiased 12.5 * 100 / 99.
  CHECK(s.variance == doctest::Approx(12.5 * 100.0 / 99.0));
  CHECK(s.skewness > 0.0);
  CHECK(sample_covariance(x, x) == doctest::Approx(s.variance));
}
