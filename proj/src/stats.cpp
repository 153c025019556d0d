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

#include "ballfield/stats.hpp"

#include <cmath>
#include <vector>

#include "ballfield/error.hpp"

namespace ballfield {
namespace {

struct Shape {
  double mean, variance, skewness, kurtosis;
  bool degenerate;
};

// Statistics of N values from power sums of (x - shift).
Shape from_sums(double N, double shift, double s1, double s2, double s3, double s4) {
  const double m = s1 / N;
  const double e2 = s2 / N, e3 = s3 / N, e4 = s4 / N;
  const double c2 = std::max(0.0, e2 - m * m);
  const double c3 = e3 - 3.0 * m * e2 + 2.0 * m * m * m;
  const double c4 = e4 - 4.0 * m * e3 + 6.0 * m * m * e2 - 3.0 * m * m * m * m;
  Shape s{shift + m, c2 * N / (N - 1.0), 0.0, 0.0, false};
  if (!(c2 > 0.0)) {
    s.degenerate = true;
    return s;
  }
  const double g1 = c3 / std::pow(c2, 1.5);
  const double g2 = c4 / (c2 * c2) - 3.0;
  s.skewness = g1 * std::sqrt(N * (N - 1.0)) / (N - 2.0);
  s.kurtosis = ((N + 1.0) * g2 + 6.0) * (N - 1.0) / ((N - 2.0) * (N - 3.0));
  return s;
}

}  // namespace

MomentStats moment_stats(std::span<const double> x) {
  if (x.size() < 100) throw DomainError("moment_stats needs at least 100 samples");
  const double N = static_cast<double>(x.size());
  double shift = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericError("moment_stats: non-finite sample");
    shift += v;
  }
  shift /= N;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (double v : x) {
    const double d = v - shift;
    const double d2 = d * d;
    s1 += d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  const Shape full = from_sums(N, shift, s1, s2, s3, s4);
  MomentStats out;
  out.count = x.size();
  out.mean = full.mean;
  out.variance = full.variance;
  out.skewness = full.skewness;
  out.excess_kurtosis = full.kurtosis;
  out.degenerate = full.degenerate;
  if (full.degenerate) {
    out.variance = 0.0;
    return out;
  }

  // Delete-one jackknife, O(N) through the power sums.
  std::vector<double> jm(x.size()), jv(x.size()), js(x.size()), jk(x.size());
  double am = 0, av = 0, as = 0, ak = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - shift;
    const double d2 = d * d;
    const Shape s = from_sums(N - 1.0, shift, s1 - d, s2 - d2, s3 - d2 * d, s4 - d2 * d2);
    jm[i] = s.mean;
    jv[i] = s.variance;
    js[i] = s.skewness;
    jk[i] = s.kurtosis;
    am += s.mean;
    av += s.variance;
    as += s.skewness;
    ak += s.kurtosis;
  }
  am /= N;
  av /= N;
  as /= N;
  ak /= N;
  double vm = 0, vv = 0, vs = 0, vk = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vm += (jm[i] - am) * (jm[i] - am);
    vv += (jv[i] - av) * (jv[i] - av);
    vs += (js[i] - as) * (js[i] - as);
    vk += (jk[i] - ak) * (jk[i] - ak);
  }
  const double f = (N - 1.0) / N;
  out.se_mean = std::sqrt(f * vm);
  out.se_variance = std::sqrt(f * vv);
  out.se_skewness = std::sqrt(f * vs);
  out.se_kurtosis = std::sqrt(f * vk);
  return out;
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("sample_covariance: bad lengths");
  const double N = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= N;
  my /= N;
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / (N - 1.0);
}

}  // namespace ballfield
