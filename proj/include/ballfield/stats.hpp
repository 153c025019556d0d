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

#include <cstddef>
#include <span>

namespace ballfield {

/// Sample moments with delete-one jackknife standard errors.
struct MomentStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;         // unbiased
  double skewness = 0.0;         // adjusted Fisher-Pearson G1
  double excess_kurtosis = 0.0;  // G2
  double se_mean = 0.0;
  double se_variance = 0.0;
  double se_skewness = 0.0;
  double se_kurtosis = 0.0;
  bool degenerate = false;  // all samples equal; shape statistics reported as 0
};

/// Requires at least 100 samples.
MomentStats moment_stats(std::span<const double> samples);

/// Unbiased sample covariance of two equally long series.
double sample_covariance(std::span<const double> x, std::span<const double> y);

}  // namespace ballfield
