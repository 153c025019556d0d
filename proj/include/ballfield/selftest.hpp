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

// Acceptance criteria 1-10 as library code, shared by `ballfield selftest`
// and the acceptance test binary.

#include <cstdint>
#include <string>
#include <vector>

#include "ballfield/report.hpp"

namespace ballfield {

struct SelftestOptions {
  std::uint64_t seed = 2026;
  unsigned threads = 1;
};

/// One numeric comparison. `rule` names the test applied:
///   "abs":     |estimate - target| <= tolerance
///   "rel":     |estimate / target - 1| <= tolerance
///   "min":     estimate >= target - tolerance
///   "exceeds": |estimate - target| > tolerance
///   "true":    estimate == 1 (target 1, tolerance 0)
struct Check {
  std::string name;
  double estimate = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string rule;
  bool passed = false;
};

Check make_check(std::string name, double estimate, double target, double tolerance, std::string rule);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::vector<Check> checks;
  Json notes = Json::object();  // diagnostics that are not pass/fail
  double seconds = 0.0;         // wall time, not part of the report
  double budget_seconds = 0.0;  // 0 means no runtime bound
  bool within_budget() const { return budget_seconds <= 0.0 || seconds <= budget_seconds; }
};

/// Ids 1..10.
std::vector<int> criterion_ids();

/// Runs one criterion. Exceptions from the library are caught and turn the
/// criterion into a failure whose notes carry the message.
CriterionResult run_criterion(int id, const SelftestOptions& options);

/// Report of kind "selftest". Wall times are left out so that reruns with
/// the same seed render identically.
Report selftest_report(const std::vector<CriterionResult>& results, const Json& config, std::uint64_t seed);

}  // namespace ballfield
