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

// Command-line and config-file handling shared by the CLI and the tests.

#include <cstdint>
#include <string>
#include <vector>

#include "ballfield/error.hpp"
#include "ballfield/report.hpp"

namespace ballfield {

/// Invalid command line or config file.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Process exit status of the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitTolerance = 4,
};

struct RunConfig {
  std::string subcommand;
  int n = 1;
  double H = 0.25;
  double rho = 10.0;
  double theta = 1.0;
  double cutoff = 0.9;
  double r_min = 0.0;
  /// Sphere points as angles (phi_1, ..., phi_n), or tangent coordinates for
  /// `gaussian --tangent`. Short entries are padded with zeros.
  std::vector<std::vector<double>> points;
  std::vector<double> basepoint;  // angles; empty means north pole
  std::vector<double> x;          // tangent atom of the lass dipole
  std::size_t replicates = 10000;
  std::uint64_t seed = 2026;
  unsigned threads = 1;
  double tol = 0.0;  // psi absolute tolerance, 0 selects default_psi_tol(n)
  double rel_tol = 1e-10;
  double tolerance = 0.05;  // lass relative error bound
  double sigmas = 3.0;      // Monte Carlo acceptance band in standard errors
  std::uint64_t mc_samples = 0;
  std::vector<double> u_grid;
  std::vector<double> r_grid;
  std::vector<double> eps_grid;
  std::vector<double> rho_ladder;
  double u = 1.0;
  bool asymptote = false;
  bool tangent = false;
  std::vector<int> criteria;  // empty means all
  std::string format;         // resolved: "csv" or "json"
  std::string out = "-";
  std::string summary;        // simulate: JSON summary path
  std::string samples;        // optional CSV of raw samples

  /// Option names accepted by the subcommand, without leading dashes.
  std::vector<std::string> keys;

  /// Resolved values of the subcommand's options, without paths and thread
  /// count (neither affects results).
  Json echo() const;
};

/// Outcome of parsing: either a configuration or text to print (help).
struct ParseResult {
  RunConfig config;
  bool help = false;
  std::string help_text;
};

/// Parses `argv` (argv[0] is the program name). A `--config FILE` option
/// names a JSON object whose keys are option names of the subcommand; command
/// line flags override its values. Throws ConfigError.
ParseResult parse_config(int argc, const char* const* argv);
ParseResult parse_config(const std::vector<std::string>& args);

/// "a:b:k" gives k evenly spaced values from a to b; otherwise a
/// comma-separated list.
std::vector<double> parse_grid(const std::string& text);

/// "a,b;c,d" gives {{a, b}, {c, d}}.
std::vector<std::vector<double>> parse_points(const std::string& text);

}  // namespace ballfield
