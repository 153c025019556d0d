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

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ballfield/config.hpp"

using namespace ballfield;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args) { return parse_config(args).config; }

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("grids") {
  const auto g = parse_grid("0:3.14:50");
  CHECK(g.size() == 50);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 3.14);
  CHECK(parse_grid("0.5, 1,2") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(parse_grid("2:2:1") == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:2.5"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a,b"), ConfigError);
}

TEST_CASE("points") {
  const auto p = parse_points("0.5,1;2");
  REQUIRE(p.size() == 2);
  CHECK(p[0] == std::vector<double>{0.5, 1.0});
  CHECK(p[1] == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_points("1;;2"), ConfigError);
}

TEST_CASE("defaults and per-subcommand formats") {
  const RunConfig k = parse({"kernel", "--n", "1", "--H", "0.25", "--u-grid", "0:3.14:50"});
  CHECK(k.subcommand == "kernel");
  CHECK(k.u_grid.size() == 50);
  CHECK(k.format == "csv");
  CHECK(k.seed == 2026);
  CHECK(parse({"kernel", "--asymptote"}).format == "json");
  CHECK(parse({"lass"}).eps_grid == std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4});
  CHECK(parse({"scaling"}).rho_ladder == std::vector<double>{10.0, 100.0, 1000.0});
  const RunConfig s = parse({"simulate", "--n", "3", "--points", "0.5;1,2"});
  CHECK(s.points[0] == std::vector<double>{0.5, 0.0, 0.0});
  CHECK(s.points[1] == std::vector<double>{1.0, 2.0, 0.0});
}

TEST_CASE("the excluded index is rejected with the constraint in the message") {
  try {
    parse({"kernel", "--H", "0.5", "--n", "1"});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2H != n") != std::string::npos);
  }
  CHECK_NOTHROW(parse({"psi", "--n", "1"}));  // psi has no H
}

TEST_CASE("constraint violations") {
  CHECK_THROWS_AS(parse({"simulate", "--replicates", "0"}), ConfigError);
  CHECK_THROWS_AS(parse({"simulate", "--rho", "0.5"}), ConfigError);
  CHECK_THROWS_AS(parse({"lass", "--eps-grid", "1e-3,1e-2"}), ConfigError);
  CHECK_THROWS_AS(parse({"kernel", "--rel-tol", "0"}), ConfigError);
  CHECK_THROWS_AS(parse({"kernel", "--rho", "2"}), ConfigError);
  CHECK_THROWS_AS(parse({"bogus"}), ConfigError);
  CHECK_THROWS_AS(parse({}), ConfigError);
  CHECK_THROWS_AS(parse({"simulate", "--theta", "-1"}), ConfigError);
  CHECK_THROWS_AS(parse({"simulate", "--points", "1,2"}), ConfigError);  // more angles than n
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path p = write_file("ballfield_cfg.json", R"({"n": 2, "H": 0.4, "u_grid": [0.1, 0.2], "rel-tol": 1e-8})");
  const RunConfig c = parse({"kernel", "--config", p.string(), "--H", "0.3"});
  CHECK(c.n == 2);
  CHECK(c.H == 0.3);
  CHECK(c.u_grid == std::vector<double>{0.1, 0.2});
  CHECK(c.rel_tol == 1e-8);
  const fs::path q = write_file("ballfield_cfg2.json", R"({"n": 2, "flavour": 1})");
  try {
    parse({"kernel", "--config", q.string()});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("flavour") != std::string::npos);
  }
  const fs::path r = write_file("ballfield_cfg3.json", R"({"points": [[0.5, 1.0], [2.0]], "asymptote": true})");
  CHECK_THROWS_AS(parse({"simulate", "--config", r.string()}), ConfigError);  // asymptote is not a simulate key
  const fs::path t = write_file("ballfield_cfg4.json", R"({"n": 2, "points": [[0.5, 1.0], [2.0]]})");
  CHECK(parse({"simulate", "--config", t.string()}).points[1] == std::vector<double>{2.0, 0.0});
  CHECK_THROWS_AS(parse({"kernel", "--config", "/nonexistent/cfg.json"}), ConfigError);
}

TEST_CASE("echo contains the subcommand's options but not paths or threads") {
  const RunConfig c = parse({"simulate", "--threads", "4", "--out", "x.csv", "--rho", "20"});
  const Json e = c.echo();
  CHECK(e["subcommand"] == "simulate");
  CHECK(e["rho"] == 20.0);
  CHECK(e["seed"] == 2026);
  CHECK(!e.contains("threads"));
  CHECK(!e.contains("out"));
  CHECK(!e.contains("u-grid"));
  CHECK(c.threads == 4);
}

TEST_CASE("output directory from the environment") {
  ::setenv("BALLFIELD_OUTPUT_DIR", "/tmp/bf-out", 1);
  CHECK(parse({"kernel"}).out == "/tmp/bf-out/kernel.csv");
  CHECK(parse({"lass"}).out == "/tmp/bf-out/lass.json");
  CHECK(parse({"lass", "--out", "-"}).out == "-");
  ::unsetenv("BALLFIELD_OUTPUT_DIR");
  CHECK(parse({"kernel"}).out == "-");
}

TEST_CASE("help is returned as text") {
  const ParseResult r = parse_config(std::vector<std::string>{"--help"});
  CHECK(r.help);
  CHECK(r.help_text.find("selftest") != std::string::npos);
  const ParseResult s = parse_config(std::vector<std::string>{"kernel", "--help"});
  CHECK(s.help);
  CHECK(s.help_text.find("--u-grid") != std::string::npos);
}
