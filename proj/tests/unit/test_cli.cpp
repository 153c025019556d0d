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
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "ballfield/report.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "ballfield_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(BALLFIELD_CLI_PATH) + " " + args + " 2>" + (kDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++n;
  }
  return n - 1;  // header
}

struct DirGuard {
  DirGuard() { fs::create_directories(kDir); }
};
const DirGuard guard;

}  // namespace

TEST_CASE("kernel smoke test emits 50 rows") {
  const fs::path out = kDir / "kernel.csv";
  REQUIRE(run("kernel --n 1 --H 0.25 --u-grid 0:3.14:50 --out " + out.string()) == 0);
  CHECK(data_rows(slurp(out)) == 50);
}

TEST_CASE("2H = n is a config error") {
  CHECK(run("kernel --H 0.5 --n 1") == 2);
  CHECK(slurp(kDir / "stderr.txt").find("2H != n") != std::string::npos);
  CHECK(run("kernel --no-such-flag") == 2);
}

TEST_CASE("same seed gives byte-identical outputs across thread counts") {
  const fs::path a = kDir / "sim_a.csv", b = kDir / "sim_b.csv";
  const std::string base = "simulate --n 2 --H 0.4 --rho 3 --replicates 300 --points '0;0.7' ";
  REQUIRE(run(base + "--threads 1 --out " + a.string()) == 0);
  REQUIRE(run(base + "--threads 3 --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  const fs::path c = kDir / "sim_c.json", d = kDir / "sim_d.json";
  REQUIRE(run(base + "--format json --out " + c.string()) == 0);
  REQUIRE(run(base + "--format json --out " + d.string()) == 0);
  CHECK(slurp(c) == slurp(d));
  const ballfield::Json j = ballfield::Json::parse(slurp(c));
  CHECK(j["results"]["points"].size() == 2);
  CHECK(j["table"]["rows"].size() == 300);
}

TEST_CASE("psi rows carry method and error estimate") {
  const fs::path out = kDir / "psi.csv";
  REQUIRE(run("psi --n 2 --u-grid 0.5,1 --r-grid 1 --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("u,r,psi,method,error_estimate,tolerance") != std::string::npos);
  CHECK(data_rows(csv) == 2);
}

TEST_CASE("json subcommands") {
  const fs::path lass = kDir / "lass.json";
  REQUIRE(run("lass --n 1 --H 0.25 --out " + lass.string()) == 0);
  CHECK(ballfield::Json::parse(slurp(lass))["results"]["passed"] == true);
  const fs::path fit = kDir / "fit.json";
  REQUIRE(run("kernel --n 1 --H 0.25 --asymptote --out " + fit.string()) == 0);
  CHECK(ballfield::Json::parse(slurp(fit))["results"]["exponent"]["passed"] == true);
  const fs::path g = kDir / "g.json", raw = kDir / "g_samples.csv";
  REQUIRE(run("gaussian --n 2 --H 0.4 --replicates 2000 --samples " + raw.string() + " --out " + g.string()) == 0);
  CHECK(data_rows(slurp(raw)) == 2000);
  const fs::path sc = kDir / "scaling.json";
  REQUIRE(run("scaling --n 1 --H 0.25 --rho-ladder 5,10 --replicates 500 --out " + sc.string()) == 0);
  CHECK(ballfield::Json::parse(slurp(sc))["results"]["ladder"].size() == 2);
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = kDir / "outdir";
  fs::create_directories(dir);
  const std::string cmd = "BALLFIELD_OUTPUT_DIR=" + dir.string() + " " + BALLFIELD_CLI_PATH + " lass --n 1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "lass.json"));
}

TEST_CASE("unwritable output is an IO error") {
  CHECK(run("kernel --u-grid 1 --out /nonexistent-dir/k.csv") == 2);
  CHECK(slurp(kDir / "stderr.txt").find("/nonexistent-dir/k.csv") != std::string::npos);
}
