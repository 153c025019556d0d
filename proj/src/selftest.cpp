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

#include "ballfield/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ballfield/ball_process.hpp"
#include "ballfield/cap_overlap.hpp"
#include "ballfield/error.hpp"
#include "ballfield/kernel.hpp"
#include "ballfield/limits_lab.hpp"
#include "ballfield/stats.hpp"

namespace ballfield {
namespace {

using std::numbers::pi;

std::string label(const char* fmt_prefix, std::initializer_list<std::pair<const char*, double>> vals) {
  std::string s = fmt_prefix;
  for (const auto& [k, v] : vals) s += std::string(" ") + k + "=" + format_double(v);
  return s;
}

// Stream indices below are fixed per criterion and cell so that criteria can
// run in any order or alone.

CriterionResult circle_exactness(const SelftestOptions& o) {
  CriterionResult res;
  const double us[] = {0.0, 0.6, 1.2, 1.8, 2.4, 3.0};
  const double rs[] = {0.2, 0.9, 1.6, 2.3, 3.0, 3.5};
  int cell = 0;
  for (double u : us) {
    for (double r : rs) {
      Rng rng = make_stream(o.seed, 100 + cell++);
      const McEstimate mc = psi_mc(1, u, r, 1000000, rng);
      res.checks.push_back(make_check(label("psi_1", {{"u", u}, {"r", r}}), psi_circle(u, r), mc.estimate,
                                      3.0 * mc.std_error + 1e-12, "abs"));
    }
  }
  return res;
}

CriterionResult recurrence(const SelftestOptions& o) {
  CriterionResult res;
  const double us2[] = {0.25, 0.9, 1.5, 2.2, 3.0};
  const double rs2[] = {0.3, 0.8, 1.4, 2.0, 2.7};
  int cell = 0;
  for (double u : us2) {
    for (double r : rs2) {
      Rng rng = make_stream(o.seed, 200 + cell++);
      const McEstimate mc = psi_mc(2, u, r, 1000000, rng);
      const PsiResult p = psi(2, u, r);
      res.checks.push_back(make_check(label("psi_2", {{"u", u}, {"r", r}}), p.value, mc.estimate,
                                      3.0 * mc.std_error + p.error, "abs"));
    }
  }
  for (double r : {0.3, 1.0, 2.5}) {
    res.checks.push_back(make_check(label("psi_2", {{"u", 0.0}, {"r", r}}), psi(2, 0.0, r).value,
                                    2.0 * pi * (1.0 - std::cos(r)), 1e-6, "abs"));
  }
  const double us3[] = {0.4, 1.3, 2.4};
  const double rs3[] = {0.5, 1.5, 2.5};
  cell = 0;
  for (double u : us3) {
    for (double r : rs3) {
      Rng rng = make_stream(o.seed, 300 + cell++);
      const McEstimate mc = psi_mc(3, u, r, 1000000, rng);
      const PsiResult p = psi(3, u, r);
      res.checks.push_back(make_check(label("psi_3", {{"u", u}, {"r", r}}), p.value, mc.estimate,
                                      3.0 * mc.std_error + p.error, "abs"));
    }
  }
  return res;
}

CriterionResult kernel_constant(const SelftestOptions&) {
  CriterionResult res;
  const KernelSpec spec(1, 0.25);
  const double k0 = kernel_value(spec, 0.0);
  res.checks.push_back(make_check("K(0) n=1 H=0.25", k0, 8.0 * std::sqrt(pi), 1e-6, "rel"));
  double printed_gap = 0.0;
  double printed_at = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double u = pi * i / 49.0;
    const double k = kernel_value(spec, u);
    res.checks.push_back(make_check(label("closed form", {{"u", u}}), k, kernel_closed_form_circle(0.25, u), 1e-6,
                                    "abs"));
    const double gap = std::abs(kernel_closed_form_circle_alt(0.25, u) - k);
    if (gap > printed_gap) {
      printed_gap = gap;
      printed_at = u;
    }
  }
  // The (2H)^{2H} variant must disagree with quadrature somewhere on the grid.
  res.checks.push_back(make_check("printed (2H)^{2H} variant, max discrepancy", printed_gap, 0.0, 1e-6, "exceeds"));
  res.notes["printed_variant_max_discrepancy"] = printed_gap;
  res.notes["printed_variant_worst_u"] = printed_at;
  return res;
}

CriterionResult increment_formula(const SelftestOptions&) {
  CriterionResult res;
  for (double H : {0.1, 0.25, 0.4}) {
    const KernelSpec spec(1, H);
    for (double u : {0.5, 1.0, 2.0, 3.0}) {
      const double target = 2.0 / (H * (1.0 - 2.0 * H) * std::pow(2.0, 2.0 * H)) *
                            (std::pow(u, 2.0 * H) + std::pow(2.0 * pi - u, 2.0 * H) - std::pow(2.0 * pi, 2.0 * H));
      res.checks.push_back(
          make_check(label("2(K(0)-K(u))", {{"H", H}, {"u", u}}), increment_variance(spec, u), target, 1e-6, "rel"));
    }
  }
  return res;
}

CriterionResult both_regimes(const SelftestOptions& o) {
  CriterionResult res;
  const std::pair<int, double> configs[] = {{1, 0.25}, {1, 0.75}, {2, 0.4}, {2, 1.5}};
  int index = 0;
  for (const auto& [n, H] : configs) {
    const KernelSpec spec(n, H);
    const double k0 = kernel_value(spec, 0.0);
    res.checks.push_back(make_check(label("K(0) finite", {{"n", n}, {"H", H}}), std::isfinite(k0) ? 1.0 : 0.0, 1.0,
                                    0.0, "true"));
    double worst = std::numeric_limits<double>::infinity();
    bool finite = true;
    for (int set = 0; set < 20; ++set) {
      Rng rng = make_stream(o.seed, 500 + 20 * index + set);
      std::vector<SpherePoint> pts;
      for (int i = 0; i < 10; ++i) pts.push_back(sample_uniform(n, rng));
      std::optional<SpherePoint> base;
      if (spec.above_critical()) base = sample_uniform(n, rng);
      const Eigen::MatrixXd m = covariance_matrix(spec, pts, base);
      finite = finite && m.allFinite();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
      const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
      worst = std::min(worst, scale > 0.0 ? eig.eigenvalues().minCoeff() / scale : 0.0);
    }
    res.checks.push_back(make_check(label("covariance finite", {{"n", n}, {"H", H}}), finite ? 1.0 : 0.0, 1.0, 0.0,
                                    "true"));
    res.checks.push_back(
        make_check(label("min eigenvalue / norm", {{"n", n}, {"H", H}}), worst, 0.0, 1e-8, "min"));
    ++index;
  }
  return res;
}

ModelSpec circle_model(double rho) {
  ModelSpec spec;
  spec.law = RadiusLaw{1, 0.25, 0.9, 0.0};
  spec.rho = rho;
  spec.theta = 1.0;
  return spec;
}

DiscreteSphereMeasure unit_dipole() {
  const double angle = 1.0;
  return DiscreteSphereMeasure::dipole(SpherePoint::north_pole(1), SpherePoint::from_angles(std::span(&angle, 1)));
}

CriterionResult exact_variance(const SelftestOptions& o) {
  CriterionResult res;
  const KernelSpec kspec(1, 0.25);
  const DiscreteSphereMeasure mu = unit_dipole();
  const double target = quadratic_form(kspec, mu, mu);
  int index = 0;
  for (double rho : {10.0, 100.0}) {
    const ModelSpec spec = circle_model(rho);
    const double norm = normalizer(spec);
    const Moments ex = moments_exact(spec, mu);
    res.checks.push_back(
        make_check(label("exact Var/n(rho)^2", {{"rho", rho}}), ex.variance / (norm * norm), target, 1e-5, "rel"));
    ScalingOptions opt;
    opt.replicates = 10000;
    opt.seed = stream_seed(o.seed, 600 + index++);
    opt.threads = o.threads;
    const GaussianityReport g = scaling_experiment(spec, std::span(&mu, 1), opt);
    const MomentStats& st = g.measures[0].stats;
    res.checks.push_back(
        make_check(label("empirical Var/n(rho)^2", {{"rho", rho}}), st.variance, target, 3.0 * st.se_variance, "abs"));
  }
  return res;
}

CriterionResult gaussianization(const SelftestOptions& o) {
  CriterionResult res;
  const DiscreteSphereMeasure mu = unit_dipole();
  DiscreteSphereMeasure point;
  point.add(SpherePoint::north_pole(1), 1.0);
  std::vector<double> skew;
  std::vector<double> kurt;
  Json ladder = Json::array();
  int index = 0;
  for (double rho : {10.0, 100.0, 1000.0}) {
    const ModelSpec spec = circle_model(rho);
    ScalingOptions opt;
    opt.replicates = 10000;
    opt.seed = stream_seed(o.seed, 700 + index++);
    opt.threads = o.threads;
    const GaussianityReport g = scaling_experiment(spec, std::span(&mu, 1), opt);
    const MeasureSummary& m = g.measures[0];
    skew.push_back(m.stats.skewness);
    kurt.push_back(m.stats.excess_kurtosis);
    // Single-atom diagnostic: X(delta_z) is Poisson, its skewness is exact.
    const double lambda = moments_exact(spec, point).mean;
    Json row = Json::object();
    row["rho"] = rho;
    row["skewness"] = m.stats.skewness;
    row["se_skewness"] = m.stats.se_skewness;
    row["excess_kurtosis"] = m.stats.excess_kurtosis;
    row["se_kurtosis"] = m.stats.se_kurtosis;
    row["exact_skewness"] = m.exact_skewness.value_or(0.0);
    row["exact_excess_kurtosis"] = m.exact_excess_kurtosis.value_or(0.0);
    row["mean_balls"] = g.mean_balls;
    row["point_exact_skewness"] = 1.0 / std::sqrt(lambda);
    ladder.push_back(row);
  }
  res.notes["ladder"] = ladder;
  const bool decreasing = std::abs(skew[1]) < std::abs(skew[0]) && std::abs(skew[2]) < std::abs(skew[1]);
  res.checks.push_back(make_check("|skewness| decreasing along rho", decreasing ? 1.0 : 0.0, 1.0, 0.0, "true"));
  res.checks.push_back(make_check("skewness at rho=1000", skew[2], 0.0, 0.1, "abs"));
  res.checks.push_back(make_check("excess kurtosis at rho=1000", kurt[2], 0.0, 0.2, "abs"));
  return res;
}

CriterionResult asymptote(const SelftestOptions&) {
  CriterionResult res;
  res.checks.push_back(
      make_check("K2 n=1 H=0.25", k2_constant(1, 0.25), 1.0 / (0.25 * 0.5 * std::sqrt(2.0)), 1e-8, "abs"));
  const std::vector<double> grid = log_grid(1e-4, 1e-2, 21);
  for (int n : {1, 2}) {
    const AsymptoteFit fit = asymptote_fit(KernelSpec(n, 0.25), grid);
    res.checks.push_back(make_check(label("fitted exponent", {{"n", n}, {"H", 0.25}}), fit.exponent, 0.5, 0.02, "abs"));
    res.checks.push_back(make_check(label("fitted K2", {{"n", n}, {"H", 0.25}}), fit.k2_estimate,
                                    k2_constant(n, 0.25), 0.03, "rel"));
    res.notes[label("k2_intercept", {{"n", n}})] = fit.k2_intercept;
  }
  const AsymptoteFit fit = asymptote_fit(KernelSpec(2, 0.75), grid);
  res.checks.push_back(make_check("fitted exponent n=2 H=0.75", fit.exponent, 1.0, 0.05, "abs"));
  return res;
}

CriterionResult lass(const SelftestOptions&) {
  CriterionResult res;
  const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
  for (int n : {1, 2}) {
    const KernelSpec spec(n, 0.25);
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    x[0] = 1.0;
    const LassReport rep = lass_experiment(spec, SpherePoint::north_pole(n), TangentMeasure::dipole(x), eps);
    res.checks.push_back(
        make_check(label("ratio at eps=1e-4", {{"n", n}}), rep.ratio.back(), rep.target, 0.05, "rel"));
    res.checks.push_back(make_check(label("error decreasing on eps 1e-2..1e-4", {{"n", n}}),
                                    rep.error_decreasing ? 1.0 : 0.0, 1.0, 0.0, "true"));
    Json rows = Json::array();
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
      rows.push_back({{"eps", rep.eps[i]}, {"ratio", rep.ratio[i]}, {"rel_error", rep.rel_error[i]}});
    }
    res.notes["n=" + std::to_string(n)] = rows;
  }
  return res;
}

CriterionResult tangent_fbm(const SelftestOptions& o) {
  CriterionResult res;
  const double H = 0.25;
  for (int n : {1, 2}) {
    std::vector<std::vector<double>> pts;
    if (n == 1) {
      pts = {{0.5}, {1.0}, {1.7}, {2.5}, {3.6}, {4.2}};
    } else {
      pts = {{0.5, 0.0}, {1.0, 0.3}, {0.2, 1.1}, {-0.6, 0.4}, {-1.0, -0.8}, {0.9, -1.2}};
    }
    const double k2 = k2_constant(n, H);
    Rng rng = make_stream(o.seed, 1000 + n);
    const std::size_t reps = 100000;
    const Eigen::MatrixXd s = sample_tangent_field(pts, H, k2, reps, rng);
    std::vector<double> ratios;
    for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
      const Eigen::VectorXd d = s.col(static_cast<Eigen::Index>(p)) - s.col(static_cast<Eigen::Index>(p + 1));
      const double mean = d.mean();
      const double var = (d.array() - mean).square().sum() / static_cast<double>(reps - 1);
      double dist = 0.0;
      for (int k = 0; k < n; ++k) dist += (pts[p][k] - pts[p + 1][k]) * (pts[p][k] - pts[p + 1][k]);
      ratios.push_back(var / std::pow(std::sqrt(dist), 2.0 * H));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    res.checks.push_back(make_check(label("max/min - 1 of Var/|x-x'|^{2H}", {{"n", n}}), *hi / *lo - 1.0, 0.0, 0.03,
                                    "abs"));
    res.notes[label("ratios", {{"n", n}})] = ratios;
    res.notes[label("ratio_target_2K2", {{"n", n}})] = 2.0 * k2;
  }
  return res;
}

struct CriterionDef {
  int id;
  const char* title;
  double budget;
  CriterionResult (*run)(const SelftestOptions&);
};

const CriterionDef kCriteria[] = {
    {1, "psi_1 closed form agrees with Monte Carlo", 60.0, circle_exactness},
    {2, "psi_2 and psi_3 recurrence agree with Monte Carlo", 300.0, recurrence},
    {3, "kernel constant and circle closed form", 0.0, kernel_constant},
    {4, "increment variance formula on the circle", 0.0, increment_formula},
    {5, "kernel finite and covariances PSD in both regimes", 120.0, both_regimes},
    {6, "exact variance identity at finite rho", 600.0, exact_variance},
    {7, "Gaussianization along the rho ladder", 1800.0, gaussianization},
    {8, "K2 constant and small-u asymptote", 300.0, asymptote},
    {9, "local self-similarity ratio", 300.0, lass},
    {10, "tangent field is fractional Brownian", 0.0, tangent_fbm},
};

Json cell_value(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

Check make_check(std::string name, double estimate, double target, double tolerance, std::string rule) {
  Check c{std::move(name), estimate, target, tolerance, std::move(rule), false};
  if (!std::isfinite(estimate) || !std::isfinite(target)) return c;
  const double gap = std::abs(estimate - target);
  if (c.rule == "abs") {
    c.passed = gap <= tolerance;
  } else if (c.rule == "rel") {
    c.passed = target != 0.0 && std::abs(estimate / target - 1.0) <= tolerance;
  } else if (c.rule == "min") {
    c.passed = estimate >= target - tolerance;
  } else if (c.rule == "exceeds") {
    c.passed = gap > tolerance;
  } else if (c.rule == "true") {
    c.passed = estimate == 1.0;
  } else {
    throw DomainError("unknown check rule '" + c.rule + "'");
  }
  return c;
}

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& d : kCriteria) ids.push_back(d.id);
  return ids;
}

CriterionResult run_criterion(int id, const SelftestOptions& options) {
  const auto it = std::find_if(std::begin(kCriteria), std::end(kCriteria),
                               [id](const CriterionDef& d) { return d.id == id; });
  if (it == std::end(kCriteria)) throw DomainError("unknown criterion id " + std::to_string(id));
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult res;
  try {
    res = it->run(options);
    res.passed = !res.checks.empty() &&
                 std::all_of(res.checks.begin(), res.checks.end(), [](const Check& c) { return c.passed; });
  } catch (const Error& e) {
    res = CriterionResult{};
    res.notes["error"] = e.what();
    res.passed = false;
  }
  res.id = it->id;
  res.title = it->title;
  res.budget_seconds = it->budget;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

Report selftest_report(const std::vector<CriterionResult>& results, const Json& config, std::uint64_t seed) {
  Report rep;
  rep.kind = "selftest";
  rep.config = config;
  rep.seed = seed;
  Table table;
  table.columns = {"criterion", "check", "estimate", "target", "tolerance", "rule", "passed"};
  Json list = Json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"name", c.name},
                        {"estimate", cell_value(c.estimate)},
                        {"target", cell_value(c.target)},
                        {"tolerance", c.tolerance},
                        {"rule", c.rule},
                        {"passed", c.passed}});
      const auto cell = [](double v) -> Cell {
        if (std::isfinite(v)) return v;
        return cell_value(v).get<std::string>();
      };
      table.rows.push_back({Cell(std::int64_t{r.id}), Cell(c.name), cell(c.estimate), cell(c.target),
                            Cell(c.tolerance), Cell(c.rule), Cell(std::string(c.passed ? "PASS" : "FAIL"))});
    }
    list.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"checks", checks}, {"notes", r.notes}});
  }
  rep.results["criteria"] = list;
  rep.results["passed"] = all;
  rep.table = std::move(table);
  return rep;
}

}  // namespace ballfield
