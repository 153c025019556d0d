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

// ballfield: command-line front end.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "ballfield/ball_process.hpp"
#include "ballfield/cap_overlap.hpp"
#include "ballfield/config.hpp"
#include "ballfield/error.hpp"
#include "ballfield/kernel.hpp"
#include "ballfield/limits_lab.hpp"
#include "ballfield/report.hpp"
#include "ballfield/selftest.hpp"
#include "ballfield/stats.hpp"

namespace {

using namespace ballfield;

Report base_report(const RunConfig& c, const std::string& kind) {
  Report r;
  r.kind = kind;
  r.config = c.echo();
  r.seed = c.seed;
  return r;
}

SpherePoint point_from_angles(const std::vector<double>& angles) { return SpherePoint::from_angles(angles); }

ModelSpec model_from(const RunConfig& c, double rho) {
  ModelSpec spec;
  spec.law = RadiusLaw{c.n, c.H, c.cutoff, c.r_min};
  spec.rho = rho;
  spec.theta = c.theta;
  spec.validate();
  return spec;
}

Cell yes_no(bool ok) { return std::string(ok ? "PASS" : "FAIL"); }

void emit_samples(const RunConfig& c, const std::string& kind, Table table) {
  if (c.samples.empty()) return;
  Report r = base_report(c, kind);
  r.table = std::move(table);
  emit_report(r, Format::csv, c.samples);
}

int cmd_psi(const RunConfig& c) {
  const double tol = c.tol > 0.0 ? c.tol : default_psi_tol(c.n);
  Report rep = base_report(c, "psi");
  Table t;
  t.columns = {"u", "r", "psi", "method", "error_estimate", "tolerance"};
  const bool mc = c.mc_samples > 0;
  if (mc) t.columns.insert(t.columns.end(), {"mc_estimate", "mc_std_error", "mc_tolerance", "passed"});
  bool all = true;
  std::uint64_t cell = 0;
  for (double u : c.u_grid) {
    for (double r : c.r_grid) {
      const PsiResult p = psi(c.n, u, r, tol);
      std::vector<Cell> row = {u, r, p.value, p.method, p.error, tol};
      if (mc) {
        Rng rng = make_stream(c.seed, cell);
        const McEstimate m = psi_mc(c.n, u, r, c.mc_samples, rng);
        const double band = 3.0 * m.std_error + p.error + 1e-12;
        const bool ok = std::abs(p.value - m.estimate) <= band;
        all = all && ok;
        row.insert(row.end(), {m.estimate, m.std_error, band, yes_no(ok)});
      }
      ++cell;
      t.rows.push_back(std::move(row));
    }
  }
  rep.results["rows"] = static_cast<std::int64_t>(t.rows.size());
  if (mc) rep.results["passed"] = all;
  rep.table = std::move(t);
  emit_report(rep, parse_format(c.format), c.out);
  return all ? kExitOk : kExitTolerance;
}

int cmd_kernel(const RunConfig& c) {
  const KernelSpec spec(c.n, c.H, c.rel_tol);
  Report rep = base_report(c, c.asymptote ? "kernel-asymptote" : "kernel");
  Table t;
  if (!c.asymptote) {
    t.columns = {"u", "kernel", "increment_variance"};
    for (double u : c.u_grid) t.rows.push_back({u, kernel_value(spec, u), increment_variance(spec, u)});
    rep.results["rows"] = static_cast<std::int64_t>(t.rows.size());
    rep.results["k0"] = kernel_value(spec, 0.0);
    rep.table = std::move(t);
    emit_report(rep, parse_format(c.format), c.out);
    return kExitOk;
  }
  const AsymptoteFit fit = asymptote_fit(spec, c.u_grid);
  const double p = std::min(2.0 * c.H, 1.0);
  const double exp_tol = c.H < 0.5 ? 0.02 : 0.05;
  const bool exp_ok = std::abs(fit.exponent - p) <= exp_tol;
  Json res = Json::object();
  res["k1"] = fit.k1;
  res["exponent"] = {{"estimate", fit.exponent}, {"target", p}, {"tolerance", exp_tol}, {"passed", exp_ok}};
  bool all = exp_ok;
  if (c.H < 0.5) {
    const double k2 = k2_constant(c.n, c.H);
    const bool ok = std::abs(fit.k2_estimate / k2 - 1.0) <= 0.03;
    all = all && ok;
    res["k2"] = {{"estimate", fit.k2_estimate}, {"target", k2}, {"tolerance", 0.03}, {"passed", ok},
                 {"intercept_estimate", fit.k2_intercept}};
  } else {
    res["k2"] = {{"estimate", fit.k2_estimate}, {"intercept_estimate", fit.k2_intercept}};
  }
  res["passed"] = all;
  rep.results = res;
  t.columns = {"u", "gap"};
  for (std::size_t i = 0; i < fit.u.size(); ++i) t.rows.push_back({fit.u[i], fit.gap[i]});
  rep.table = std::move(t);
  emit_report(rep, parse_format(c.format), c.out);
  return all ? kExitOk : kExitTolerance;
}

int cmd_simulate(const RunConfig& c) {
  const ModelSpec spec = model_from(c, c.rho);
  std::vector<DiscreteSphereMeasure> measures;
  for (const auto& a : c.points) {
    DiscreteSphereMeasure mu;
    mu.add(point_from_angles(a), 1.0);
    measures.push_back(std::move(mu));
  }
  const ReplicateRun run = simulate_replicates(spec, measures, c.replicates, c.seed, c.threads);
  const std::size_t M = measures.size();
  const std::size_t R = c.replicates;

  Table t;
  t.columns = {"replicate"};
  for (std::size_t j = 0; j < M; ++j) t.columns.push_back("X" + std::to_string(j + 1));
  t.columns.push_back("balls");
  for (std::size_t k = 0; k < R; ++k) {
    std::vector<Cell> row = {static_cast<std::int64_t>(k)};
    for (std::size_t j = 0; j < M; ++j) row.emplace_back(static_cast<std::int64_t>(std::llround(run.values[k * M + j])));
    row.emplace_back(static_cast<std::int64_t>(run.balls[k]));
    t.rows.push_back(std::move(row));
  }

  Json summary = Json::array();
  bool all = true;
  for (std::size_t j = 0; j < M; ++j) {
    std::vector<double> x(R);
    for (std::size_t k = 0; k < R; ++k) x[k] = run.values[k * M + j];
    const Moments ex = moments_exact(spec, measures[j]);
    Json s = Json::object();
    s["point"] = c.points[j];
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(R);
    s["exact_mean"] = ex.mean;
    s["exact_variance"] = ex.variance;
    s["exact_skewness"] = 1.0 / std::sqrt(ex.mean);
    s["exact_excess_kurtosis"] = 1.0 / ex.mean;
    s["mean"] = mean;
    if (R >= 100) {
      const MomentStats st = moment_stats(x);
      const double band = 3.0 * st.se_mean;
      const bool ok = std::abs(st.mean - ex.mean) <= band;
      const bool vok = std::abs(st.variance - ex.variance) <= 3.0 * st.se_variance;
      all = all && ok && vok;
      s["mean"] = {{"estimate", st.mean}, {"target", ex.mean}, {"tolerance", band}, {"passed", ok}};
      s["variance"] = {{"estimate", st.variance},
                       {"target", ex.variance},
                       {"tolerance", 3.0 * st.se_variance},
                       {"passed", vok}};
      s["skewness"] = {{"estimate", st.skewness}, {"std_error", st.se_skewness}};
      s["excess_kurtosis"] = {{"estimate", st.excess_kurtosis}, {"std_error", st.se_kurtosis}};
      s["degenerate"] = st.degenerate;
    }
    summary.push_back(std::move(s));
  }
  Report rep = base_report(c, "simulate");
  rep.results["points"] = summary;
  rep.results["rho"] = spec.rho;
  rep.results["normalizer"] = normalizer(spec);
  rep.results["covering_mass"] = covering_mass(spec);
  rep.results["passed"] = all;
  rep.table = std::move(t);
  const Format f = parse_format(c.format);
  emit_report(rep, f, c.out);
  if (f == Format::csv && !c.summary.empty()) {
    Report sum = rep;
    sum.table.reset();
    emit_report(sum, Format::json, c.summary);
  }
  return all ? kExitOk : kExitTolerance;
}

std::vector<DiscreteSphereMeasure> increments(const RunConfig& c) {
  std::vector<DiscreteSphereMeasure> out;
  if (c.points.size() >= 2) {
    const SpherePoint p0 = point_from_angles(c.points[0]);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      out.push_back(DiscreteSphereMeasure::dipole(point_from_angles(c.points[i]), p0));
    }
    return out;
  }
  std::vector<double> a(static_cast<std::size_t>(c.n), 0.0);
  a[0] = c.u;
  out.push_back(DiscreteSphereMeasure::dipole(SpherePoint::north_pole(c.n), point_from_angles(a)));
  return out;
}

Json stat_entry(double estimate, double target, double tol, bool& all) {
  const bool ok = std::abs(estimate - target) <= tol;
  all = all && ok;
  return {{"estimate", estimate}, {"target", target}, {"tolerance", tol}, {"passed", ok}};
}

int cmd_scaling(const RunConfig& c) {
  const std::vector<DiscreteSphereMeasure> measures = increments(c);
  Report rep = base_report(c, "scaling");
  Table t;
  t.columns = {"rho", "measure", "statistic", "estimate", "target", "tolerance", "passed"};
  Table samples;
  samples.columns = {"rho", "replicate"};
  for (std::size_t j = 0; j < measures.size(); ++j) samples.columns.push_back("m" + std::to_string(j + 1));
  Json ladder = Json::array();
  bool all = true;
  std::uint64_t index = 0;
  for (double rho : c.rho_ladder) {
    const ModelSpec spec = model_from(c, rho);
    ScalingOptions opt;
    opt.replicates = c.replicates;
    opt.seed = stream_seed(c.seed, index++);
    opt.threads = c.threads;
    opt.keep_samples = !c.samples.empty();
    const GaussianityReport g = scaling_experiment(spec, measures, opt);
    Json level = Json::object();
    level["rho"] = rho;
    level["normalizer"] = g.normalizer;
    level["mean_balls"] = g.mean_balls;
    level["stream_seed"] = opt.seed;
    Json ms = Json::array();
    for (std::size_t j = 0; j < g.measures.size(); ++j) {
      const MeasureSummary& m = g.measures[j];
      const MomentStats& st = m.stats;
      Json e = Json::object();
      bool ok = true;
      e["mean"] = stat_entry(st.mean, m.exact_mean, c.sigmas * st.se_mean, ok);
      e["variance"] = stat_entry(st.variance, m.exact_variance, c.sigmas * st.se_variance, ok);
      e["limit_variance"] = m.limit_variance;
      if (m.exact_skewness) e["skewness"] = stat_entry(st.skewness, *m.exact_skewness, c.sigmas * st.se_skewness, ok);
      if (m.exact_excess_kurtosis) {
        e["excess_kurtosis"] =
            stat_entry(st.excess_kurtosis, *m.exact_excess_kurtosis, c.sigmas * st.se_kurtosis, ok);
      }
      all = all && ok;
      for (const char* name : {"mean", "variance", "skewness", "excess_kurtosis"}) {
        if (!e.contains(name)) continue;
        const Json& s = e[name];
        t.rows.push_back({rho, static_cast<std::int64_t>(j + 1), std::string(name), s["estimate"].get<double>(),
                          s["target"].get<double>(), s["tolerance"].get<double>(), yes_no(s["passed"].get<bool>())});
      }
      ms.push_back(std::move(e));
    }
    level["measures"] = ms;
    Json cov = Json::array();
    for (Eigen::Index a = 0; a < g.empirical_cov.rows(); ++a) {
      for (Eigen::Index b = a; b < g.empirical_cov.cols(); ++b) {
        cov.push_back({{"i", a + 1}, {"j", b + 1}, {"empirical", g.empirical_cov(a, b)}, {"limit", g.limit_cov(a, b)}});
      }
    }
    level["covariance"] = cov;
    ladder.push_back(std::move(level));
    for (std::size_t k = 0; k < g.samples.size(); ++k) {
      std::vector<Cell> row = {rho, static_cast<std::int64_t>(k)};
      for (double v : g.samples[k]) row.emplace_back(v);
      samples.rows.push_back(std::move(row));
    }
  }
  rep.results["ladder"] = ladder;
  rep.results["passed"] = all;
  rep.table = std::move(t);
  emit_report(rep, parse_format(c.format), c.out);
  emit_samples(c, "scaling-samples", std::move(samples));
  return all ? kExitOk : kExitTolerance;
}

int cmd_lass(const RunConfig& c) {
  const KernelSpec spec(c.n, c.H, c.rel_tol);
  const SpherePoint base = c.basepoint.empty() ? SpherePoint::north_pole(c.n) : point_from_angles(c.basepoint);
  const LassReport lr = lass_experiment(spec, base, TangentMeasure::dipole(c.x), c.eps_grid);
  const bool last_ok = lr.rel_error.back() <= c.tolerance;
  const bool ok = last_ok && lr.error_decreasing;
  Report rep = base_report(c, "lass");
  rep.results["target"] = lr.target;
  rep.results["k2"] = lr.k2;
  rep.results["smallest_eps"] = {{"eps", lr.eps.back()},
                                 {"estimate", lr.ratio.back()},
                                 {"target", lr.target},
                                 {"rel_error", lr.rel_error.back()},
                                 {"tolerance", c.tolerance},
                                 {"passed", last_ok}};
  rep.results["error_decreasing"] = lr.error_decreasing;
  rep.results["passed"] = ok;
  Table t;
  t.columns = {"eps", "ratio", "target", "rel_error", "tolerance"};
  for (std::size_t i = 0; i < lr.eps.size(); ++i) {
    t.rows.push_back({lr.eps[i], lr.ratio[i], lr.target, lr.rel_error[i], c.tolerance});
  }
  rep.table = std::move(t);
  emit_report(rep, parse_format(c.format), c.out);
  return ok ? kExitOk : kExitTolerance;
}

int cmd_gaussian(const RunConfig& c) {
  const std::size_t m = c.points.size();
  Eigen::MatrixXd target;
  Eigen::MatrixXd s;
  Rng rng = make_stream(c.seed, 0);
  Report rep = base_report(c, c.tangent ? "gaussian-tangent" : "gaussian");
  double k2 = 0.0;
  if (c.tangent) {
    if (!(c.H < 0.5)) throw DomainError("the tangent field requires 0 < H < 1/2");
    k2 = k2_constant(c.n, c.H);
    target = tangent_field_covariance(c.points, c.H, k2);
    s = sample_tangent_field(c.points, c.H, k2, c.replicates, rng);
    rep.results["k2"] = k2;
  } else {
    const KernelSpec spec(c.n, c.H, c.rel_tol);
    std::vector<SpherePoint> pts;
    for (const auto& a : c.points) pts.push_back(point_from_angles(a));
    std::optional<SpherePoint> base;
    if (spec.above_critical()) {
      base = c.basepoint.empty() ? SpherePoint::north_pole(c.n) : point_from_angles(c.basepoint);
    }
    target = covariance_matrix(spec, pts, base);
    s = sample_limit_field(spec, pts, base, c.replicates, rng);
  }
  if (c.replicates < 2) throw DomainError("gaussian needs at least 2 replicates");
  const double R = static_cast<double>(c.replicates);
  const Eigen::RowVectorXd mean = s.colwise().mean();
  const Eigen::MatrixXd centered = s.rowwise() - mean;
  const Eigen::MatrixXd emp = centered.transpose() * centered / (R - 1.0);

  Table t;
  t.columns = {"statistic", "i", "j", "estimate", "target", "tolerance", "passed"};
  bool all = true;
  const auto add = [&](const std::string& name, std::size_t i, std::size_t j, double est, double tgt, double tol) {
    const bool ok = std::abs(est - tgt) <= tol;
    all = all && ok;
    t.rows.push_back({name, static_cast<std::int64_t>(i + 1), static_cast<std::int64_t>(j + 1), est, tgt, tol, yes_no(ok)});
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      const double se = std::sqrt((target(a, a) * target(b, b) + target(a, b) * target(a, b)) / (R - 1.0));
      add("covariance", i, j, emp(a, b), target(a, b), c.sigmas * se + 1e-12 * (1.0 + std::abs(target(a, b))));
    }
  }
  Json ratios = Json::array();
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = a + 1;
    const double v = target(a, a) + target(b, b) - 2.0 * target(a, b);
    const double est = emp(a, a) + emp(b, b) - 2.0 * emp(a, b);
    add("increment_variance", i, i + 1, est, v, c.sigmas * v * std::sqrt(2.0 / (R - 1.0)) + 1e-12 * (1.0 + v));
    if (c.tangent) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < c.points[i].size(); ++k) {
        d2 += (c.points[i][k] - c.points[i + 1][k]) * (c.points[i][k] - c.points[i + 1][k]);
      }
      if (d2 > 0.0) ratios.push_back(est / std::pow(std::sqrt(d2), 2.0 * c.H));
    }
  }
  if (c.tangent) {
    rep.results["increment_ratio"] = ratios;
    rep.results["increment_ratio_target"] = 2.0 * k2;
  }
  rep.results["replicates"] = static_cast<std::int64_t>(c.replicates);
  rep.results["passed"] = all;
  rep.table = std::move(t);
  emit_report(rep, parse_format(c.format), c.out);
  if (!c.samples.empty()) {
    Table raw;
    raw.columns = {"replicate"};
    for (std::size_t j = 0; j < m; ++j) raw.columns.push_back("p" + std::to_string(j + 1));
    for (Eigen::Index k = 0; k < s.rows(); ++k) {
      std::vector<Cell> row = {static_cast<std::int64_t>(k)};
      for (Eigen::Index j = 0; j < s.cols(); ++j) row.emplace_back(s(k, j));
      raw.rows.push_back(std::move(row));
    }
    emit_samples(c, "gaussian-samples", std::move(raw));
  }
  return all ? kExitOk : kExitTolerance;
}

int cmd_selftest(const RunConfig& c) {
  const std::vector<int> ids = c.criteria.empty() ? criterion_ids() : c.criteria;
  SelftestOptions opt;
  opt.seed = c.seed;
  opt.threads = c.threads;
  std::vector<CriterionResult> results;
  bool all = true;
  for (int id : ids) {
    results.push_back(run_criterion(id, opt));
    const CriterionResult& r = results.back();
    const bool ok = r.passed && r.within_budget();
    all = all && ok;
    std::fprintf(stderr, "criterion %d %s: %s (%.1f s", r.id, ok ? "PASS" : "FAIL", r.title.c_str(), r.seconds);
    if (r.budget_seconds > 0.0) std::fprintf(stderr, ", budget %.0f s", r.budget_seconds);
    std::fprintf(stderr, ")\n");
  }
  emit_report(selftest_report(results, c.echo(), c.seed), parse_format(c.format), c.out);
  return all ? kExitOk : kExitTolerance;
}

int dispatch(const RunConfig& c) {
  if (c.subcommand == "psi") return cmd_psi(c);
  if (c.subcommand == "kernel") return cmd_kernel(c);
  if (c.subcommand == "simulate") return cmd_simulate(c);
  if (c.subcommand == "scaling") return cmd_scaling(c);
  if (c.subcommand == "lass") return cmd_lass(c);
  if (c.subcommand == "gaussian") return cmd_gaussian(c);
  if (c.subcommand == "selftest") return cmd_selftest(c);
  throw ConfigError("unknown subcommand '" + c.subcommand + "'");
}

}  // namespace

int main(int argc, char** argv) {
  ParseResult parsed;
  try {
    parsed = parse_config(argc, argv);
  } catch (const Error& e) {
    std::cerr << "ballfield: error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (parsed.help) {
    std::cout << parsed.help_text;
    return kExitOk;
  }
  try {
    return dispatch(parsed.config);
  } catch (const DomainError& e) {
    std::cerr << "ballfield: error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "ballfield: error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "ballfield: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}
