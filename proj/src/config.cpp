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

#include "ballfield/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "ballfield/kernel.hpp"
#include "ballfield/regime.hpp"

namespace ballfield {
namespace {

// Grids, point lists and other structured values are collected as text and
// converted after parsing so that file values and flags share one syntax.
struct RawOptions {
  std::string u_grid, r_grid, eps_grid, rho_ladder, points, basepoint, x, criteria;
  std::string config;
};

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot read '" + text + "' as a number in " + what);
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError("cannot read '" + text + "' as a finite number in " + what);
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    parts.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
  }
  return parts;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& p : split(text, ',')) out.push_back(parse_number(p, what));
  return out;
}

std::string json_token(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string s;
    const bool nested = !v.empty() && v.front().is_array();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += nested ? ";" : ",";
      s += json_token(v[i], key);
    }
    return s;
  }
  throw ConfigError("config key '" + key + "' has an unsupported value type");
}

// Command line tokens equivalent to the entries of a JSON config file.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
  std::vector<std::string> tokens;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    std::string key = it.key();
    std::replace(key.begin(), key.end(), '_', '-');
    const CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config" || key == "help") {
      throw ConfigError("unknown key '" + it.key() + "' in config file '" + path + "' for subcommand '" +
                        sub.get_name() + "'");
    }
    if (opt->get_type_size() == 0) {
      if (!it.value().is_boolean()) throw ConfigError("config key '" + it.key() + "' must be true or false");
      if (it.value().get<bool>()) tokens.push_back("--" + key);
      continue;
    }
    tokens.push_back("--" + key);
    tokens.push_back(json_token(it.value(), it.key()));
  }
  return tokens;
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
}

void validate(const RunConfig& c) {
  const auto has = [&](const char* k) { return std::find(c.keys.begin(), c.keys.end(), k) != c.keys.end(); };
  if (c.n < 1) throw ConfigError("n must be >= 1");
  if (has("H")) {
    try {
      require_admissible(c.n, c.H);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.tol < 0.0 || !std::isfinite(c.tol)) throw ConfigError("tol must be > 0");
  check_positive(c.rel_tol, "rel-tol");
  check_positive(c.tolerance, "tolerance");
  check_positive(c.sigmas, "sigmas");
  if (has("rho") && !(c.rho >= 1.0)) throw ConfigError("rho must be >= 1");
  if (has("cutoff") && !(c.cutoff > 0.0 && c.cutoff < 1.0)) throw ConfigError("cutoff must lie in (0, 1)");
  if (has("r-min") && !(c.r_min >= 0.0)) throw ConfigError("r-min must be >= 0");
  if (has("theta") && !(c.theta > 2.0 * c.H - c.n)) {
    std::ostringstream msg;
    msg << "theta must exceed 2H - n = " << 2.0 * c.H - c.n;
    throw ConfigError(msg.str());
  }
  for (double r : c.rho_ladder) {
    if (!(r >= 1.0)) throw ConfigError("rho-ladder entries must be >= 1");
  }
  for (double e : c.eps_grid) check_positive(e, "eps-grid entries");
  for (std::size_t i = 1; i < c.eps_grid.size(); ++i) {
    if (!(c.eps_grid[i] < c.eps_grid[i - 1])) throw ConfigError("eps-grid must be strictly decreasing");
  }
  for (double r : c.r_grid) {
    if (!(r >= 0.0)) throw ConfigError("r-grid entries must be >= 0");
  }
  for (double u : c.u_grid) {
    if (!(u >= 0.0 && u <= std::numbers::pi)) throw ConfigError("u-grid entries must lie in [0, pi]");
  }
  for (int id : c.criteria) {
    if (id < 1 || id > 10) throw ConfigError("criteria ids must lie in 1..10");
  }
  if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
}

std::vector<double> padded(std::vector<double> v, std::size_t size, const char* what) {
  if (v.size() > size) throw ConfigError(std::string(what) + " has more coordinates than n");
  v.resize(size, 0.0);
  return v;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text, "grid '" + text + "'");
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("grid '" + text + "' must have the form a:b:k");
  const double a = parse_number(parts[0], "grid '" + text + "'");
  const double b = parse_number(parts[1], "grid '" + text + "'");
  const double k = parse_number(parts[2], "grid '" + text + "'");
  if (!(k >= 1.0) || k != std::floor(k) || k > 1e7) throw ConfigError("grid '" + text + "' needs an integer count k >= 1");
  const auto count = static_cast<std::size_t>(k);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  if (count > 1) out.back() = b;
  return out;
}

std::vector<std::vector<double>> parse_points(const std::string& text) {
  std::vector<std::vector<double>> out;
  if (text.empty()) return out;
  for (const auto& p : split(text, ';')) {
    if (p.empty()) throw ConfigError("empty entry in point list '" + text + "'");
    out.push_back(parse_list(p, "point list '" + text + "'"));
  }
  return out;
}

Json RunConfig::echo() const {
  Json all = Json::object();
  all["n"] = n;
  all["H"] = H;
  all["rho"] = rho;
  all["theta"] = theta;
  all["cutoff"] = cutoff;
  all["r-min"] = r_min;
  all["points"] = points;
  all["basepoint"] = basepoint;
  all["x"] = x;
  all["replicates"] = replicates;
  all["seed"] = seed;
  all["tol"] = tol;
  all["rel-tol"] = rel_tol;
  all["tolerance"] = tolerance;
  all["sigmas"] = sigmas;
  all["mc-samples"] = mc_samples;
  all["u-grid"] = u_grid;
  all["r-grid"] = r_grid;
  all["eps-grid"] = eps_grid;
  all["rho-ladder"] = rho_ladder;
  all["u"] = u;
  all["asymptote"] = asymptote;
  all["tangent"] = tangent;
  all["criteria"] = criteria;
  all["format"] = format;
  Json out = Json::object();
  out["subcommand"] = subcommand;
  for (const auto& k : keys) {
    if (all.contains(k)) out[k] = all[k];
  }
  return out;
}

ParseResult parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_config(args);
}

ParseResult parse_config(const std::vector<std::string>& args) {
  ParseResult result;
  RunConfig& c = result.config;
  RawOptions raw;
  std::string format;

  CLI::App app("Poisson random balls on the n-sphere: overlap areas, limit kernel and scaling experiments",
               "ballfield");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(library_version()));

  std::map<std::string, CLI::App*> subs;
  const auto make = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s->add_option("--config", raw.config, "JSON file of option values; flags override it");
    s->add_option("--seed", c.seed, "master random seed")->capture_default_str();
    s->add_option("--threads", c.threads, "worker threads")->capture_default_str();
    s->add_option("--format", format, "csv or json");
    s->add_option("--out", c.out, "output path, '-' for standard output");
    subs[name] = s;
    return s;
  };
  const auto opt_n = [&](CLI::App* s) { s->add_option("--n", c.n, "sphere dimension")->capture_default_str(); };
  const auto opt_h = [&](CLI::App* s) { s->add_option("--H", c.H, "self-similarity index, 2H != n")->capture_default_str(); };
  const auto opt_model = [&](CLI::App* s) {
    s->add_option("--theta", c.theta, "intensity exponent, lambda(rho) = rho^theta")->capture_default_str();
    s->add_option("--cutoff", c.cutoff, "radius support (0, cutoff * pi)")->capture_default_str();
    s->add_option("--r-min", c.r_min, "lower radius truncation")->capture_default_str();
  };

  CLI::App* psi = make("psi", "cap intersection areas psi_n(u, r)");
  opt_n(psi);
  psi->add_option("--u-grid", raw.u_grid, "center distances: a:b:k or a list");
  psi->add_option("--r-grid", raw.r_grid, "cap radii: a:b:k or a list");
  psi->add_option("--tol", c.tol, "absolute tolerance (0: default for n)");
  psi->add_option("--mc-samples", c.mc_samples, "add a Monte Carlo column with this many samples");

  CLI::App* kernel = make("kernel", "limit covariance kernel K_H(u)");
  opt_n(kernel);
  opt_h(kernel);
  kernel->add_option("--u-grid", raw.u_grid, "distances: a:b:k or a list");
  kernel->add_option("--rel-tol", c.rel_tol, "relative quadrature tolerance")->capture_default_str();
  kernel->add_flag("--asymptote", c.asymptote, "fit K1 - K2 u^p near 0 (JSON report)");

  CLI::App* simulate = make("simulate", "simulate the covering count X(z) at points");
  opt_n(simulate);
  opt_h(simulate);
  simulate->add_option("--rho", c.rho, "scale rho >= 1")->capture_default_str();
  opt_model(simulate);
  simulate->add_option("--points", raw.points, "angles 'a,b;c,d' of the evaluation points");
  simulate->add_option("--replicates", c.replicates, "independent replicates")->capture_default_str();
  simulate->add_option("--summary", c.summary, "path of the JSON summary for CSV output");

  CLI::App* scaling = make("scaling", "normalized increments along a rho ladder");
  opt_n(scaling);
  opt_h(scaling);
  opt_model(scaling);
  scaling->add_option("--rho-ladder", raw.rho_ladder, "scales, comma separated");
  scaling->add_option("--u", c.u, "dipole length when no points are given")->capture_default_str();
  scaling->add_option("--points", raw.points, "angles; increments are delta_p - delta_p0");
  scaling->add_option("--replicates", c.replicates, "replicates per scale")->capture_default_str();
  scaling->add_option("--sigmas", c.sigmas, "acceptance band in standard errors")->capture_default_str();
  scaling->add_option("--samples", c.samples, "CSV path for the raw normalized samples");

  CLI::App* lass = make("lass", "local self-similarity of the limit field");
  opt_n(lass);
  opt_h(lass);
  lass->add_option("--x", raw.x, "tangent atom x of tau = delta_x - delta_0");
  lass->add_option("--eps-grid", raw.eps_grid, "dilations, strictly decreasing");
  lass->add_option("--basepoint", raw.basepoint, "angles of the base point");
  lass->add_option("--rel-tol", c.rel_tol, "relative quadrature tolerance")->capture_default_str();
  lass->add_option("--tolerance", c.tolerance, "relative error bound at the smallest eps")->capture_default_str();

  CLI::App* gaussian = make("gaussian", "exact samples of the limit or tangent Gaussian field");
  opt_n(gaussian);
  opt_h(gaussian);
  gaussian->add_option("--points", raw.points, "angles, or tangent coordinates with --tangent");
  gaussian->add_option("--basepoint", raw.basepoint, "angles of the pinning point (2H > n)");
  gaussian->add_option("--replicates", c.replicates, "samples")->capture_default_str();
  gaussian->add_flag("--tangent", c.tangent, "sample the tangent field on delta_x - delta_0");
  gaussian->add_option("--rel-tol", c.rel_tol, "relative quadrature tolerance")->capture_default_str();
  gaussian->add_option("--sigmas", c.sigmas, "acceptance band in standard errors")->capture_default_str();
  gaussian->add_option("--samples", c.samples, "CSV path for the raw samples");

  CLI::App* selftest = make("selftest", "run the acceptance criteria");
  selftest->add_option("--criteria", raw.criteria, "comma-separated criterion ids (default all)");

  // Locate the subcommand and an optional config file; file values are
  // placed before the user's flags so that the flags win.
  std::vector<std::string> tokens = args;
  std::string sub_name;
  std::size_t sub_pos = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (subs.count(tokens[i])) {
      sub_name = tokens[i];
      sub_pos = i;
      break;
    }
    if (!tokens[i].empty() && tokens[i][0] != '-') break;
  }
  if (!sub_name.empty()) {
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = sub_pos + 1; i < tokens.size(); ++i) {
      if (tokens[i] == "--config") {
        if (i + 1 >= tokens.size()) throw ConfigError("--config needs a file path");
        config_path = tokens[++i];
      } else if (tokens[i].rfind("--config=", 0) == 0) {
        config_path = tokens[i].substr(9);
      } else {
        rest.push_back(tokens[i]);
      }
    }
    std::vector<std::string> merged(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1);
    if (!config_path.empty()) {
      const auto file = config_tokens(config_path, *subs[sub_name]);
      merged.insert(merged.end(), file.begin(), file.end());
    }
    merged.insert(merged.end(), rest.begin(), rest.end());
    tokens = std::move(merged);
  }

  try {
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    result.help = true;
    result.help_text = app.help();
    return result;
  } catch (const CLI::CallForVersion&) {
    result.help = true;
    result.help_text = std::string(library_version()) + "\n";
    return result;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    throw ConfigError(msg);
  }
  for (const auto& [name, s] : subs) {
    if (s->parsed()) {
      c.subcommand = name;
      if (s->get_help_ptr() != nullptr && s->get_help_ptr()->count() > 0) {
        result.help = true;
        result.help_text = s->help();
        return result;
      }
    }
  }
  CLI::App* sub = subs.at(c.subcommand);
  for (const CLI::Option* o : sub->get_options()) {
    const std::string name = o->get_lnames().empty() ? std::string() : o->get_lnames().front();
    if (name.empty() || name == "help" || name == "config" || name == "out" || name == "threads" ||
        name == "summary" || name == "samples") {
      continue;
    }
    c.keys.push_back(name);
  }

  c.u_grid = raw.u_grid.empty() ? std::vector<double>{} : parse_grid(raw.u_grid);
  c.r_grid = raw.r_grid.empty() ? std::vector<double>{} : parse_grid(raw.r_grid);
  c.eps_grid = parse_list(raw.eps_grid, "eps-grid");
  c.rho_ladder = parse_list(raw.rho_ladder, "rho-ladder");
  c.points = parse_points(raw.points);
  c.basepoint = parse_list(raw.basepoint, "basepoint");
  c.x = parse_list(raw.x, "x");
  for (double v : parse_list(raw.criteria, "criteria")) {
    if (v != std::floor(v)) throw ConfigError("criteria ids must be integers");
    c.criteria.push_back(static_cast<int>(v));
  }

  // Subcommand defaults.
  const std::string& s = c.subcommand;
  if (s == "psi") {
    if (c.u_grid.empty()) c.u_grid = parse_grid("0,0.5,1,1.5,2,2.5,3");
    if (c.r_grid.empty()) c.r_grid = parse_grid("0.5,1,1.5,2,2.5,3");
  }
  if (s == "kernel" && c.u_grid.empty()) {
    c.u_grid = c.asymptote ? log_grid(1e-4, 1e-2, 21) : parse_grid("0:3.141592653589793:50");
  }
  if (s == "lass") {
    if (c.eps_grid.empty()) c.eps_grid = {1e-1, 1e-2, 1e-3, 1e-4};
    if (c.x.empty()) c.x = {1.0};
  }
  if (s == "scaling" && c.rho_ladder.empty()) c.rho_ladder = {10.0, 100.0, 1000.0};
  if ((s == "simulate") && c.points.empty()) c.points = {{0.0}};
  if (s == "gaussian" && c.points.empty()) {
    c.points = c.tangent ? parse_points("0.5;1;1.5;2;3") : parse_points("0;0.5;1;2;3");
  }
  if (s == "selftest") {
    std::sort(c.criteria.begin(), c.criteria.end());
    c.criteria.erase(std::unique(c.criteria.begin(), c.criteria.end()), c.criteria.end());
  }
  for (auto& p : c.points) p = padded(std::move(p), static_cast<std::size_t>(c.n), "a point");
  if (!c.basepoint.empty()) c.basepoint = padded(std::move(c.basepoint), static_cast<std::size_t>(c.n), "basepoint");
  if (!c.x.empty()) c.x = padded(std::move(c.x), static_cast<std::size_t>(c.n), "x");

  if (format.empty()) {
    const bool csv = s == "psi" || s == "simulate" || (s == "kernel" && !c.asymptote);
    format = csv ? "csv" : "json";
  }
  c.format = format;
  validate(c);

  const bool out_given = sub->get_option("--out")->count() > 0;
  if (!out_given) {
    if (const char* dir = std::getenv("BALLFIELD_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
      std::string d = dir;
      if (d.back() != '/') d += '/';
      c.out = d + s + "." + c.format;
    }
  }
  return result;
}

}  // namespace ballfield
