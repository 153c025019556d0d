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

// Globally adaptive 21-point Gauss-Kronrod quadrature.
//
// The rule never evaluates the integrand at interval endpoints, which is what
// the cap-overlap and kernel integrals need: several of them have integrable
// endpoint singularities or clamped inverse-trig arguments at the boundary.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "ballfield/error.hpp"

namespace ballfield::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// Abscissae and weights of the 21-point Kronrod rule and its embedded
// 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;
};

template <class F>
Segment gk21(const F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = 0.0;
  double resk = fc * kWgk[10];
  double resabs = std::abs(resk);
  std::array<double, 10> fv1{};
  std::array<double, 10> fv2{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (std::size_t j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }
  resk *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  resg *= half;

  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  if (!std::isfinite(resk)) {
    std::ostringstream msg;
    msg << "non-finite integrand on [" << a << ", " << b << "]";
    throw QuadratureError(msg.str());
  }
  return {a, b, resk, err, resabs};
}

}  // namespace detail

/// Integrates f over the partition given by `breakpoints` (sorted,
/// at least two entries). Throws QuadratureError when the requested accuracy
/// max(abs_tol, rel_tol*|I|) is not reached within `max_intervals`.
template <class F>
Result integrate(const F& f, std::span<const double> breakpoints, const Options& opt = {}) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (breakpoints.size() < 2) throw DomainError("integrate: need at least two breakpoints");

  std::vector<detail::Segment> segments;
  segments.reserve(64);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b >= a)) throw DomainError("integrate: breakpoints must be nondecreasing");
    if (b > a) segments.push_back(detail::gk21(f, a, b));
  }
  Result out;
  out.evaluations = 21 * segments.size();
  if (segments.empty()) return out;

  auto totals = [&] {
    double v = 0.0, e = 0.0, absv = 0.0;
    for (const auto& s : segments) {
      v += s.value;
      e += s.error;
      absv += s.abs_value;
    }
    return std::array<double, 3>{v, e, absv};
  };

  // Segments narrower than roundoff cannot be split any further.
  auto splittable = [](const detail::Segment& s) {
    const double mid = 0.5 * (s.a + s.b);
    return mid > s.a && mid < s.b && (s.b - s.a) > 8.0 * eps * std::max(std::abs(s.a), std::abs(s.b));
  };

  while (true) {
    const auto [value, error, abs_value] = totals();
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
    if (error <= target) {
      out.value = value;
      out.error = error;
      return out;
    }
    auto worst = segments.end();
    for (auto it = segments.begin(); it != segments.end(); ++it) {
      if (!splittable(*it)) continue;
      if (worst == segments.end() || it->error > worst->error) worst = it;
    }
    const bool exhausted = segments.size() >= opt.max_intervals || worst == segments.end();
    if (exhausted) {
      // Accept results limited only by floating-point resolution.
      if (error <= 1e3 * eps * abs_value) {
        out.value = value;
        out.error = error;
        return out;
      }
      std::ostringstream msg;
      msg.precision(6);
      msg << "quadrature did not converge: estimate " << value << ", error " << error
          << " > tolerance " << target << " after " << segments.size() << " intervals";
      throw QuadratureError(msg.str());
    }
    const detail::Segment s = *worst;
    const double mid = 0.5 * (s.a + s.b);
    *worst = detail::gk21(f, s.a, mid);
    segments.push_back(detail::gk21(f, mid, s.b));
    out.evaluations += 42;
  }
}

template <class F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate(f, std::span<const double>(pts), opt);
}

}  // namespace ballfield::quad
