#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature on finite and
// semi-infinite intervals.

#include <acwave/errors.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace acwave::quad {

struct QuadControl {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

namespace detail {

// Kronrod abscissae (nonnegative half); odd indices are the Gauss points.
inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208707852809, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21(const F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double resk = fc * wgk[10];
  double resg = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = half * xgk[j];
    const double fsum = f(centre - dx) + f(centre + dx);
    resk += wgk[j] * fsum;
    if (j % 2 == 1) resg += wg[j / 2] * fsum;
  }
  const double value = resk * half;
  const double err = std::abs((resk - resg) * half);
  return {a, b, value, err};
}

}  // namespace detail

// Integrates f over [a, b]. Throws QuadratureError if the requested
// tolerance max(abs_tol, rel_tol*|I|) is not met within max_intervals.
template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadControl& ctrl = {}) {
  if (a == b) return {};
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw DomainError("quad::integrate: limits must be finite");
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk21(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  std::size_t n = 1;

  auto tolerance = [&] { return std::max(ctrl.abs_tol, ctrl.rel_tol * std::abs(total)); };

  while (total_err > tolerance()) {
    if (n >= ctrl.max_intervals) {
      throw QuadratureError("quad::integrate: tolerance not reached, achieved error " +
                                std::to_string(total_err),
                            sign * total, total_err);
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("quad::integrate: interval collapsed to machine precision",
                            sign * total, total_err);
    }
    auto left = detail::gk21(f, worst.a, mid);
    auto right = detail::gk21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }

  // Resum to shed the drift accumulated by incremental updates.
  double value = 0.0, err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sign * value, err, n};
}

// Integrates f over [a, inf) through the map t = a + s/(1-s), s in [0,1).
template <class F>
QuadResult integrate_to_infinity(const F& f, double a, const QuadControl& ctrl = {}) {
  auto g = [&](double s) {
    if (s >= 1.0) return 0.0;
    const double oms = 1.0 - s;
    const double v = f(a + s / oms) / (oms * oms);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(g, 0.0, 1.0, ctrl);
}

}  // namespace acwave::quad
