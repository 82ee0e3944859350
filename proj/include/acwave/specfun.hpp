#pragma once

// Special-function kernels for the beam field solutions: integer-order
// Bessel J, incomplete gamma, the regularized 2F3 series behind zeta_l,
// and zeta_l itself.

#include <acwave/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace acwave::specfun {

struct SeriesControl {
  double rel_tol = 1e-12;
  std::size_t max_terms = 10000;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("SeriesControl: rel_tol must be > 0");
    if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
  }
};

namespace detail {

// Ascending power series, summed in extended precision.
inline long double bessel_j_series(int n, long double x) {
  const long double half = x / 2;
  long double term = 1;
  for (int k = 1; k <= n; ++k) term *= half / k;
  long double sum = term;
  const long double q = -half * half;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<long double>(m) * (m + n));
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum) && m > half) break;
  }
  return sum;
}

// Miller's backward recurrence normalised by J0 + 2 sum J_2k = 1.
inline long double bessel_j_miller(int n, long double x) {
  const double scale = std::max<double>(n, static_cast<double>(x));
  int start = static_cast<int>(scale + 30.0 + 2.0 * std::sqrt(scale));
  if (start % 2) ++start;
  long double jp1 = 0, j = 1e-30L, result = 0, norm = 0;
  for (int k = start; k > 0; --k) {
    const long double jm1 = (2.0L * k / x) * j - jp1;
    jp1 = j;
    j = jm1;
    if (std::fabs(j) > 1e300L) {
      j *= 1e-300L;
      jp1 *= 1e-300L;
      result *= 1e-300L;
      norm *= 1e-300L;
    }
    // j now holds J_{k-1}.
    if (k - 1 == n) result = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2 * j;
  }
  norm += j;  // J_0
  return result / norm;
}

}  // namespace detail

// Bessel function of the first kind, integer order. Negative orders use
// J_{-n} = (-1)^n J_n and negative arguments J_n(-x) = (-1)^n J_n(x).
inline double bessel_j(int order, double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_j: argument must be finite");
  double sign = 1.0;
  int n = order;
  if (n < 0) {
    n = -n;
    if (n % 2) sign = -sign;
  }
  if (x < 0) {
    x = -x;
    if (n % 2) sign = -sign;
  }
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const long double v = x < 12.0 ? detail::bessel_j_series(n, x) : detail::bessel_j_miller(n, x);
  return sign * static_cast<double>(v);
}

// Derivative dJ_n/dx = (J_{n-1} - J_{n+1}) / 2.
inline double bessel_j_prime(int order, double x) {
  return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x));
}

// n-th positive zero of J_order (order >= 0), McMahon start + Newton.
inline double bessel_j_zero(int order, int n) {
  if (order < 0 || n < 1) throw DomainError("bessel_j_zero: need order >= 0 and n >= 1");
  const double mu = 4.0 * order * order;
  const double beta = (n + 0.5 * order - 0.25) * M_PI;
  double x = beta - (mu - 1.0) / (8.0 * beta) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * std::pow(8.0 * beta, 3));
  if (n == 1 && order > 0) x = std::max(x, order + 1.8557 * std::cbrt(static_cast<double>(order)));
  for (int it = 0; it < 60; ++it) {
    const double dx = bessel_j(order, x) / bessel_j_prime(order, x);
    x -= dx;
    if (std::abs(dx) < 1e-15 * x) break;
  }
  return x;
}

// Lower incomplete gamma gamma(a, x) by its power series; accurate for x < a + 1.
inline double incomplete_gamma_lower_series(double a, double x) {
  if (x == 0.0) return 0.0;
  long double term = 1.0L / a, sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-19L) break;
  }
  return static_cast<double>(sum * std::exp(static_cast<long double>(-x + a * std::log(x))));
}

// Upper incomplete gamma by modified Lentz continued fraction; x >= a + 1.
inline double incomplete_gamma_upper_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x)) * h;
}

// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt.
inline double incomplete_gamma_upper(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete_gamma_upper: a must be > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete_gamma_upper: x must be >= 0");
  if (std::isinf(x)) return 0.0;
  if (x == 0.0) return std::tgamma(a);
  if (x < a + 1.0) return std::tgamma(a) - incomplete_gamma_lower_series(a, x);
  return incomplete_gamma_upper_cf(a, x);
}

// Lower incomplete gamma gamma(a, x) = Gamma(a) - Gamma(a, x).
inline double incomplete_gamma_lower(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete_gamma_lower: a must be > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete_gamma_lower: x must be >= 0");
  if (std::isinf(x)) return std::tgamma(a);
  if (x < a + 1.0) return incomplete_gamma_lower_series(a, x);
  return std::tgamma(a) - incomplete_gamma_upper_cf(a, x);
}

namespace detail {

// Above this u = (k_r r)^2 the alternating 2F3 series loses too many digits
// even in extended precision; zeta_l switches to the finite Bessel sum.
inline constexpr double kSeriesLimit = 64.0;

// 1/2 [1 - J_0^2 - 2 sum_{k=1}^{n-1} J_k^2 - J_n^2] = int_0^x J_n(t)^2/t dt * n.
inline double zeta_bessel_sum(int n, double x) {
  double s = 1.0 - std::pow(bessel_j(0, x), 2) - std::pow(bessel_j(n, x), 2);
  for (int k = 1; k < n; ++k) s -= 2.0 * std::pow(bessel_j(k, x), 2);
  return 0.5 * s;
}

inline double hyp_series(int l, double u, const SeriesControl& ctrl) {
  // 2F3({l, l+1/2}, {l+1, l+1, 2l+1}; -u) / (Gamma(l+1)^2 Gamma(2l+1)).
  const long double a1 = l, a2 = l + 0.5L, b1 = l + 1, b3 = 2 * l + 1;
  long double term = 1.0L / (std::tgamma(b1) * std::tgamma(b1) * std::tgamma(b3));
  long double sum = term, comp = 0;
  for (std::size_t n = 0; n < ctrl.max_terms; ++n) {
    const long double nn = static_cast<long double>(n);
    term *= -static_cast<long double>(u) * (a1 + nn) * (a2 + nn) /
            ((b1 + nn) * (b1 + nn) * (b3 + nn) * (nn + 1));
    // Neumaier compensated summation.
    const long double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
    if (std::fabs(term) <= ctrl.rel_tol * 1e-3L * std::fabs(sum + comp) && nn + 1 > std::sqrt(u))
      return static_cast<double>(sum + comp);
  }
  throw ConvergenceError("hyp_2f3_reg: series did not converge within " +
                             std::to_string(ctrl.max_terms) + " terms",
                         static_cast<double>(sum + comp), ctrl.max_terms);
}

inline double zeta_prefactor(int l, double u) {
  // 4^{-l} u^l Gamma(2l)
  return std::exp(-l * std::log(4.0) + l * std::log(u) + std::lgamma(2.0 * l));
}

}  // namespace detail

// Regularized 2F3({l, l+1/2}, {l+1, l+1, 2l+1}; -u) for l = |ell| >= 1.
inline double hyp_2f3_reg(int ell_abs, double u, const SeriesControl& ctrl = {}) {
  ctrl.validate();
  if (ell_abs < 1) throw DomainError("hyp_2f3_reg: ell_abs must be >= 1");
  if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("hyp_2f3_reg: u must be finite and >= 0");
  if (u <= detail::kSeriesLimit) return detail::hyp_series(ell_abs, u, ctrl);
  return detail::zeta_bessel_sum(ell_abs, std::sqrt(u)) / (ell_abs * detail::zeta_prefactor(ell_abs, u));
}

// zeta_l(r) = l 4^{-|l|} (k_r r)^{2|l|} Gamma(2|l|) 2F3~(...; -(k_r r)^2),
// equal to l * int_0^{k_r r} J_l(t)^2 / t dt.
inline double zeta_ell(int ell, double kr, double r, const SeriesControl& ctrl = {}) {
  if (ell == 0) throw DomainError("zeta_ell: ell must be nonzero");
  if (!(kr > 0.0)) throw DomainError("zeta_ell: kr must be > 0");
  if (!(r >= 0.0)) throw DomainError("zeta_ell: r must be >= 0");
  const int l = std::abs(ell);
  const double sgn = ell > 0 ? 1.0 : -1.0;
  const double x = kr * r;
  if (x == 0.0) return 0.0;
  const double u = x * x;
  if (u <= detail::kSeriesLimit)
    return sgn * l * detail::zeta_prefactor(l, u) * detail::hyp_series(l, u, ctrl);
  ctrl.validate();
  return sgn * detail::zeta_bessel_sum(l, x);
}

}  // namespace acwave::specfun
