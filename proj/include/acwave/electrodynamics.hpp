#pragma once

// Classical electrostatic and magnetostatic fields sourced by the charge and
// probability-current densities of a beam component, with the Poynting
// diagnostics used to show that the beam does not radiate.
//
// The beam density is the probability density scaled by lambda = eta * e,
// with eta the number of electrons per unit length. SI units throughout.

#include <acwave/constants.hpp>
#include <acwave/errors.hpp>
#include <acwave/quadrature.hpp>
#include <acwave/specfun.hpp>
#include <acwave/wavefield.hpp>

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace acwave {

struct LineDensity {
  double eta = 1.0;  // electrons per metre

  void validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("LineDensity: eta must be > 0");
  }
  double lambda() const { return eta * PhysConstants::e; }

  // eta = I / (e v) for a beam current I at kinetic energy E (relativistic v).
  static LineDensity from_current(double current_A, double energy_eV) {
    using C = PhysConstants;
    const double gamma = 1.0 + energy_eV * C::e / (C::m_e * C::c * C::c);
    const double v = C::c * std::sqrt(1.0 - 1.0 / (gamma * gamma));
    LineDensity d{current_A / (C::e * v)};
    d.validate();
    return d;
  }
  // 1 nA at 300 keV.
  static LineDensity demo() { return from_current(1e-9, 300e3); }
};

struct EMSample {
  double r = 0.0;
  double E_r = 0.0;
  double B_phi = 0.0;
  double B_z = 0.0;
  double S_r = 0.0;
  double S_phi = 0.0;
  double S_z = 0.0;
};

struct PoyntingVector {
  double S_r, S_phi, S_z;
};

// S = E x B / mu0 for E = E_r r^ and B = B_phi phi^ + B_z z^. r^ x phi^ = z^
// and r^ x z^ = -phi^, so no radial term can arise.
inline PoyntingVector poynting(double E_r, double B_phi, double B_z) {
  if (!std::isfinite(E_r) || !std::isfinite(B_phi) || !std::isfinite(B_z))
    throw DomainError("poynting: inputs must be finite");
  const double mu0 = PhysConstants::mu0;
  return {0.0, -E_r * B_z / mu0, E_r * B_phi / mu0};
}

namespace detail {

// x (J_l^2 - J_{l-1} J_{l+1}) with signed orders. Algebraically equal to the
// bracket x J_l^2 - 2 l J_l J_{l-1} + x J_{l-1}^2 but free of the small-x
// cancellation in that form.
inline double bessel_field_bracket(int ell, double x) {
  const double j = specfun::bessel_j(ell, x);
  return x * (j * j - specfun::bessel_j(ell - 1, x) * specfun::bessel_j(ell + 1, x));
}

// Direct three-term form of the same bracket.
inline double bessel_field_bracket_direct(int ell, double x) {
  const double j = specfun::bessel_j(ell, x), jm = specfun::bessel_j(ell - 1, x);
  return x * j * j - 2.0 * ell * j * jm + x * jm * jm;
}

}  // namespace detail

// Radial E field of an isotropic Bessel component.
inline double bessel_E_r(const ModeParams& m, const LineDensity& n, double r) {
  return n.lambda() / (2.0 * PhysConstants::eps0 * m.kr) * detail::bessel_field_bracket(m.ell, m.kr * r);
}

// The same field written as lambda r / (2 eps0) [(J_l + J_{l-1})^2 - 2 (1 + l/(kr r)) J_l J_{l-1}].
inline double bessel_E_r_expanded(const ModeParams& m, const LineDensity& n, double r) {
  if (r == 0.0) return 0.0;
  const double x = m.kr * r;
  const double j = specfun::bessel_j(m.ell, x), jm = specfun::bessel_j(m.ell - 1, x);
  return n.lambda() * r / (2.0 * PhysConstants::eps0) * ((j + jm) * (j + jm) - 2.0 * (1.0 + m.ell / x) * j * jm);
}

inline EMSample bessel_em(const ModeParams& m, const LineDensity& n, double r,
                          const specfun::SeriesControl& ctrl = {}) {
  m.validate(true);
  n.validate();
  if (m.D != 0.0) throw DomainError("bessel_em: the field solution applies to isotropic modes (D = 0)");
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("bessel_em: r must be finite and >= 0");
  using C = PhysConstants;
  EMSample s;
  s.r = r;
  const double bracket = detail::bessel_field_bracket(m.ell, m.kr * r);
  s.E_r = n.lambda() / (2.0 * C::eps0 * m.kr) * bracket;
  s.B_phi = n.eta * C::mu0 * C::mu_B * (m.kz / m.kr) * bracket;
  if (m.ell != 0) {
    const double sgn = m.ell > 0 ? 1.0 : -1.0;
    s.B_z = n.eta * C::mu0 * C::mu_B * (sgn - 2.0 * specfun::zeta_ell(m.ell, m.kr, r, ctrl));
  }
  const auto S = poynting(s.E_r, s.B_phi, s.B_z);
  s.S_r = S.S_r;
  s.S_phi = S.S_phi;
  s.S_z = S.S_z;
  return s;
}

// ---------------------------------------------------------------------------
// Laguerre-Gauss component.

// Normalized probability density |psi_LG|^2 (integrates to 1 over the plane).
inline double lg_probability(const LGParams& g, double r, double z) {
  g.validate();
  const double w = g.w(z);
  const double u = 2.0 * r * r / (w * w);
  const int a = std::abs(g.l);
  const double c2 = g.norm_constant() * g.norm_constant();
  const double L = std::assoc_laguerre(static_cast<unsigned>(g.p), static_cast<unsigned>(a), u);
  return c2 / (w * w) * std::pow(u, a) * std::exp(-u) * L * L;
}

inline double lg_density(const LGParams& g, const LineDensity& n, double r, double z) {
  n.validate();
  if (!(r >= 0.0)) throw DomainError("lg_density: r must be >= 0");
  return n.lambda() * lg_probability(g, r, z);
}

namespace detail {

// Dimensionless profile f(s) = w^2 |psi|^2 at s = r/w.
inline double lg_profile(const LGParams& g, double s) {
  const double u = 2.0 * s * s;
  const int a = std::abs(g.l);
  const double c2 = g.norm_constant() * g.norm_constant();
  const double L = std::assoc_laguerre(static_cast<unsigned>(g.p), static_cast<unsigned>(a), u);
  return c2 * std::pow(u, a) * std::exp(-u) * L * L;
}

// Beyond this s the Gaussian factor is below 1e-120 for any practical l, p.
inline double lg_s_cutoff(const LGParams& g) { return 12.0 + std::sqrt(std::abs(g.l) + 2.0 * g.p + 1.0); }

template <class F>
double lg_integrate(const F& f, double a, double b, const quad::QuadControl& ctrl) {
  if (b <= a) return 0.0;
  return quad::integrate(f, a, b, ctrl).value;
}

}  // namespace detail

// int_0^r t^k |psi|^2 dt for k = 1 or 3 (per unit of lambda).
inline double lg_moment(const LGParams& g, int power, double r, double z, const quad::QuadControl& ctrl = {}) {
  g.validate();
  const double w = g.w(z);
  const double smax = std::min(r / w, detail::lg_s_cutoff(g));
  auto f = [&](double s) { return detail::lg_profile(g, s) * std::pow(s, power); };
  return std::pow(w, power - 1) * detail::lg_integrate(f, 0.0, smax, ctrl);
}

// E_r from the enclosed-charge integral.
inline double lg_E_r_quadrature(const LGParams& g, const LineDensity& n, double r, double z,
                                const quad::QuadControl& ctrl = {}) {
  n.validate();
  if (!(r >= 0.0)) throw DomainError("lg_E_r: r must be >= 0");
  if (r == 0.0) return 0.0;
  return n.lambda() * lg_moment(g, 1, r, z, ctrl) / (PhysConstants::eps0 * r);
}

// p = 0 closed form, lambda gamma(|l|+1, 2r^2/w^2) / (2 pi eps0 r |l|!); the
// lower incomplete gamma avoids the |l|! - Gamma(|l|+1, .) cancellation.
inline double lg_E_r_closed_p0(const LGParams& g, const LineDensity& n, double r, double z) {
  g.validate();
  n.validate();
  if (g.p != 0) throw DomainError("lg_E_r_closed_p0: requires p = 0");
  if (!(r >= 0.0)) throw DomainError("lg_E_r_closed_p0: r must be >= 0");
  if (r == 0.0) return 0.0;
  const int a = std::abs(g.l);
  const double w = g.w(z);
  const double u = 2.0 * r * r / (w * w);
  return n.lambda() * specfun::incomplete_gamma_lower(a + 1.0, u) / (2.0 * pi * PhysConstants::eps0 * r * std::tgamma(a + 1.0));
}

// Axial effective wavenumber; the curvature term is written as
// k r^2 (z^2 - zR^2) / (2 (z^2 + zR^2)^2) so it is finite at the waist.
inline double lg_effective_k(const LGParams& g, double r, double z) {
  const double zr = g.zR();
  const double s = z * z + zr * zr;
  return g.k - g.k * r * r * (z * z - zr * zr) / (2.0 * s * s) - (std::abs(g.l) + 2 * g.p + 1) * zr / s;
}

// Radial probability-current factor k r / R(z); zero at the waist.
inline double lg_radial_current_factor(const LGParams& g, double r, double z) {
  const double zr = g.zR();
  return g.k * r * z / (z * z + zr * zr);
}

inline EMSample lg_em(const LGParams& g, const LineDensity& n, double r, double z, const quad::QuadControl& ctrl = {}) {
  g.validate();
  n.validate();
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("lg_em: r must be finite and >= 0");
  using C = PhysConstants;
  const double pref = C::mu0 * n.lambda() * C::hbar / C::m_e;
  EMSample s;
  s.r = r;
  if (r > 0.0) {
    const double m1 = lg_moment(g, 1, r, z, ctrl);
    const double m3 = lg_moment(g, 3, r, z, ctrl);
    const double zr = g.zR();
    const double q = z * z + zr * zr;
    const double curv = g.k * (z * z - zr * zr) / (2.0 * q * q);
    s.E_r = n.lambda() * m1 / (C::eps0 * r);
    s.B_phi = pref / r * (-curv * m3 + (g.k - (std::abs(g.l) + 2 * g.p + 1) * zr / q) * m1);
  }
  if (g.l != 0) {
    // B_z(r) = mu0 l (lambda hbar / m) int_r^inf |psi|^2 / t dt, which vanishes at infinity.
    const double w = g.w(z);
    const double s0 = r / w, s1 = detail::lg_s_cutoff(g);
    auto f = [&](double sv) { return sv > 0.0 ? detail::lg_profile(g, sv) / sv : 0.0; };
    const double tail = s0 < s1 ? detail::lg_integrate(f, s0, s1, ctrl) / (w * w) : 0.0;
    s.B_z = pref * g.l * tail;
  }
  const auto S = poynting(s.E_r, s.B_phi, s.B_z);
  s.S_r = S.S_r;
  s.S_phi = S.S_phi;
  s.S_z = S.S_z;
  return s;
}

// ---------------------------------------------------------------------------
// Radiation diagnostic on a cylinder of radius r_far.

struct RadiationReport {
  double r_far = 0.0;
  std::size_t samples = 0;
  double max_abs_S_r = 0.0;
  double radial_flux = 0.0;  // per unit length, W/m
  double axial_scale = 0.0;  // 2 pi r_far max|S|, the flux a fully radial S would carry
  double relative_flux() const { return axial_scale > 0.0 ? radial_flux / axial_scale : radial_flux; }
};

using CartesianPoynting = std::array<double, 3>;

// Integrates S . r^ around the circle from a Cartesian Poynting sampler
// (trapezoid rule, exact for trigonometric polynomials below the sample count).
inline RadiationReport radiated_flux(const std::function<CartesianPoynting(double r, double phi)>& S, double r_far,
                                     std::size_t samples) {
  if (!(r_far > 0.0)) throw ConfigError("radiated_flux: r_far must be > 0");
  if (samples < 8) throw ConfigError("radiated_flux: need at least 8 samples");
  RadiationReport rep;
  rep.r_far = r_far;
  rep.samples = samples;
  double smax = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double phi = 2.0 * pi * static_cast<double>(i) / static_cast<double>(samples);
    const auto s = S(r_far, phi);
    const double sr = s[0] * std::cos(phi) + s[1] * std::sin(phi);
    rep.max_abs_S_r = std::max(rep.max_abs_S_r, std::abs(sr));
    rep.radial_flux += sr * r_far * 2.0 * pi / static_cast<double>(samples);
    smax = std::max(smax, std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]));
  }
  rep.axial_scale = 2.0 * pi * r_far * smax;
  return rep;
}

// Builds Cartesian E and B from a cylindrical field sample and returns E x B / mu0.
inline CartesianPoynting cartesian_poynting(const EMSample& f, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  const std::array<double, 3> E{f.E_r * c, f.E_r * s, 0.0};
  const std::array<double, 3> B{-f.B_phi * s, f.B_phi * c, f.B_z};
  const double mu0 = PhysConstants::mu0;
  return {(E[1] * B[2] - E[2] * B[1]) / mu0, (E[2] * B[0] - E[0] * B[2]) / mu0, (E[0] * B[1] - E[1] * B[0]) / mu0};
}

inline RadiationReport radiated_power_check(const ModeParams& m, const LineDensity& n, double r_far,
                                            std::size_t samples = 360) {
  const EMSample f = bessel_em(m, n, r_far);
  return radiated_flux([&](double, double phi) { return cartesian_poynting(f, phi); }, r_far, samples);
}

inline RadiationReport radiated_power_check(const LGParams& g, const LineDensity& n, double z, double r_far,
                                            std::size_t samples = 360) {
  const EMSample f = lg_em(g, n, r_far, z);
  return radiated_flux([&](double, double phi) { return cartesian_poynting(f, phi); }, r_far, samples);
}

}  // namespace acwave
