#pragma once

// Matter-wave states: isotropic and anisotropic Bessel modes, the angularly
// accelerating two-component superposition, Laguerre-Gauss modes, and the
// densities, currents and phases derived from them.
//
// Radial profiles use J_|l| for either sign of charge, so that a -l component
// is exactly the mirror image of the +l one. Amplitudes are unnormalized
// except for the LG modes.

#include <acwave/constants.hpp>
#include <acwave/errors.hpp>
#include <acwave/field.hpp>
#include <acwave/specfun.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace acwave {

namespace detail {

inline void check_D(double D, const char* who) {
  if (!(D >= 0.0 && D <= 1.0)) throw DomainError(std::string(who) + ": D must lie in [0, 1]");
}

inline void check_k_triplet(double k, double kr, double kz, const char* who) {
  if (!(kr > 0.0) || !std::isfinite(kr)) throw ConfigError(std::string(who) + ": kr must be > 0");
  if (!(kz > 0.0) || !std::isfinite(kz)) throw ConfigError(std::string(who) + ": kz must be > 0");
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError(std::string(who) + ": k must be > 0");
  if (std::abs(kr * kr + kz * kz - k * k) > 1e-12 * k * k)
    throw ConfigError(std::string(who) + ": k^2 != kr^2 + kz^2");
}

}  // namespace detail

// One anisotropic Bessel component.
struct ModeParams {
  int ell = 1;
  double D = 0.0;
  double k = 1.0;
  double kr = 0.8;
  double kz = 0.6;

  static ModeParams from_kz(int ell, double D, double k, double kz) {
    return {ell, D, k, std::sqrt((k - kz) * (k + kz)), kz};
  }
  static ModeParams from_kr(int ell, double D, double k, double kr) {
    return {ell, D, k, kr, std::sqrt((k - kr) * (k + kr))};
  }

  // allow_zero_charge: only the isotropic evaluation accepts l = 0.
  void validate(bool allow_zero_charge = false) const {
    if (ell == 0 && !allow_zero_charge) throw DomainError("ModeParams: ell must be nonzero");
    detail::check_D(D, "ModeParams");
    detail::check_k_triplet(k, kr, kz, "ModeParams");
  }
};

// Two opposite-charge components (+l at kr1/kz1, -l at kr2/kz2) at a common
// total wavenumber k.
struct AccelPair {
  int ell = 1;
  double D = 0.0;
  double k = 1.0;
  double kr1 = 0.8, kr2 = 0.8;
  double kz1 = 0.6, kz2 = 0.6;

  static AccelPair from_kz(int ell, double D, double k, double kz1, double kz2) {
    return {ell, D, k, std::sqrt((k - kz1) * (k + kz1)), std::sqrt((k - kz2) * (k + kz2)), kz1, kz2};
  }
  static AccelPair from_kr(int ell, double D, double k, double kr1, double kr2) {
    return {ell, D, k, kr1, kr2, std::sqrt((k - kr1) * (k + kr1)), std::sqrt((k - kr2) * (k + kr2))};
  }

  double kbar() const { return 0.5 * (kz1 + kz2); }
  double dkz() const { return 0.5 * (kz1 - kz2); }

  ModeParams plus() const { return {ell, D, k, kr1, kz1}; }
  ModeParams minus() const { return {-ell, D, k, kr2, kz2}; }

  // require_distinct: the accelerating superposition proper needs kz1 != kz2;
  // the equal-kz case is still evaluable as a degenerate pair.
  void validate(bool require_distinct = true) const {
    if (ell < 1) throw DomainError("AccelPair: ell must be a positive integer");
    detail::check_D(D, "AccelPair");
    detail::check_k_triplet(k, kr1, kz1, "AccelPair component 1");
    detail::check_k_triplet(k, kr2, kz2, "AccelPair component 2");
    if (require_distinct && kz1 == kz2) throw ConfigError("AccelPair: kz1 must differ from kz2");
  }
};

// Nonlinear azimuthal phase, continuous in phi with varphi(0) = 0. For D < 1
// it advances by exactly 2*pi per turn.
inline double varphi(int ell, double D, double phi) {
  if (ell == 0) throw DomainError("varphi: ell must be nonzero");
  detail::check_D(D, "varphi");
  if (!std::isfinite(phi)) throw DomainError("varphi: phi must be finite");
  const double t = 2.0 * ell * phi;
  return phi - std::atan2(D * std::sin(t), 1.0 + D * std::cos(t)) / ell;
}

// d varphi / d phi.
inline double varphi_prime(int ell, double D, double phi) {
  detail::check_D(D, "varphi_prime");
  const double den = 1.0 + D * D + 2.0 * D * std::cos(2.0 * ell * phi);
  if (den == 0.0) return 0.0;  // D = 1 node; phase is stepwise there
  return (1.0 - D * D) / den;
}

// Intensity envelope 1 + 2D cos(2 l phi)/(1 + D^2), clamped at 0 against roundoff.
inline double envelope(int ell, double D, double phi) {
  detail::check_D(D, "envelope");
  return std::max(0.0, 1.0 + 2.0 * D * std::cos(2.0 * ell * phi) / (1.0 + D * D));
}

inline double radial_profile(int ell, double kr, double r) { return specfun::bessel_j(std::abs(ell), kr * r); }

// Isotropic Bessel mode J_|l|(kr r) e^{i l phi} e^{i kz z}; l = 0 allowed.
inline cplx eval_bessel(const ModeParams& m, double r, double phi, double z) {
  m.validate(true);
  if (!(r >= 0.0)) throw DomainError("eval_bessel: r must be >= 0");
  return radial_profile(m.ell, m.kr, r) * std::polar(1.0, m.ell * phi + m.kz * z);
}

inline cplx eval_aniso(const ModeParams& m, double r, double phi, double z) {
  m.validate();
  if (!(r >= 0.0)) throw DomainError("eval_aniso: r must be >= 0");
  const double amp = radial_profile(m.ell, m.kr, r) * std::sqrt(envelope(m.ell, m.D, phi));
  return amp * std::polar(1.0, m.kz * z + m.ell * varphi(m.ell, m.D, phi));
}

struct ModalWeights {
  double c_plus;
  double c_minus;
};

// eval_aniso(l, D) = c_plus * bessel(+l) + c_minus * bessel(-l).
inline ModalWeights modal_weights(double D) {
  detail::check_D(D, "modal_weights");
  const double s = std::sqrt(1.0 + D * D);
  return {1.0 / s, D / s};
}

// J+ and J- radial combinations of the pair.
inline std::pair<double, double> accel_radial(const AccelPair& p, double r) {
  const double j1 = specfun::bessel_j(p.ell, p.kr1 * r);
  const double j2 = specfun::bessel_j(p.ell, p.kr2 * r);
  return {j1 + j2, j1 - j2};
}

inline cplx eval_accel(const AccelPair& p, double r, double phi, double z) {
  p.validate(false);
  if (!(r >= 0.0)) throw DomainError("eval_accel: r must be >= 0");
  const auto [jp, jm] = accel_radial(p, r);
  const double beta = p.dkz() * z + p.ell * varphi(p.ell, p.D, phi);
  const cplx bracket(jp * std::cos(beta), jm * std::sin(beta));
  return std::sqrt(envelope(p.ell, p.D, phi)) * std::polar(1.0, p.kbar() * z) * bracket;
}

// Transverse phase of the accelerating wave with the kbar*z carrier removed,
// in (-pi, pi]. Branch-tracked through atan2 of the two quadratures.
inline double arg_accel(const AccelPair& p, double r, double phi, double z) {
  p.validate(false);
  const auto [jp, jm] = accel_radial(p, r);
  if (std::abs(jp) < 1e-12) throw SingularRadiusError("arg_accel: J+ vanishes at r = " + std::to_string(r));
  const double beta = p.dkz() * z + p.ell * varphi(p.ell, p.D, phi);
  return std::atan2(jm * std::sin(beta), jp * std::cos(beta));
}

// Probability current in cylindrical components, in units of hbar/m.
struct Current {
  double j_r = 0.0;
  double j_phi = 0.0;
  double j_z = 0.0;
  bool on_node = false;  // |psi|^2 == 0: phase undefined, values are limits
};

inline Current probability_current(const ModeParams& m, double r, double phi, double hbar_over_m = 1.0) {
  m.validate();
  if (!(r >= 0.0)) throw DomainError("probability_current: r must be >= 0");
  const double rho = std::norm(eval_aniso(m, r, phi, 0.0));
  Current c;
  c.on_node = rho == 0.0;
  c.j_z = hbar_over_m * rho * m.kz;
  // |J_l|^2 / r -> 0 on axis for l != 0.
  c.j_phi = r > 0.0 ? hbar_over_m * rho * m.ell * varphi_prime(m.ell, m.D, phi) / r : 0.0;
  return c;
}

// Transverse current Im(psi* grad psi) of a sampled field, from fourth-order
// central differences. Pixels where |psi|^2 falls below floor_rel * max|psi|^2
// (phase undefined), or whose stencil leaves the grid, are flagged invalid.
struct SampledCurrent {
  std::size_t nx = 0, ny = 0;
  double pitch = 0.0;
  std::vector<double> jx, jy;
  std::vector<std::uint8_t> valid;

  std::size_t invalid_count() const {
    std::size_t n = 0;
    for (auto v : valid) n += v ? 0 : 1;
    return n;
  }
};

inline SampledCurrent probability_current(const ComplexField& f, double hbar_over_m = 1.0, double floor_rel = 1e-10) {
  f.validate();
  SampledCurrent out;
  out.nx = f.nx;
  out.ny = f.ny;
  out.pitch = f.pitch;
  out.jx.assign(f.values.size(), 0.0);
  out.jy.assign(f.values.size(), 0.0);
  out.valid.assign(f.values.size(), 0);

  double peak = 0.0;
  for (const auto& v : f.values) peak = std::max(peak, std::norm(v));
  const double floor = floor_rel * peak;

  for (std::size_t iy = 2; iy + 2 < f.ny; ++iy) {
    for (std::size_t ix = 2; ix + 2 < f.nx; ++ix) {
      const cplx c = f.at(ix, iy);
      if (!(std::norm(c) > floor)) continue;
      const cplx dx = (8.0 * (f.at(ix + 1, iy) - f.at(ix - 1, iy)) - (f.at(ix + 2, iy) - f.at(ix - 2, iy))) /
                      (12.0 * f.pitch);
      const cplx dy = (8.0 * (f.at(ix, iy + 1) - f.at(ix, iy - 1)) - (f.at(ix, iy + 2) - f.at(ix, iy - 2))) /
                      (12.0 * f.pitch);
      const std::size_t i = iy * f.nx + ix;
      out.jx[i] = hbar_over_m * (std::conj(c) * dx).imag();
      out.jy[i] = hbar_over_m * (std::conj(c) * dy).imag();
      out.valid[i] = 1;
    }
  }
  return out;
}

// Laguerre-Gauss mode in the paraxial approximation.
struct LGParams {
  int l = 0;
  int p = 0;
  double w0 = 1.0;
  double k = 1.0;

  void validate() const {
    if (p < 0) throw DomainError("LGParams: p must be >= 0");
    if (!(w0 > 0.0) || !std::isfinite(w0)) throw DomainError("LGParams: w0 must be > 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("LGParams: k must be > 0");
  }

  double zR() const { return 0.5 * k * w0 * w0; }
  double w(double z) const { return w0 * std::sqrt(1.0 + std::pow(z / zR(), 2)); }
  // Radius of curvature; infinite at the waist.
  double R(double z) const {
    if (z == 0.0) return std::numeric_limits<double>::infinity();
    return z * (1.0 + std::pow(zR() / z, 2));
  }
  double gouy(double z) const { return (std::abs(l) + 2 * p + 1) * std::atan(z / zR()); }
  // k r^2 / (2 R(z)), written so that it stays finite at z = 0.
  double curvature_phase(double r, double z) const {
    const double zr = zR();
    return k * r * r * z / (2.0 * (z * z + zr * zr));
  }
  double norm_constant() const {
    const int a = std::abs(l);
    return std::sqrt(2.0 * std::tgamma(p + 1.0) / (pi * std::tgamma(p + a + 1.0)));
  }
};

inline cplx eval_lg(const LGParams& g, double r, double phi, double z) {
  g.validate();
  if (!(r >= 0.0)) throw DomainError("eval_lg: r must be >= 0");
  const int a = std::abs(g.l);
  const double w = g.w(z);
  const double s2 = 2.0 * r * r / (w * w);
  const double amp = g.norm_constant() / w * std::pow(std::sqrt(s2), a) * std::exp(-r * r / (w * w)) *
                     std::assoc_laguerre(static_cast<unsigned>(g.p), static_cast<unsigned>(a), s2);
  const double phase = g.curvature_phase(r, z) + g.l * phi + g.k * z - g.gouy(z);
  return amp * std::polar(1.0, phase);
}

enum class Kinematics { nonrelativistic, relativistic };

struct PhysicalBeam {
  double energy_eV = 300e3;
  Kinematics mode = Kinematics::nonrelativistic;

  void validate() const {
    if (!(energy_eV > 0.0) || !std::isfinite(energy_eV)) throw DomainError("PhysicalBeam: energy_eV must be > 0");
  }
};

// Free-electron wavenumber [1/m]. The relativistic branch uses
// p c = sqrt(E (E + 2 m c^2)).
inline double energy_to_k(const PhysicalBeam& b) {
  b.validate();
  using C = PhysConstants;
  const double E = b.energy_eV * C::e;
  if (b.mode == Kinematics::nonrelativistic) return std::sqrt(2.0 * C::m_e * E) / C::hbar;
  return std::sqrt(E * (E + 2.0 * C::m_e * C::c * C::c)) / (C::hbar * C::c);
}

inline double energy_to_wavelength(const PhysicalBeam& b) { return 2.0 * pi / energy_to_k(b); }

// Default sampling: n x n pixels spanning the first `zeros` radial zeros of
// J_|l|(kr r) on each side of the axis.
struct GridSpec {
  std::size_t n = 512;
  double pitch = 0.0;
};

inline GridSpec default_grid(int ell, double kr, std::size_t n = 512, int zeros = 12) {
  if (!(kr > 0.0)) throw ConfigError("default_grid: kr must be > 0");
  if (n < 2) throw ConfigError("default_grid: n must be >= 2");
  const double half = specfun::bessel_j_zero(std::abs(ell), zeros) / kr;
  return {n, 2.0 * half / static_cast<double>(n)};
}

template <class State>
ComplexField sample_state(const State& s, double z, const GridSpec& g);

template <>
inline ComplexField sample_state<ModeParams>(const ModeParams& m, double z, const GridSpec& g) {
  m.validate();
  return sample_polar(g.n, g.pitch, z, [&](double r, double phi) { return eval_aniso(m, r, phi, z); });
}

template <>
inline ComplexField sample_state<AccelPair>(const AccelPair& p, double z, const GridSpec& g) {
  p.validate(false);
  return sample_polar(g.n, g.pitch, z, [&](double r, double phi) { return eval_accel(p, r, phi, z); });
}

template <>
inline ComplexField sample_state<LGParams>(const LGParams& lg, double z, const GridSpec& g) {
  lg.validate();
  return sample_polar(g.n, g.pitch, z, [&](double r, double phi) { return eval_lg(lg, r, phi, z); });
}

}  // namespace acwave
