#pragma once

// Rotation, angular velocity and angular acceleration of the accelerating
// wave's phase fronts, and probability flux lines traced through the field.
//
// Sign convention: Phi(z) = -(1/l) arctan(q tan(dkz z)) with q = (1+D)/(1-D),
// so a pair with kz1 > kz2 (dkz > 0) and l > 0 turns clockwise (negative
// angle) as z increases.

#include <acwave/constants.hpp>
#include <acwave/errors.hpp>
#include <acwave/specfun.hpp>
#include <acwave/wavefield.hpp>

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace acwave {

struct RotationLaw {
  int ell = 1;
  double D = 0.0;
  double dkz = 1.0;
  double phi0 = 0.0;

  void validate() const {
    if (ell < 1) throw DomainError("RotationLaw: ell must be a positive integer");
    if (!(D >= 0.0 && D < 1.0)) throw DomainError("RotationLaw: D must lie in [0, 1)");
    if (!(dkz != 0.0) || !std::isfinite(dkz)) throw DomainError("RotationLaw: dkz must be finite and nonzero");
    if (!std::isfinite(phi0)) throw DomainError("RotationLaw: phi0 must be finite");
  }

  double q() const { return (1.0 + D) / (1.0 - D); }
  double period() const { return pi / std::abs(dkz); }

  static RotationLaw from_pair(const AccelPair& p) { return {p.ell, p.D, p.dkz(), 0.0}; }
};

// Continuous branch of arctan(q tan theta): theta plus a bounded correction,
// so it crosses the poles of tan without jumps and U(theta + pi) = U(theta) + pi.
inline double unwrapped_arctan_q_tan(double q, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  return theta + std::atan2((q - 1.0) * s * c, c * c + q * s * s);
}

inline double rotation(const RotationLaw& law, double z) {
  law.validate();
  return law.phi0 - unwrapped_arctan_q_tan(law.q(), law.dkz * z) / law.ell;
}

inline double angular_velocity(const RotationLaw& law, double z) {
  law.validate();
  const double D = law.D;
  return -(law.dkz / law.ell) * (1.0 - D * D) / (1.0 + D * D - 2.0 * D * std::cos(2.0 * law.dkz * z));
}

inline double angular_acceleration(const RotationLaw& law, double z) {
  law.validate();
  const double D = law.D;
  const double den = 1.0 + D * D - 2.0 * D * std::cos(2.0 * law.dkz * z);
  return -(law.dkz * law.dkz / law.ell) * 4.0 * D * (D * D - 1.0) * std::sin(2.0 * law.dkz * z) / (den * den);
}

// The law with its z origin moved by theta0/dkz and re-zeroed there:
// Phi(z) = phi0 - (U(dkz z + theta0) - U(theta0)) / l.
inline double rotation_shifted(const RotationLaw& law, double theta0, double z) {
  law.validate();
  const double q = law.q();
  return law.phi0 - (unwrapped_arctan_q_tan(q, law.dkz * z + theta0) - unwrapped_arctan_q_tan(q, theta0)) / law.ell;
}

// Angle of the intensity maxima of the accelerating superposition. The petals
// trail the phase fronts by a quarter beat period, which turns q into 1/q.
inline double petal_rotation(const RotationLaw& law, double z) { return rotation_shifted(law, pi / 2, z); }

struct FluxPoint {
  double z, r, phi;
};

struct Trajectory {
  double r0 = 0.0, phi0 = 0.0;
  std::vector<FluxPoint> samples;
  bool truncated = false;
  std::string reason;
  double chord_length = 0.0;
  double straightness = 0.0;  // max distance of any sample from the end-to-end chord

  double x(std::size_t i) const { return samples[i].r * std::cos(samples[i].phi); }
  double y(std::size_t i) const { return samples[i].r * std::sin(samples[i].phi); }
};

struct FluxControl {
  double z_start = 0.0;
  double z_end = 1.0;
  double step = 0.0;            // 0 selects (beat period)/2000
  double density_floor = 1e-12; // |psi|^2 below this truncates the line

  void validate() const {
    if (!(z_end > z_start)) throw ConfigError("FluxControl: z_end must exceed z_start");
    if (step < 0.0 || !std::isfinite(step)) throw ConfigError("FluxControl: step must be >= 0");
    if (!(density_floor >= 0.0)) throw ConfigError("FluxControl: density_floor must be >= 0");
  }
};

namespace detail {

inline void finish_trajectory(Trajectory& t) {
  const auto& s = t.samples;
  if (s.size() < 2) return;
  auto cart = [&](std::size_t i) -> std::array<double, 3> { return {t.x(i), t.y(i), s[i].z}; };
  const auto a = cart(0), b = cart(s.size() - 1);
  const std::array<double, 3> c{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const double len = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  t.chord_length = len;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const auto p = cart(i);
    const std::array<double, 3> d{p[0] - a[0], p[1] - a[1], p[2] - a[2]};
    const double cx = d[1] * c[2] - d[2] * c[1];
    const double cy = d[2] * c[0] - d[0] * c[2];
    const double cz = d[0] * c[1] - d[1] * c[0];
    worst = std::max(worst, std::sqrt(cx * cx + cy * cy + cz * cz) / len);
  }
  t.straightness = worst;
}

// Fixed-step RK4 on (r, phi). rhs(z, r, phi, dr, dphi) returns false where
// the density is below the floor.
template <class Rhs>
Trajectory integrate_flux(double r0, double phi0, const FluxControl& ctrl, double step, Rhs&& rhs) {
  Trajectory t;
  t.r0 = r0;
  t.phi0 = phi0;
  const auto n = static_cast<std::size_t>(std::ceil((ctrl.z_end - ctrl.z_start) / step));
  const double h = (ctrl.z_end - ctrl.z_start) / static_cast<double>(std::max<std::size_t>(n, 1));
  double r = r0, phi = phi0;
  t.samples.push_back({ctrl.z_start, r, phi});
  for (std::size_t i = 0; i < n; ++i) {
    const double z = ctrl.z_start + h * static_cast<double>(i);
    double k1r, k1p, k2r, k2p, k3r, k3p, k4r, k4p;
    const bool ok = rhs(z, r, phi, k1r, k1p) && rhs(z + h / 2, r + h / 2 * k1r, phi + h / 2 * k1p, k2r, k2p) &&
                    rhs(z + h / 2, r + h / 2 * k2r, phi + h / 2 * k2p, k3r, k3p) &&
                    rhs(z + h, r + h * k3r, phi + h * k3p, k4r, k4p);
    if (!ok) {
      t.truncated = true;
      t.reason = "density below floor near z = " + std::to_string(z);
      break;
    }
    r += h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r);
    phi += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(phi)) {
      t.truncated = true;
      t.reason = "line reached the axis near z = " + std::to_string(z);
      break;
    }
    t.samples.push_back({ctrl.z_start + h * static_cast<double>(i + 1), r, phi});
  }
  finish_trajectory(t);
  return t;
}

}  // namespace detail

// Flux lines of the accelerating superposition: (dr/dz, r dphi/dz) is the
// transverse phase gradient divided by the mean axial wavenumber kbar.
inline std::vector<Trajectory> trace_flux_lines(const AccelPair& p, const std::vector<std::pair<double, double>>& seeds,
                                                FluxControl ctrl) {
  p.validate(false);
  ctrl.validate();
  const double step = ctrl.step > 0.0 ? ctrl.step : (p.dkz() != 0.0 ? pi / std::abs(p.dkz()) / 2000.0
                                                                     : (ctrl.z_end - ctrl.z_start) / 2000.0);
  const double kbar = p.kbar();
  auto rhs = [&](double z, double r, double phi, double& dr, double& dphi) {
    if (!(r > 0.0)) return false;
    const double x1 = p.kr1 * r, x2 = p.kr2 * r;
    const double j1 = specfun::bessel_j(p.ell, x1), j2 = specfun::bessel_j(p.ell, x2);
    const double d1 = p.kr1 * specfun::bessel_j_prime(p.ell, x1), d2 = p.kr2 * specfun::bessel_j_prime(p.ell, x2);
    const double jp = j1 + j2, jm = j1 - j2, djp = d1 + d2, djm = d1 - d2;
    const double beta = p.dkz() * z + p.ell * varphi(p.ell, p.D, phi);
    const double s = std::sin(beta), c = std::cos(beta);
    const double den = jp * jp * c * c + jm * jm * s * s;
    if (den * envelope(p.ell, p.D, phi) < ctrl.density_floor) return false;
    const double dchi_dr = (jp * djm - jm * djp) * s * c / den;
    const double dchi_dphi = jp * jm * p.ell * varphi_prime(p.ell, p.D, phi) / den;
    dr = dchi_dr / kbar;
    dphi = dchi_dphi / (r * r * kbar);
    return true;
  };
  std::vector<Trajectory> out;
  out.reserve(seeds.size());
  for (const auto& [r0, phi0] : seeds) out.push_back(detail::integrate_flux(r0, phi0, ctrl, step, rhs));
  return out;
}

// Flux lines of a single anisotropic Bessel mode: r stays fixed and phi
// advances at l varphi'(phi) / (kz r^2).
inline std::vector<Trajectory> trace_flux_lines(const ModeParams& m, const std::vector<std::pair<double, double>>& seeds,
                                                FluxControl ctrl) {
  m.validate();
  ctrl.validate();
  const double step = ctrl.step > 0.0 ? ctrl.step : (ctrl.z_end - ctrl.z_start) / 2000.0;
  auto rhs = [&](double, double r, double phi, double& dr, double& dphi) {
    if (!(r > 0.0)) return false;
    const double j = specfun::bessel_j(std::abs(m.ell), m.kr * r);
    if (j * j * envelope(m.ell, m.D, phi) < ctrl.density_floor) return false;
    dr = 0.0;
    dphi = m.ell * varphi_prime(m.ell, m.D, phi) / (m.kz * r * r);
    return true;
  };
  std::vector<Trajectory> out;
  out.reserve(seeds.size());
  for (const auto& [r0, phi0] : seeds) out.push_back(detail::integrate_flux(r0, phi0, ctrl, step, rhs));
  return out;
}

}  // namespace acwave
