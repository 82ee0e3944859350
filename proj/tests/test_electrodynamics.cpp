#include <acwave/electrodynamics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace acwave;
using C = PhysConstants;

namespace {

const LineDensity kEta{1e7};

double jref(int n, double x) {
  const double v = std::cyl_bessel_j(static_cast<double>(std::abs(n)), x);
  return (n < 0 && (-n) % 2) ? -v : v;
}

// Gauss's law by quadrature: E_r = (1/(eps0 r)) int_0^r lambda J_l(kr t)^2 t dt.
double gauss_oracle(const ModeParams& m, double r) {
  auto f = [&](double t) { return std::pow(jref(m.ell, m.kr * t), 2) * t; };
  const double q = quad::integrate(f, 0.0, r, {1e-15, 1e-13, 20000}).value;
  return kEta.lambda() * q / (C::eps0 * r);
}

}  // namespace

TEST(Constants, BohrMagneton) {
  EXPECT_NEAR(C::mu_B, C::e * C::hbar / (2 * C::m_e), 1e-6 * C::mu_B);
  EXPECT_NEAR(C::mu_B, 9.274e-24, 5e-4 * 9.274e-24);
  EXPECT_NEAR(C::mu_B, 9.2740100783e-24, 1e-9 * C::mu_B);
}

TEST(BesselEM, AxisValues) {
  const auto m = ModeParams::from_kz(1, 0.0, 1e10, 0.6e10);
  const auto s = bessel_em(m, kEta, 0.0);
  EXPECT_EQ(s.E_r, 0.0);
  EXPECT_EQ(s.B_phi, 0.0);
  EXPECT_NEAR(s.B_z, kEta.eta * C::mu0 * C::mu_B, 1e-15 * std::abs(s.B_z));
  const auto neg = bessel_em(ModeParams::from_kz(-1, 0.0, 1e10, 0.6e10), kEta, 0.0);
  EXPECT_EQ(neg.B_z, -s.B_z);
}

TEST(BesselEM, SolenoidalFieldIndependentOfCharge) {
  const double ref = bessel_em(ModeParams::from_kz(1, 0.0, 1.0, 0.6), kEta, 0.0).B_z;
  for (int ell : {2, 3, 7}) {
    const double b = bessel_em(ModeParams::from_kz(ell, 0.0, 1.0, 0.6), kEta, 0.0).B_z;
    EXPECT_NEAR(b, ref, 1e-10 * std::abs(ref));
  }
}

TEST(BesselEM, GaussLawOracle) {
  for (int ell : {-2, -1, 0, 1, 2, 3}) {
    const auto m = ModeParams::from_kz(ell, 0.0, 1.0, 0.6);
    for (double r : {0.05, 0.7, 2.3, 6.1, 13.7, 40.0}) {
      const double got = bessel_em(m, kEta, r).E_r;
      const double ref = gauss_oracle(m, r);
      EXPECT_NEAR(got, ref, 1e-8 * std::abs(ref)) << "ell=" << ell << " r=" << r;
    }
  }
}

TEST(BesselEM, PrintedFormsAgree) {
  for (int ell : {-3, -1, 1, 2, 3}) {
    const auto m = ModeParams::from_kz(ell, 0.0, 1.0, 0.6);
    for (double r = 0.2; r < 60; r *= 1.37) {
      const double a = bessel_E_r(m, kEta, r);
      const double b = bessel_E_r_expanded(m, kEta, r);
      const double direct = kEta.lambda() / (2 * C::eps0 * m.kr) * detail::bessel_field_bracket_direct(ell, m.kr * r);
      EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
      EXPECT_NEAR(a, direct, 1e-12 * std::abs(a));
    }
  }
}

TEST(BesselEM, MagneticToElectricRatioIsAxialVelocity) {
  const auto m = ModeParams::from_kz(2, 0.0, 2.7e11, 2.5e11);
  const double vz_over_c2 = C::eps0 * C::mu0 * C::hbar * m.kz / C::m_e;
  for (double r = 1e-12; r < 1e-9; r *= 1.9) {
    const auto s = bessel_em(m, kEta, r);
    if (s.E_r == 0.0) continue;
    EXPECT_NEAR(s.B_phi / s.E_r, vz_over_c2, 1e-12 * vz_over_c2);
  }
}

TEST(BesselEM, GaussDifferentialCheck) {
  const auto m = ModeParams::from_kz(1, 0.0, 1.0, 0.6);
  double peak = 0.0;
  for (double r = 0.01; r < 30; r += 0.01) peak = std::max(peak, std::pow(jref(1, m.kr * r), 2));
  for (double r = 0.05; r < 30; r *= 1.15) {
    const double h = 1e-3 * r;
    auto rE = [&](double x) { return x * bessel_E_r(m, kEta, x); };
    const double div = (-rE(r + 2 * h) + 8 * rE(r + h) - 8 * rE(r - h) + rE(r - 2 * h)) / (12 * h) / r;
    const double rho = kEta.lambda() * std::pow(jref(1, m.kr * r), 2) / C::eps0;
    const double scale = std::max(rho, 1e-3 * kEta.lambda() * peak / C::eps0);
    EXPECT_NEAR(div, rho, 1e-6 * scale) << r;
  }
}

TEST(BesselEM, AmpereOracleForSolenoidalField) {
  for (int ell : {1, -2, 3}) {
    const auto m = ModeParams::from_kz(ell, 0.0, 1.0, 0.6);
    for (double r : {0.3, 1.7, 5.0, 12.0}) {
      // B_z(r) = mu0 (lambda hbar/m) int_r^inf j_phi dr' with j_phi = l J^2 / r'.
      auto f = [&](double t) { return ell * std::pow(jref(ell, m.kr * t), 2) / t; };
      quad::QuadControl ctrl{1e-14, 1e-12, 200000};
      // Quadrature out to R, then the asymptotic tail of J_n(x)^2/x beyond X = kr R,
      // (1 + (-1)^n sin 2x)/(pi x^2), whose neglected terms are O(X^-3).
      const double R = 4000.0;
      double body = 0.0;
      for (double a = r; a < R; a += 50.0) body += quad::integrate(f, a, std::min(a + 50.0, R), ctrl).value;
      const double X = m.kr * R;
      const double parity = (std::abs(ell) % 2) ? -1.0 : 1.0;
      const double tail = ell * (1.0 / (pi * X) + parity * std::cos(2 * X) / (2 * pi * X * X));
      const double oracle = C::mu0 * kEta.lambda() * C::hbar / C::m_e * (body + tail);
      const double got = bessel_em(m, kEta, r).B_z;
      EXPECT_NEAR(got, oracle, 1e-8 * std::abs(got) + 1e-9 * kEta.eta * C::mu0 * C::mu_B) << ell << " " << r;
    }
  }
}

TEST(BesselEM, SolenoidalFieldTail) {
  const auto m = ModeParams::from_kz(1, 0.0, 1.0, 0.6);
  const double b0 = bessel_em(m, kEta, 0.0).B_z;
  for (double x = 100; x < 2000; x *= 1.3) {
    const double b = bessel_em(m, kEta, x / m.kr).B_z;
    // B_z / B_z(0) = J_0^2 + J_1^2 ~ 2 / (pi x).
    EXPECT_NEAR(b / b0, 2 / (pi * x), 0.5 / (x * x)) << x;
    if (x >= 640) {
      EXPECT_LT(std::abs(b), 1e-3 * std::abs(b0));
    }
  }
}

TEST(BesselEM, RadialFieldNonnegative) {
  for (int ell : {-3, -1, 0, 1, 2, 3}) {
    const auto m = ModeParams::from_kz(ell, 0.0, 1.0, 0.6);
    for (double r = 0.0; r < 80; r += 0.173) EXPECT_GE(bessel_em(m, kEta, r).E_r, 0.0);
  }
}

TEST(BesselEM, RejectsAnisotropicMode) {
  EXPECT_THROW(bessel_em(ModeParams::from_kz(1, 0.3, 1.0, 0.6), kEta, 1.0), DomainError);
  EXPECT_THROW(bessel_em(ModeParams::from_kz(1, 0.0, 1.0, 0.6), LineDensity{0.0}, 1.0), DomainError);
}

TEST(Poynting, NoRadialComponentAndCrossProductOracle) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double Er = u(rng), Bp = u(rng), Bz = u(rng);
    const auto S = poynting(Er, Bp, Bz);
    // Direct cross product in the (r^, phi^, z^) frame.
    const double E[3] = {Er, 0, 0}, B[3] = {0, Bp, Bz};
    const double X[3] = {E[1] * B[2] - E[2] * B[1], E[2] * B[0] - E[0] * B[2], E[0] * B[1] - E[1] * B[0]};
    EXPECT_EQ(S.S_r, X[0] / C::mu0);
    EXPECT_EQ(S.S_phi, X[1] / C::mu0);
    EXPECT_EQ(S.S_z, X[2] / C::mu0);
  }
  const auto zero = poynting(0.0, 3.0, -2.0);
  EXPECT_EQ(zero.S_r, 0.0);
  EXPECT_EQ(zero.S_z, 0.0);
  EXPECT_EQ(std::abs(zero.S_phi), 0.0);
  for (double r = 0; r < 20; r += 0.37) EXPECT_EQ(bessel_em(ModeParams::from_kz(2, 0.0, 1.0, 0.6), kEta, r).S_r, 0.0);
}

TEST(Radiation, BesselComponentsDoNotRadiate) {
  for (int ell : {1, 2, 3}) {
    const auto m = ModeParams::from_kz(ell, 0.0, 1.0, 0.6);
    const auto rep = radiated_power_check(m, kEta, 500.0, 720);
    EXPECT_LE(std::abs(rep.relative_flux()), 1e-12);
    EXPECT_GT(rep.axial_scale, 0.0);
  }
}

TEST(Radiation, DetectorSeesInjectedOutwardFlux) {
  const double s0 = 2.5;
  auto S = [&](double, double phi) { return CartesianPoynting{s0 * std::cos(phi), s0 * std::sin(phi), 0.0}; };
  const auto rep = radiated_flux(S, 3.0, 64);
  EXPECT_NEAR(rep.radial_flux, 2 * pi * 3.0 * s0, 1e-12);
  EXPECT_NEAR(rep.max_abs_S_r, s0, 1e-14);
}

TEST(LGDensity, ValuesAndNormalization) {
  LGParams g{0, 0, 2e-9, 2.7e11};
  EXPECT_NEAR(lg_density(g, kEta, 0.0, 0.0), 2 * kEta.lambda() / (pi * 4e-18), 1e-14 * kEta.lambda() / 4e-18);
  EXPECT_EQ(lg_density(LGParams{1, 0, 2e-9, 2.7e11}, kEta, 0.0, 0.0), 0.0);
  for (auto p : {LGParams{0, 0, 1.0, 30.0}, LGParams{2, 1, 1.0, 30.0}, LGParams{-1, 3, 0.5, 30.0}}) {
    for (double z : {-10.0, 0.0, 4.0}) {
      auto f = [&](double r) { return 2 * pi * r * lg_density(p, kEta, r, z); };
      const double tot = quad::integrate(f, 0.0, 15 * p.w(z), {1e-30, 1e-13, 20000}).value;
      EXPECT_NEAR(tot, kEta.lambda(), 1e-8 * kEta.lambda());
    }
  }
}

TEST(LGEM, ClosedFormMatchesQuadrature) {
  for (int l : {0, 1, 2, 3, -2}) {
    LGParams g{l, 0, 1.0, 40.0};
    for (double z : {0.0, g.zR()}) {
      const double w = g.w(z);
      for (double r = 0.1 * w; r <= 5 * w; r += 0.07 * w) {
        const double a = lg_E_r_closed_p0(g, kEta, r, z);
        const double b = lg_E_r_quadrature(g, kEta, r, z);
        EXPECT_NEAR(a, b, 1e-8 * std::abs(a)) << "l=" << l << " r=" << r;
      }
    }
  }
}

TEST(LGEM, CoulombTail) {
  LGParams g{2, 1, 1.0, 40.0};
  const double r = 12.0;
  const double coulomb = kEta.lambda() / (2 * pi * C::eps0 * r);
  EXPECT_NEAR(lg_em(g, kEta, r, 0.5).E_r, coulomb, 1e-10 * coulomb);
  EXPECT_NEAR(lg_E_r_closed_p0(LGParams{1, 0, 1.0, 40.0}, kEta, r, 0.0), coulomb, 1e-12 * coulomb);
}

TEST(LGEM, NoSolenoidalFieldWithoutCharge) {
  LGParams g{0, 2, 1.0, 40.0};
  for (double z : {-3.0, 0.0, 20.0})
    for (double r = 0; r < 5; r += 0.3) EXPECT_EQ(lg_em(g, kEta, r, z).B_z, 0.0);
}

TEST(LGEM, SolenoidalFieldClosedFormAtP0) {
  for (int l : {1, 2, -3}) {
    LGParams g{l, 0, 1.0, 40.0};
    for (double z : {0.0, 7.0}) {
      const double w = g.w(z);
      for (double r : {0.0, 0.3, 1.0, 2.5}) {
        const int a = std::abs(l);
        const double T = 2 * r * r / (w * w);
        const double oracle = C::mu0 * l * kEta.lambda() * C::hbar / C::m_e * specfun::incomplete_gamma_upper(a, T) /
                              (pi * std::tgamma(a + 1.0) * w * w);
        EXPECT_NEAR(lg_em(g, kEta, r, z).B_z, oracle, 1e-9 * std::abs(oracle) + 1e-30);
      }
    }
  }
}

TEST(LGEM, AzimuthalFieldMatchesAmpereQuadrature) {
  LGParams g{1, 1, 1.0, 40.0};
  for (double z : {0.0, 0.5 * g.zR(), 3.0 * g.zR()}) {
    for (double r : {0.2, 0.9, 2.0}) {
      auto f = [&](double t) { return lg_effective_k(g, t, z) * lg_probability(g, t, z) * t; };
      const double oracle =
          C::mu0 * kEta.lambda() * C::hbar / C::m_e / r * quad::integrate(f, 0.0, r, {1e-30, 1e-13, 20000}).value;
      const double got = lg_em(g, kEta, r, z).B_phi;
      EXPECT_NEAR(got, oracle, 1e-9 * std::abs(oracle));
    }
  }
}

TEST(LGEM, EffectiveWavenumberIsAxialPhaseGradient) {
  LGParams g{2, 1, 1.0, 40.0};
  for (double z : {-5.0, 0.0, 3.0}) {
    for (double r : {0.1, 0.8, 1.5}) {
      const double h = 1e-5;
      auto phase = [&](double zz) { return g.curvature_phase(r, zz) + g.k * zz - g.gouy(zz); };
      const double fd = (phase(z + h) - phase(z - h)) / (2 * h);
      EXPECT_NEAR(lg_effective_k(g, r, z), fd, 1e-7 * g.k);
    }
  }
}

TEST(LGEM, WaistHasNoRadialFlux) {
  LGParams g{1, 0, 1.0, 40.0};
  EXPECT_EQ(lg_radial_current_factor(g, 0.7, 0.0), 0.0);
  const auto rep = radiated_power_check(g, kEta, 0.0, 6.0);
  EXPECT_LE(std::abs(rep.relative_flux()), 1e-12);
}

TEST(LineDensityDemo, OneNanoampAt300keV) {
  const auto d = LineDensity::demo();
  // v = 0.7765 c at 300 keV.
  EXPECT_NEAR(d.eta, 1e-9 / (C::e * 0.776526 * C::c), 1e-4 * d.eta);
}
