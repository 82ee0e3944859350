#include <acwave/kinematics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace acwave;

namespace {

const double kD[] = {0.0, 0.158, 0.325, 0.510};

// Petal direction found by brute-force scan of the intensity on a ring.
double petal_angle_oracle(const AccelPair& p, double r, double z, double near) {
  double best = near, best_i = -1.0;
  const int n = 4000;
  for (int i = -n; i <= n; ++i) {
    const double phi = near + (pi / (2 * p.ell)) * i / n;
    const double v = std::norm(eval_accel(p, r, phi, z));
    if (v > best_i) {
      best_i = v;
      best = phi;
    }
  }
  return best;
}

}  // namespace

TEST(Rotation, LinearWithoutAnisotropy) {
  RotationLaw law{2, 0.0, 0.37, 0.0};
  for (double z = -40; z < 40; z += 0.93) EXPECT_NEAR(rotation(law, z), -0.37 * z / 2, 1e-12);
}

TEST(Rotation, DirectEvaluation) {
  RotationLaw law{1, 0.510, 1.0, 0.0};
  const double oracle = -std::atan((1.51 / 0.49) * 1.0);
  EXPECT_NEAR(rotation(law, pi / 4), oracle, 1e-14);
  EXPECT_NEAR(oracle, -1.2567, 5e-4);
  for (double D : kD) EXPECT_EQ(rotation(RotationLaw{3, D, 2.0, 0.0}, 0.0), 0.0);
}

TEST(Rotation, ContinuousAcrossPolesAndPeriodic) {
  for (double D : kD) {
    RotationLaw law{2, D, 0.8, 0.1};
    const double T = law.period();
    for (double z = -3 * T; z < 3 * T; z += T / 97) {
      EXPECT_NEAR(rotation(law, z + T), rotation(law, z) - pi / 2, 1e-12);
      EXPECT_LT(std::abs(rotation(law, z + 1e-7) - rotation(law, z)), 1e-5);
    }
    // Mean rate over a period is -dkz/l for every D.
    EXPECT_NEAR((rotation(law, 0.3 + T) - rotation(law, 0.3)) / T, -0.8 / 2, 1e-12);
  }
}

TEST(Rotation, RejectsBalancedState) {
  EXPECT_THROW(rotation(RotationLaw{1, 1.0, 1.0, 0.0}, 0.5), DomainError);
  EXPECT_THROW(angular_velocity(RotationLaw{1, 1.0, 1.0, 0.0}, 0.5), DomainError);
  EXPECT_THROW(angular_acceleration(RotationLaw{1, 1.0, 1.0, 0.0}, 0.5), DomainError);
  EXPECT_THROW(rotation(RotationLaw{1, 0.5, 0.0, 0.0}, 0.5), DomainError);
}

TEST(AngularVelocity, Values) {
  RotationLaw law0{3, 0.0, 0.6, 0.0};
  for (double z = 0; z < 10; z += 0.7) EXPECT_NEAR(angular_velocity(law0, z), -0.2, 1e-15);
  RotationLaw law{1, 0.510, 1.0, 0.0};
  EXPECT_NEAR(angular_velocity(law, 0.0), -1.51 / 0.49, 1e-13);
  EXPECT_NEAR(angular_velocity(law, 0.0), -3.0816, 1e-4);
}

TEST(AngularVelocity, ExtremeRatio) {
  for (double D : kD) {
    RotationLaw law{1, D, 1.3, 0.0};
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double v = angular_velocity(law, law.period() * i / 20000.0);
      EXPECT_LT(v, 0.0);
      lo = std::min(lo, std::abs(v));
      hi = std::max(hi, std::abs(v));
    }
    EXPECT_NEAR(hi / lo, std::pow((1 + D) / (1 - D), 2), 1e-9);
  }
  EXPECT_NEAR(std::pow(1.325 / 0.675, 2), 3.853, 1e-3);
}

TEST(AngularAcceleration, ZeroWithoutAnisotropyAndSignPattern) {
  for (double z = 0; z < 10; z += 0.3) EXPECT_EQ(angular_acceleration(RotationLaw{1, 0.0, 1.0, 0.0}, z), 0.0);
  RotationLaw law{1, 0.325, 1.0, 0.0};
  const double T = law.period();
  EXPECT_EQ(angular_acceleration(law, 0.0), 0.0);
  EXPECT_NEAR(angular_acceleration(law, T / 2), 0.0, 1e-14);
  // Within each half period the sign is constant, and it alternates.
  const double a1 = angular_acceleration(law, T / 4);
  const double a2 = angular_acceleration(law, 3 * T / 4);
  EXPECT_LT(a1 * a2, 0.0);
}

TEST(Kinematics, FiniteDifferenceConsistency) {
  std::mt19937_64 rng(3);
  for (double D : kD) {
    RotationLaw law{2, D, 0.9, 0.0};
    std::uniform_real_distribution<double> uz(-3 * law.period(), 3 * law.period());
    for (int i = 0; i < 100; ++i) {
      const double z = uz(rng);
      const double h = 1e-4;
      const double v_fd = (rotation(law, z + h) - rotation(law, z - h)) / (2 * h);
      const double a_fd = (angular_velocity(law, z + h) - angular_velocity(law, z - h)) / (2 * h);
      const double v = angular_velocity(law, z), a = angular_acceleration(law, z);
      EXPECT_LE(std::abs(v_fd - v), 1e-6 * std::abs(v));
      // Relative to the acceleration scale, since a crosses zero.
      const double ascale = law.dkz * law.dkz / law.ell * 4 * D / std::pow(1 - D, 4);
      EXPECT_LE(std::abs(a_fd - a), 1e-6 * std::max(std::abs(a), ascale));
    }
  }
}

TEST(PetalRotation, TracksIntensityMaxima) {
  for (double D : {0.0, 0.325, 0.510}) {
    const auto p = AccelPair::from_kr(1, D, 1.0, 0.5, 0.495);
    const auto law = RotationLaw::from_pair(p);
    const double r = 2.0;
    const double start = petal_angle_oracle(p, r, 0.0, 0.0);
    EXPECT_NEAR(start, 0.0, 1e-3);
    double track = start;
    for (int i = 1; i <= 40; ++i) {
      const double z = law.period() * i / 40.0;
      track = petal_angle_oracle(p, r, z, track);
      EXPECT_NEAR(track, petal_rotation(law, z), 2e-3) << "D=" << D << " z=" << z;
    }
  }
}

TEST(FluxLines, SingleModeHelix) {
  const auto m = ModeParams::from_kz(1, 0.0, 1.0, 0.6);
  FluxControl ctrl{0.0, 50.0, 0.01, 1e-12};
  const auto lines = trace_flux_lines(m, {{1.5, 0.0}, {3.1, 1.0}}, ctrl);
  for (const auto& t : lines) {
    ASSERT_FALSE(t.truncated);
    const double rate = 1.0 / (0.6 * t.r0 * t.r0);
    for (const auto& s : t.samples) {
      EXPECT_EQ(s.r, t.r0);
      EXPECT_NEAR(s.phi, t.phi0 + rate * s.z, 1e-10);
    }
  }
}

TEST(FluxLines, EqualRadialWavenumbersAreStraight) {
  AccelPair p{2, 0.4, 1.0, 0.8, 0.8, 0.6, 0.6};
  FluxControl ctrl{0.0, 100.0, 0.05, 1e-12};
  const auto lines = trace_flux_lines(p, {{1.0, 0.2}, {2.2, 1.3}, {4.0, -0.7}}, ctrl);
  for (const auto& t : lines) {
    ASSERT_FALSE(t.truncated) << t.reason;
    EXPECT_LE(t.straightness, 1e-9 * t.chord_length);
  }
}

TEST(FluxLines, SeedOnNodeIsTruncated) {
  const auto p = AccelPair::from_kr(1, 0.0, 1.0, 0.8, 0.7);
  FluxControl ctrl{0.0, 10.0, 0.01, 1e-12};
  // The axis is a node of every l >= 1 component.
  const auto lines = trace_flux_lines(p, {{0.0, 0.0}}, ctrl);
  EXPECT_TRUE(lines[0].truncated);
  EXPECT_EQ(lines[0].samples.size(), 1u);
}

TEST(FluxLines, AcceleratingPairConvergesWithStep) {
  const auto p = AccelPair::from_kr(1, 0.325, 1.0, 0.5, 0.45);
  const double T = pi / std::abs(p.dkz());
  // Lines skirt the dark lanes between petals, where the phase gradient is
  // steep; the default step is too coarse there, so check order-4 convergence.
  FluxControl coarse{0.0, T, T / 8000, 1e-12};
  FluxControl fine{0.0, T, T / 16000, 1e-12};
  const auto a = trace_flux_lines(p, {{1.8, 0.1}}, coarse)[0];
  const auto b = trace_flux_lines(p, {{1.8, 0.1}}, fine)[0];
  ASSERT_FALSE(a.truncated);
  ASSERT_FALSE(b.truncated);
  EXPECT_NEAR(a.samples.back().r, b.samples.back().r, 1e-5);
  EXPECT_NEAR(a.samples.back().phi, b.samples.back().phi, 1e-5);
  for (std::size_t i = 1; i < a.samples.size(); ++i) EXPECT_GT(a.samples[i].z, a.samples[i - 1].z);
}

TEST(FluxLines, Validation) {
  const auto p = AccelPair::from_kr(1, 0.0, 1.0, 0.8, 0.7);
  EXPECT_THROW(trace_flux_lines(p, {{1.0, 0.0}}, FluxControl{1.0, 0.0, 0.1, 0.0}), ConfigError);
  EXPECT_THROW(trace_flux_lines(p, {{1.0, 0.0}}, FluxControl{0.0, 1.0, -0.1, 0.0}), ConfigError);
}
