#pragma once

#include <numbers>

namespace acwave {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018 values, SI units.
struct PhysConstants {
  static constexpr double e = 1.602176634e-19;        // C
  static constexpr double m_e = 9.1093837015e-31;     // kg
  static constexpr double hbar = 1.054571817e-34;     // J s
  static constexpr double c = 299792458.0;            // m/s
  static constexpr double eps0 = 8.8541878128e-12;    // F/m
  static constexpr double mu0 = 1.25663706212e-6;     // N/A^2
  static constexpr double mu_B = e * hbar / (2.0 * m_e);  // J/T
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace acwave
