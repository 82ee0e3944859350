#pragma once

// Off-axis double-ring holograms. Each annulus carries a tilted carrier whose
// phase is offset by +/- l varphi_l(phi), and whose amplitude encodes the
// anisotropy envelope; the +1 diffraction order of the mask is then the
// angularly accelerating superposition in the back focal plane of a lens.

#include <acwave/constants.hpp>
#include <acwave/errors.hpp>
#include <acwave/field.hpp>
#include <acwave/wavefield.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace acwave {

enum class HologramMode { grayscale, binary };

inline const char* to_string(HologramMode m) { return m == HologramMode::binary ? "binary" : "grayscale"; }

inline HologramMode hologram_mode_from_string(const std::string& s) {
  if (s == "binary") return HologramMode::binary;
  if (s == "grayscale") return HologramMode::grayscale;
  throw ConfigError("unknown hologram mode '" + s + "' (expected binary or grayscale)");
}

// Defaults reproduce the fabricated geometry: 8.0 / 7.0 um rings of 200 nm
// width with a 75 nm carrier, rendered at 15 nm on a 1024^2 canvas.
struct HologramSpec {
  double ring1_diameter = 8.0e-6;
  double ring2_diameter = 7.0e-6;
  double ring_thickness = 200e-9;
  double carrier_period = 75e-9;
  int ell = 1;
  double D = 0.0;
  HologramMode mode = HologramMode::grayscale;
  std::size_t nx = 1024;
  std::size_t ny = 1024;
  double pitch = 15e-9;
  bool ring1 = true;
  bool ring2 = true;
  // Scale each ring's amplitude by (smallest radius / its radius) so both
  // Bessel components reach the focal plane with equal weight.
  bool balance_rings = true;

  // Same rings with a 50 nm carrier at 12.5 nm pitch on 2048^2. The finer
  // carrier pushes the 0 and -1 orders further from the +1 order, which keeps
  // their tails out of the beam core in simulated focal series.
  static HologramSpec desk() {
    HologramSpec s;
    s.carrier_period = 50e-9;
    s.pitch = 12.5e-9;
    s.nx = s.ny = 2048;
    return s;
  }

  void validate() const {
    if (ell < 1) throw ConfigError("HologramSpec: ell must be a positive integer");
    if (!(D >= 0.0 && D <= 1.0)) throw ConfigError("HologramSpec: D must lie in [0, 1]");
    if (!ring1 && !ring2) throw ConfigError("HologramSpec: at least one ring must be enabled");
    if (nx < 2 || ny < 2) throw ConfigError("HologramSpec: canvas must be at least 2x2");
    if (!(pitch > 0.0)) throw ConfigError("HologramSpec: pitch must be > 0");
    if (!(ring_thickness > 0.0)) throw ConfigError("HologramSpec: ring thickness must be > 0");
    if (!(carrier_period > 0.0)) throw ConfigError("HologramSpec: carrier period must be > 0");
    if (ring1 && !(ring1_diameter > 0.0)) throw ConfigError("HologramSpec: ring1 diameter must be > 0");
    if (ring2 && !(ring2_diameter > 0.0)) throw ConfigError("HologramSpec: ring2 diameter must be > 0");
    if (ring1 && ring2 && ring1_diameter == ring2_diameter)
      throw ConfigError("HologramSpec: ring diameters must be distinct");
    if (!(ring_thickness < min_diameter() / 10.0))
      throw ConfigError("HologramSpec: ring thickness must be below a tenth of the smallest diameter");
    if (!(carrier_period < ring_thickness))
      throw ConfigError("HologramSpec: carrier period must be shorter than the ring thickness");
    if (pitch > carrier_period / 4.0 * (1.0 + 1e-12))
      throw ConfigError("HologramSpec: pitch exceeds carrier_period/4 (Nyquist for the carrier)");
    const double extent = std::min(nx, ny) * pitch;
    if (max_diameter() + ring_thickness >= extent)
      throw ConfigError("HologramSpec: rings do not fit on the canvas");
  }

  double min_diameter() const {
    if (ring1 && ring2) return std::min(ring1_diameter, ring2_diameter);
    return ring1 ? ring1_diameter : ring2_diameter;
  }
  double max_diameter() const {
    if (ring1 && ring2) return std::max(ring1_diameter, ring2_diameter);
    return ring1 ? ring1_diameter : ring2_diameter;
  }
};

// Transmission in [0, 1] on the canvas grid (optical axis at (nx/2, ny/2)).
inline Image design_hologram(const HologramSpec& s) {
  s.validate();
  Image t(s.nx, s.ny, s.pitch);
  const double R1 = s.ring1_diameter / 2.0, R2 = s.ring2_diameter / 2.0;
  const double half = s.ring_thickness / 2.0;
  const double rmin = s.min_diameter() / 2.0;
  const double w1 = s.balance_rings ? rmin / R1 : 1.0;
  const double w2 = s.balance_rings ? rmin / R2 : 1.0;
  const double env_max = (1.0 + s.D) / std::sqrt(1.0 + s.D * s.D);
  for (std::size_t iy = 0; iy < s.ny; ++iy) {
    const double y = (static_cast<double>(iy) - static_cast<double>(s.ny / 2)) * s.pitch;
    for (std::size_t ix = 0; ix < s.nx; ++ix) {
      const double x = (static_cast<double>(ix) - static_cast<double>(s.nx / 2)) * s.pitch;
      const double r = std::hypot(x, y);
      const bool in1 = s.ring1 && std::abs(r - R1) <= half;
      const bool in2 = s.ring2 && std::abs(r - R2) <= half;
      if (!in1 && !in2) continue;
      const double phi = std::atan2(y, x);
      const double A = std::sqrt(envelope(s.ell, s.D, phi)) / env_max;
      const double theta = s.ell * varphi(s.ell, s.D, phi) * (in1 ? 1.0 : -1.0);
      const double carrier = 0.5 * (1.0 + std::cos(2.0 * pi * x / s.carrier_period + theta));
      double v = (in1 ? w1 : w2) * A * carrier;
      if (s.mode == HologramMode::binary) v = carrier >= 0.5 ? (in1 ? w1 : w2) * A : 0.0;
      t.at(ix, iy) = v;
    }
  }
  return t;
}

inline ComplexField to_field(const Image& t, double z = 0.0) {
  ComplexField f(t.nx, t.ny, t.pitch, z);
  for (std::size_t i = 0; i < t.values.size(); ++i) f.values[i] = t.values[i];
  return f;
}

struct RadialWavenumber {
  double kr = 0.0;
  bool nonparaxial = false;  // R/f > 0.1: the linear lens mapping is no longer accurate
};

// Fourier-lens mapping of a ring of radius R: k_r = k R / f.
inline RadialWavenumber ring_to_kr(double ring_radius, double wavelength, double focal_length) {
  if (!(ring_radius > 0.0) || !(wavelength > 0.0) || !(focal_length > 0.0))
    throw DomainError("ring_to_kr: inputs must be positive");
  return {2.0 * pi / wavelength * ring_radius / focal_length, ring_radius / focal_length > 0.1};
}

// Radius in the focal plane within which a ring of width tau behaves as a
// thin delta ring (the far field is a Bessel beam there): lambda f / (2 tau).
inline double bessel_validity_radius(double ring_thickness, double wavelength, double focal_length) {
  if (!(ring_thickness > 0.0)) throw DomainError("bessel_validity_radius: thickness must be > 0");
  return wavelength * focal_length / (2.0 * ring_thickness);
}

// Winding number of the carrier-phase offset around a ring of the rendered
// mask, by local demodulation against exp(-2 pi i x / Lambda) over patches
// spanning whole carrier periods.
inline int measure_winding(const Image& t, const HologramSpec& s, int ring, std::size_t samples = 256) {
  if (ring != 1 && ring != 2) throw ConfigError("measure_winding: ring must be 1 or 2");
  const double R = (ring == 1 ? s.ring1_diameter : s.ring2_diameter) / 2.0;
  const int half_px = std::max(2, static_cast<int>(std::lround(s.carrier_period / s.pitch)));
  double total = 0.0, prev = 0.0;
  bool first = true;
  for (std::size_t k = 0; k <= samples; ++k) {
    const double phi = 2.0 * pi * static_cast<double>(k) / static_cast<double>(samples);
    const long cx = std::lround(R * std::cos(phi) / s.pitch) + static_cast<long>(s.nx / 2);
    const long cy = std::lround(R * std::sin(phi) / s.pitch) + static_cast<long>(s.ny / 2);
    cplx acc = 0.0;
    for (long dy = -half_px; dy <= half_px; ++dy)
      for (long dx = -half_px; dx < half_px; ++dx) {
        const long ix = cx + dx, iy = cy + dy;
        if (ix < 0 || iy < 0 || ix >= static_cast<long>(t.nx) || iy >= static_cast<long>(t.ny)) continue;
        const double x = (static_cast<double>(ix) - static_cast<double>(t.nx / 2)) * t.pitch;
        acc += t.at(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy)) *
               std::polar(1.0, -2.0 * pi * x / s.carrier_period);
      }
    const double ph = std::arg(acc);
    if (first) {
      prev = ph;
      first = false;
      continue;
    }
    total += std::remainder(ph - prev, 2.0 * pi);
    prev = ph;
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

}  // namespace acwave
