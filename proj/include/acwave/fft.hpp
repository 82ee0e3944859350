#pragma once

// Thin FFTW3 wrapper: unitary 2D transforms on row-major complex buffers,
// plus centred (shifted) variants for optical-axis-at-centre grids.

#include <acwave/errors.hpp>
#include <acwave/field.hpp>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

namespace acwave::fft {

// FFTW's planner is not reentrant; plan creation and destruction are serialized.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place unitary DFT, forward sign -1. FFTW_ESTIMATE planning does not touch
// the data and gives schedule-independent results.
inline void transform2d(std::vector<cplx>& a, std::size_t nx, std::size_t ny, bool inverse = false) {
  if (a.size() != nx * ny) throw ConfigError("fft::transform2d: buffer size does not match grid");
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), p, p, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (!plan) throw NumericalError("fft::transform2d: FFTW planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(nx * ny));
  for (auto& v : a) v *= s;
}

// Moves index (nx/2, ny/2) to (0, 0) (inverse = false) or back.
inline void shift(std::vector<cplx>& a, std::size_t nx, std::size_t ny, bool inverse = false) {
  std::vector<cplx> out(a.size());
  const std::size_t sx = inverse ? (nx + 1) / 2 : nx / 2;
  const std::size_t sy = inverse ? (ny + 1) / 2 : ny / 2;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const std::size_t oy = (iy + ny - sy) % ny;
    for (std::size_t ix = 0; ix < nx; ++ix) out[oy * nx + (ix + nx - sx) % nx] = a[iy * nx + ix];
  }
  a.swap(out);
}

// Transform of a field whose origin sits at (nx/2, ny/2); the output keeps
// zero frequency at (nx/2, ny/2).
inline void centred_transform(std::vector<cplx>& a, std::size_t nx, std::size_t ny, bool inverse = false) {
  shift(a, nx, ny, false);
  transform2d(a, nx, ny, inverse);
  shift(a, nx, ny, true);
}

// Signed frequency index of DFT bin i on an n-point grid.
inline long freq_index(std::size_t i, std::size_t n) {
  return i < (n + 1) / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

}  // namespace acwave::fft
