#pragma once

// Complex amplitudes on a uniform square-pixel Cartesian grid. The optical
// axis passes through pixel (nx/2, ny/2); storage is row-major in y.

#include <acwave/errors.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace acwave {

using cplx = std::complex<double>;

struct ComplexField {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double pitch = 0.0;  // length per pixel
  double z = 0.0;      // plane coordinate
  std::vector<cplx> values;

  ComplexField() = default;
  ComplexField(std::size_t nx_, std::size_t ny_, double pitch_, double z_ = 0.0)
      : nx(nx_), ny(ny_), pitch(pitch_), z(z_), values(nx_ * ny_) {
    validate_geometry();
  }

  void validate_geometry() const {
    if (nx < 2 || ny < 2) throw ConfigError("ComplexField: nx and ny must be >= 2");
    if (!(pitch > 0.0) || !std::isfinite(pitch)) throw ConfigError("ComplexField: pitch must be > 0");
    if (values.size() != nx * ny) throw ConfigError("ComplexField: value count does not match grid");
  }

  void validate() const {
    validate_geometry();
    for (const auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw ConfigError("ComplexField: non-finite sample");
  }

  cplx& at(std::size_t ix, std::size_t iy) { return values[iy * nx + ix]; }
  const cplx& at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }

  double x(std::size_t ix) const { return (static_cast<double>(ix) - static_cast<double>(nx / 2)) * pitch; }
  double y(std::size_t iy) const { return (static_cast<double>(iy) - static_cast<double>(ny / 2)) * pitch; }

  bool same_geometry(const ComplexField& o) const { return nx == o.nx && ny == o.ny && pitch == o.pitch; }

  double power() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s;
  }

  std::vector<double> intensity() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::norm(values[i]);
    return out;
  }
};

// Real-valued image on the same grid convention (intensity, transmission).
struct Image {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double pitch = 1.0;
  std::vector<double> values;

  Image() = default;
  Image(std::size_t nx_, std::size_t ny_, double pitch_ = 1.0)
      : nx(nx_), ny(ny_), pitch(pitch_), values(nx_ * ny_, 0.0) {}

  static Image intensity_of(const ComplexField& f) {
    Image im(f.nx, f.ny, f.pitch);
    im.values = f.intensity();
    return im;
  }

  double& at(std::size_t ix, std::size_t iy) { return values[iy * nx + ix]; }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

// Fills a field by evaluating f(r, phi) at each pixel centre.
template <class F>
ComplexField sample_polar(std::size_t n, double pitch, double z, F&& f) {
  ComplexField out(n, n, pitch, z);
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double y = out.y(iy);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = out.x(ix);
      out.at(ix, iy) = f(std::hypot(x, y), std::atan2(y, x));
    }
  }
  return out;
}

}  // namespace acwave
