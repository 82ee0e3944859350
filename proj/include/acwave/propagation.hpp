#pragma once

// Fourier optics: lens transform of a mask, selection of the +1 order and
// band-limited angular-spectrum defocus into focal series and volumes.

#include <acwave/constants.hpp>
#include <acwave/errors.hpp>
#include <acwave/fft.hpp>
#include <acwave/field.hpp>
#include <acwave/holography.hpp>
#include <acwave/specfun.hpp>
#include <acwave/wavefield.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace acwave {

struct Optics {
  double wavelength = energy_to_wavelength(PhysicalBeam{300e3, Kinematics::relativistic});
  double focal_length = 1.0;

  void validate() const {
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw ConfigError("Optics: wavelength must be > 0");
    if (!(focal_length > 0.0) || !std::isfinite(focal_length)) throw ConfigError("Optics: focal length must be > 0");
  }
  double k() const { return 2.0 * pi / wavelength; }
};

// Back-focal-plane field of a thin lens: unitary DFT, output pitch lambda f / (N p).
inline ComplexField fraunhofer(const ComplexField& in, const Optics& o) {
  o.validate();
  in.validate_geometry();
  if (in.nx != in.ny) throw ConfigError("fraunhofer: grid must be square");
  ComplexField out(in.nx, in.ny, o.wavelength * o.focal_length / (static_cast<double>(in.nx) * in.pitch), 0.0);
  out.values = in.values;
  fft::centred_transform(out.values, out.nx, out.ny, false);
  return out;
}

// Pixel offset of the +1 order from the far-field centre.
inline double first_order_offset_px(const ComplexField& farfield, const Optics& o, double carrier_period) {
  return o.wavelength * o.focal_length / carrier_period / farfield.pitch;
}

// Crops an out_n^2 tile centred on the +1 order (at +lambda f / Lambda along x)
// and zeroes it outside a circular window of the given radius [m].
inline ComplexField extract_first_order(const ComplexField& farfield, const Optics& o, double carrier_period,
                                        double window_radius, std::size_t out_n = 512) {
  o.validate();
  farfield.validate_geometry();
  if (!(carrier_period > 0.0)) throw ConfigError("extract_first_order: carrier period must be > 0");
  if (!(window_radius > 0.0)) throw ConfigError("extract_first_order: window radius must be > 0");
  const double sep = o.wavelength * o.focal_length / carrier_period;
  if (window_radius >= sep / 2.0)
    throw ConfigError("extract_first_order: window radius reaches into the neighbouring order");
  const double rpx = window_radius / farfield.pitch;
  if (2.0 * rpx >= static_cast<double>(out_n)) throw ConfigError("extract_first_order: window exceeds the output tile");
  const long off = std::lround(first_order_offset_px(farfield, o, carrier_period));
  const long cx = static_cast<long>(farfield.nx / 2) + off, cy = static_cast<long>(farfield.ny / 2);
  const long h = static_cast<long>(out_n / 2);
  if (cx - h < 0 || cx - h + static_cast<long>(out_n) > static_cast<long>(farfield.nx) || cy - h < 0 ||
      cy - h + static_cast<long>(out_n) > static_cast<long>(farfield.ny))
    throw ConfigError("extract_first_order: +1 order tile falls outside the far-field grid");
  ComplexField out(out_n, out_n, farfield.pitch, farfield.z);
  for (std::size_t iy = 0; iy < out_n; ++iy)
    for (std::size_t ix = 0; ix < out_n; ++ix) {
      const double dx = static_cast<double>(ix) - static_cast<double>(h);
      const double dy = static_cast<double>(iy) - static_cast<double>(h);
      if (dx * dx + dy * dy > rpx * rpx) continue;
      out.at(ix, iy) = farfield.at(static_cast<std::size_t>(cx - h + static_cast<long>(ix)),
                                   static_cast<std::size_t>(cy - h + static_cast<long>(iy)));
    }
  return out;
}

// Far field sampled on an arbitrary out_n^2 grid of the given pitch centred at
// (centre_x, centre_y) in the focal plane, optionally defocused by dz. The
// defocus is applied in the pupil as exp(i dz (k_z - k)) with k_t = k |x| / f,
// which is the angular-spectrum transfer function of the focal-plane field.
// Evaluated as a matrix DFT over the bounding box of the nonzero input; at
// the native pitch and dz = 0 it reproduces fraunhofer() exactly.
inline ComplexField fraunhofer_zoom(const ComplexField& in, const Optics& o, double centre_x, double centre_y,
                                    std::size_t out_n, double out_pitch, double dz = 0.0) {
  o.validate();
  in.validate_geometry();
  if (out_n < 2) throw ConfigError("fraunhofer_zoom: output grid must be at least 2x2");
  if (!(out_pitch > 0.0)) throw ConfigError("fraunhofer_zoom: output pitch must be > 0");
  if (!std::isfinite(dz) || !std::isfinite(centre_x) || !std::isfinite(centre_y))
    throw ConfigError("fraunhofer_zoom: non-finite placement");
  std::size_t x0 = in.nx, x1 = 0, y0 = in.ny, y1 = 0;
  for (std::size_t iy = 0; iy < in.ny; ++iy)
    for (std::size_t ix = 0; ix < in.nx; ++ix)
      if (in.at(ix, iy) != cplx(0.0)) {
        x0 = std::min(x0, ix);
        x1 = std::max(x1, ix);
        y0 = std::min(y0, iy);
        y1 = std::max(y1, iy);
      }
  ComplexField out(out_n, out_n, out_pitch, dz);
  if (x0 > x1) return out;
  const auto bx = static_cast<Eigen::Index>(x1 - x0 + 1), by = static_cast<Eigen::Index>(y1 - y0 + 1);
  const double k = o.k(), lf = o.wavelength * o.focal_length;

  Eigen::MatrixXcd M(by, bx);
  double max_step = 0.0;
  for (Eigen::Index r = 0; r < by; ++r) {
    const double y = in.y(y0 + static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < bx; ++c) {
      const double x = in.x(x0 + static_cast<std::size_t>(c));
      cplx v = in.at(x0 + static_cast<std::size_t>(c), y0 + static_cast<std::size_t>(r));
      if (dz != 0.0 && v != cplx(0.0)) {
        const double kt2 = k * k * (x * x + y * y) / (o.focal_length * o.focal_length);
        if (kt2 >= k * k) throw ConfigError("fraunhofer_zoom: pupil reaches evanescent angles");
        const double kz = std::sqrt(k * k - kt2);
        v *= std::polar(1.0, -dz * kt2 / (k + kz));
        // Phase change per pupil pixel, |d/dr (dz (k_z - k))| p = |dz| k r p / (f^2 k_z / k).
        max_step = std::max(max_step, std::abs(dz) * k * std::hypot(x, y) * in.pitch * k /
                                          (o.focal_length * o.focal_length * kz));
      }
      M(r, c) = v;
    }
  }
  if (max_step >= pi)
    throw ConfigError("fraunhofer_zoom: defocus phase aliases on the pupil grid (|dz| too large for this pitch)");

  const auto n = static_cast<Eigen::Index>(out_n);
  Eigen::MatrixXcd Ex(bx, n), Ey(n, by);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double u = centre_x + (static_cast<double>(j) - static_cast<double>(out_n / 2)) * out_pitch;
    const double v = centre_y + (static_cast<double>(j) - static_cast<double>(out_n / 2)) * out_pitch;
    for (Eigen::Index c = 0; c < bx; ++c)
      Ex(c, j) = std::polar(1.0, -2.0 * pi * in.x(x0 + static_cast<std::size_t>(c)) * u / lf);
    for (Eigen::Index r = 0; r < by; ++r)
      Ey(j, r) = std::polar(1.0, -2.0 * pi * in.y(y0 + static_cast<std::size_t>(r)) * v / lf);
  }
  const Eigen::MatrixXcd F = (Ey * M) * Ex;
  const double s = 1.0 / std::sqrt(static_cast<double>(in.nx * in.ny));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out.at(static_cast<std::size_t>(c), static_cast<std::size_t>(r)) = F(r, c) * s;
  return out;
}

struct PropagationReport {
  double f_limit = 0.0;           // per-axis band limit [1/m]
  double removed_fraction = 0.0;  // spectral power dropped by the band limit and evanescent cut
};

// Exact free-space transfer function exp(i dz (k_z - k)), with the constant
// exp(i k dz) dropped. Frequencies whose chirp would alias on this grid are
// removed (|f_x| or |f_y| above 1 / (lambda sqrt((2 dz df)^2 + 1))); if that
// removes more than max_cut of the power the step is refused.
inline ComplexField angular_spectrum(const ComplexField& in, double wavelength, double dz, double max_cut = 1e-2,
                                     PropagationReport* report = nullptr) {
  in.validate_geometry();
  if (!(wavelength > 0.0)) throw ConfigError("angular_spectrum: wavelength must be > 0");
  if (!std::isfinite(dz)) throw ConfigError("angular_spectrum: dz must be finite");
  const std::size_t nx = in.nx, ny = in.ny;
  const double k = 2.0 * pi / wavelength;
  const double dfx = 1.0 / (static_cast<double>(nx) * in.pitch);
  const double dfy = 1.0 / (static_cast<double>(ny) * in.pitch);
  const double flx = 1.0 / (wavelength * std::sqrt(std::pow(2.0 * dz * dfx, 2) + 1.0));
  const double fly = 1.0 / (wavelength * std::sqrt(std::pow(2.0 * dz * dfy, 2) + 1.0));

  ComplexField out = in;
  out.z = in.z + dz;
  if (dz == 0.0) {
    if (report) *report = {std::min(flx, fly), 0.0};
    return out;
  }
  fft::centred_transform(out.values, nx, ny, false);
  double total = 0.0, removed = 0.0;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double fy = (static_cast<double>(iy) - static_cast<double>(ny / 2)) * dfy;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double fx = (static_cast<double>(ix) - static_cast<double>(nx / 2)) * dfx;
      cplx& v = out.at(ix, iy);
      const double p = std::norm(v);
      total += p;
      const double kt2 = 4.0 * pi * pi * (fx * fx + fy * fy);
      if (std::abs(fx) > flx || std::abs(fy) > fly || kt2 >= k * k) {
        removed += p;
        v = 0.0;
        continue;
      }
      const double kz = std::sqrt(k * k - kt2);
      v *= std::polar(1.0, -dz * kt2 / (k + kz));
    }
  }
  const double frac = total > 0.0 ? removed / total : 0.0;
  if (report) *report = {std::min(flx, fly), frac};
  if (frac > max_cut) {
    std::ostringstream os;
    os << "angular_spectrum: band limit for dz=" << dz << " m would remove " << frac
       << " of the power (limit " << max_cut << "); refine the grid or shorten the step";
    throw ConfigError(os.str());
  }
  fft::centred_transform(out.values, nx, ny, true);
  return out;
}

// Stable 64-bit FNV-1a fingerprint of a hologram specification.
inline std::string spec_hash(const HologramSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << s.ring1_diameter << '|' << s.ring2_diameter << '|' << s.ring_thickness << '|' << s.carrier_period << '|'
     << s.ell << '|' << s.D << '|' << to_string(s.mode) << '|' << s.nx << '|' << s.ny << '|' << s.pitch << '|'
     << s.ring1 << s.ring2 << s.balance_rings;
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream hex;
  hex << std::hex;
  hex.width(16);
  hex.fill('0');
  hex << h;
  return hex.str();
}

struct FocalStack {
  std::vector<ComplexField> frames;
  std::vector<double> z_values;
  std::string spec_hash;

  void validate() const {
    if (frames.empty() || frames.size() != z_values.size()) throw ConfigError("FocalStack: frames and z list mismatch");
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (!frames[i].same_geometry(frames[0])) throw ConfigError("FocalStack: frames differ in grid geometry");
      if (!(z_values[i] > z_values[i - 1])) throw ConfigError("FocalStack: z values must increase strictly");
    }
  }
};

enum class SeriesMethod {
  pupil,             // defocus applied in the hologram plane, zoomed matrix DFT per frame
  angular_spectrum,  // FFT far field, windowed +1 order, band-limited defocus
};

struct SeriesOptions {
  Optics optics{};
  SeriesMethod method = SeriesMethod::pupil;
  // pupil route: frame_n^2 frames; frame_pitch 0 puts 24 pixels across the
  // first zero of the outer ring's Bessel core
  std::size_t frame_n = 256;
  double frame_pitch = 0.0;
  // angular-spectrum route
  double window_radius = 0.0;  // [m]; 0 selects 0.47 of the order separation
  std::size_t out_n = 0;  // 0: smallest even tile holding the window
  double max_cut = 1e-2;

  void validate() const {
    optics.validate();
    if (frame_n < 2 || out_n == 1) throw ConfigError("SeriesOptions: frame sizes must be >= 2");
    if (!(frame_pitch >= 0.0) || !std::isfinite(frame_pitch)) throw ConfigError("SeriesOptions: frame pitch must be >= 0");
  }
};

// Focal-plane field of the +1 order of the rendered mask (FFT route).
inline ComplexField first_order_field(const HologramSpec& spec, const SeriesOptions& opt) {
  opt.validate();
  const Image mask = design_hologram(spec);
  const ComplexField ff = fraunhofer(to_field(mask), opt.optics);
  const double sep = opt.optics.wavelength * opt.optics.focal_length / spec.carrier_period;
  const double w = opt.window_radius > 0.0 ? opt.window_radius : 0.47 * sep;
  const std::size_t n = opt.out_n ? opt.out_n : 2 * static_cast<std::size_t>(std::ceil(w / ff.pitch)) + 2;
  return extract_first_order(ff, opt.optics, spec.carrier_period, w, n);
}

// Pitch of pupil-route frames.
inline double series_pitch(const HologramSpec& spec, const SeriesOptions& opt) {
  if (opt.frame_pitch > 0.0) return opt.frame_pitch;
  const double kr = ring_to_kr(spec.max_diameter() / 2.0, opt.optics.wavelength, opt.optics.focal_length).kr;
  return specfun::bessel_j_zero(spec.ell, 1) / kr / 24.0;
}

// Each frame is computed from the hologram (or the focal plane) independently,
// so the result does not depend on evaluation order.
inline FocalStack make_focal_series(const HologramSpec& spec, const SeriesOptions& opt, std::vector<double> z_list) {
  opt.validate();
  if (z_list.empty()) throw ConfigError("make_focal_series: z list is empty");
  std::sort(z_list.begin(), z_list.end());
  if (std::adjacent_find(z_list.begin(), z_list.end()) != z_list.end())
    throw ConfigError("make_focal_series: duplicate z values");
  FocalStack st;
  st.spec_hash = spec_hash(spec);
  st.z_values = z_list;
  st.frames.reserve(z_list.size());
  if (opt.method == SeriesMethod::pupil) {
    const ComplexField mask = to_field(design_hologram(spec));
    const double cx = opt.optics.wavelength * opt.optics.focal_length / spec.carrier_period;
    const double pitch = series_pitch(spec, opt);
    for (double z : z_list) st.frames.push_back(fraunhofer_zoom(mask, opt.optics, cx, 0.0, opt.frame_n, pitch, z));
  } else {
    const ComplexField focal = first_order_field(spec, opt);
    for (double z : z_list) st.frames.push_back(angular_spectrum(focal, opt.optics.wavelength, z, opt.max_cut));
  }
  return st;
}

struct Volume {
  std::size_t nx = 0, ny = 0, nz = 0;
  double pitch = 0.0, z0 = 0.0, dz = 0.0;
  std::vector<float> values;  // index (iz * ny + iy) * nx + ix

  float at(std::size_t ix, std::size_t iy, std::size_t iz) const { return values[(iz * ny + iy) * nx + ix]; }
};

// Intensity resampled on nz uniform planes spanning the stack, linear in z.
inline Volume stack_to_volume(const FocalStack& st, std::size_t nz) {
  st.validate();
  if (st.frames.size() < 2) throw ConfigError("stack_to_volume: need at least two frames");
  if (nz < 2) throw ConfigError("stack_to_volume: nz must be >= 2");
  Volume v;
  v.nx = st.frames[0].nx;
  v.ny = st.frames[0].ny;
  v.nz = nz;
  v.pitch = st.frames[0].pitch;
  v.z0 = st.z_values.front();
  v.dz = (st.z_values.back() - v.z0) / static_cast<double>(nz - 1);
  const std::size_t plane = v.nx * v.ny;
  v.values.resize(plane * nz);
  std::size_t seg = 0;
  for (std::size_t iz = 0; iz < nz; ++iz) {
    const double z = iz + 1 == nz ? st.z_values.back() : v.z0 + v.dz * static_cast<double>(iz);
    while (seg + 2 < st.z_values.size() && z > st.z_values[seg + 1]) ++seg;
    const double za = st.z_values[seg], zb = st.z_values[seg + 1];
    const double t = std::clamp((z - za) / (zb - za), 0.0, 1.0);
    const auto& A = st.frames[seg].values;
    const auto& B = st.frames[seg + 1].values;
    for (std::size_t i = 0; i < plane; ++i)
      v.values[iz * plane + i] = static_cast<float>((1.0 - t) * std::norm(A[i]) + t * std::norm(B[i]));
  }
  return v;
}

}  // namespace acwave
