#pragma once

// Measurement pipeline for focal series: frame registration by polar
// cross-correlation, a least-squares fit of the rotation law, and kinematic
// curves evaluated from the fitted law (never from differenced data).

#include <acwave/constants.hpp>
#include <acwave/errors.hpp>
#include <acwave/fft.hpp>
#include <acwave/field.hpp>
#include <acwave/kinematics.hpp>
#include <acwave/propagation.hpp>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace acwave {

struct RegistrationOptions {
  double r_min_px = 1.0;
  double r_max_px = 0.0;  // 0: a quarter of the smaller image side
  double dr_px = 0.5;
  std::size_t n_phi = 2048;
  bool use_centroid = false;  // default is the geometric centre (nx/2, ny/2)

  void validate() const {
    if (!(r_min_px >= 0.0) || !(dr_px > 0.0)) throw ConfigError("RegistrationOptions: bad radial sampling");
    if (r_max_px != 0.0 && !(r_max_px > r_min_px)) throw ConfigError("RegistrationOptions: r_max must exceed r_min");
    if (n_phi < 16) throw ConfigError("RegistrationOptions: n_phi must be >= 16");
  }
};

// Registration limited to the beam core, r <= 2 / kbar_r. Outside it the
// J- weighted pattern, which turns by the phase-front law, gains weight and
// pulls the estimate away from the petal law.
inline RegistrationOptions core_registration(const HologramSpec& spec, const Optics& optics, double frame_pitch) {
  if (!(frame_pitch > 0.0)) throw ConfigError("core_registration: frame pitch must be > 0");
  const double R1 = spec.ring1 ? spec.ring1_diameter / 2.0 : spec.ring2_diameter / 2.0;
  const double R2 = spec.ring2 ? spec.ring2_diameter / 2.0 : R1;
  const double kr_mean = 0.5 * (ring_to_kr(R1, optics.wavelength, optics.focal_length).kr +
                                ring_to_kr(R2, optics.wavelength, optics.focal_length).kr);
  RegistrationOptions o;
  o.r_max_px = 2.0 / kr_mean / frame_pitch;
  return o;
}

struct RotationMeasurement {
  double angle = 0.0;        // wrapped to [-pi/(2 l), pi/(2 l))
  double uncertainty = 0.0;  // from the correlation-peak curvature
  double peak_correlation = 0.0;  // normalized, 1 for a perfect match
};

namespace detail {

inline double bilinear(const Image& im, double fx, double fy) {
  if (fx < 0.0 || fy < 0.0 || fx > static_cast<double>(im.nx - 1) || fy > static_cast<double>(im.ny - 1)) return 0.0;
  const auto ix = std::min(static_cast<std::size_t>(fx), im.nx - 2);
  const auto iy = std::min(static_cast<std::size_t>(fy), im.ny - 2);
  const double tx = fx - static_cast<double>(ix), ty = fy - static_cast<double>(iy);
  return (1 - tx) * (1 - ty) * im.at(ix, iy) + tx * (1 - ty) * im.at(ix + 1, iy) + (1 - tx) * ty * im.at(ix, iy + 1) +
         tx * ty * im.at(ix + 1, iy + 1);
}

inline std::array<double, 2> image_centre(const Image& im, bool centroid) {
  if (!centroid) return {static_cast<double>(im.nx / 2), static_cast<double>(im.ny / 2)};
  double s = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t iy = 0; iy < im.ny; ++iy)
    for (std::size_t ix = 0; ix < im.nx; ++ix) {
      const double v = im.at(ix, iy);
      s += v;
      sx += v * static_cast<double>(ix);
      sy += v * static_cast<double>(iy);
    }
  if (!(s > 0.0)) throw DomainError("image_centre: zero total intensity");
  return {sx / s, sy / s};
}

inline double wrap_symmetric(double a, double period) { return a - period * std::round(a / period); }

}  // namespace detail

// Rotates an image by delta (counter-clockwise, about the chosen centre) with
// bilinear resampling.
inline Image rotate_image(const Image& im, double delta, bool centroid = false) {
  const auto c = detail::image_centre(im, centroid);
  Image out(im.nx, im.ny, im.pitch);
  const double cs = std::cos(delta), sn = std::sin(delta);
  for (std::size_t iy = 0; iy < im.ny; ++iy)
    for (std::size_t ix = 0; ix < im.nx; ++ix) {
      const double x = static_cast<double>(ix) - c[0], y = static_cast<double>(iy) - c[1];
      out.at(ix, iy) = detail::bilinear(im, c[0] + cs * x + sn * y, c[1] - sn * x + cs * y);
    }
  return out;
}

// Angle theta such that the frame is the reference turned by theta, i.e. the
// minimizer of sum (frame rotated by -theta - reference)^2. Polar resampling
// about the centre, per-radius circular correlation weighted by r, then
// parabolic refinement of the peak.
inline RotationMeasurement measure_rotation(const Image& frame, const Image& reference, int ell,
                                            const RegistrationOptions& opt = {}) {
  opt.validate();
  if (ell < 1) throw DomainError("measure_rotation: ell must be a positive integer");
  if (frame.nx != reference.nx || frame.ny != reference.ny || frame.nx < 4 || frame.ny < 4)
    throw ConfigError("measure_rotation: frame and reference differ in geometry");
  double tf = 0.0, tr = 0.0;
  for (double v : frame.values) tf += v;
  for (double v : reference.values) tr += v;
  if (!(tf > 0.0) || !(tr > 0.0)) throw DomainError("measure_rotation: image has no intensity");

  const auto cf = detail::image_centre(frame, opt.use_centroid);
  const auto cr = detail::image_centre(reference, opt.use_centroid);
  const double r_max = opt.r_max_px > 0.0 ? opt.r_max_px : 0.25 * static_cast<double>(std::min(frame.nx, frame.ny));
  const std::size_t np = opt.n_phi;
  std::vector<cplx> acc(np, 0.0), ring_f(np), ring_r(np);
  double ef = 0.0, er = 0.0, dc_f = 0.0, dc_r = 0.0;
  for (double r = std::max(opt.r_min_px, 0.5 * opt.dr_px); r <= r_max; r += opt.dr_px) {
    for (std::size_t j = 0; j < np; ++j) {
      const double phi = 2.0 * pi * static_cast<double>(j) / static_cast<double>(np);
      const double c = std::cos(phi), s = std::sin(phi);
      ring_f[j] = detail::bilinear(frame, cf[0] + r * c, cf[1] + r * s);
      ring_r[j] = detail::bilinear(reference, cr[0] + r * c, cr[1] + r * s);
      ef += r * std::norm(ring_f[j]);
      er += r * std::norm(ring_r[j]);
    }
    fft::transform2d(ring_f, np, 1, false);
    fft::transform2d(ring_r, np, 1, false);
    dc_f += r * std::norm(ring_f[0]);
    dc_r += r * std::norm(ring_r[0]);
    for (std::size_t m = 0; m < np; ++m) acc[m] += r * ring_f[m] * std::conj(ring_r[m]);
  }
  const double ac_f = ef - dc_f;
  const double ac_r = er - dc_r;
  // Pixel-grid anisotropy of a round pattern stays well below this level.
  constexpr double min_modulation = 1e-2;
  if (!(ac_f > min_modulation * min_modulation * dc_f) || !(ac_r > min_modulation * min_modulation * dc_r))
    throw AmbiguousRotationError("measure_rotation: image is azimuthally uniform");
  fft::transform2d(acc, np, 1, true);
  std::vector<double> g(np);
  for (std::size_t j = 0; j < np; ++j) g[j] = acc[j].real();
  const auto [mn, mx] = std::minmax_element(g.begin(), g.end());
  if (!(*mx - *mn > 1e-9 * std::abs(*mx))) throw AmbiguousRotationError("measure_rotation: image is azimuthally uniform");
  const std::size_t j = static_cast<std::size_t>(mx - g.begin());
  const double gm = g[(j + np - 1) % np], g0 = g[j], gp = g[(j + 1) % np];
  const double curv = gm - 2.0 * g0 + gp;
  const double frac = curv < 0.0 ? std::clamp(0.5 * (gm - gp) / curv, -0.5, 0.5) : 0.0;
  const double step = 2.0 * pi / static_cast<double>(np);
  const double peak = g0 - 0.25 * (gm - gp) * frac;

  RotationMeasurement out;
  out.angle = detail::wrap_symmetric((static_cast<double>(j) + frac) * step, pi / ell);
  // After the three unitary transforms g is the raw correlation over sqrt(np).
  const double rt = std::sqrt(static_cast<double>(np));
  const double norm = std::sqrt(ef * er);
  out.peak_correlation = norm > 0.0 ? peak * rt / norm : 0.0;
  // Angle change that raises the mismatch by its current value.
  const double mismatch = std::max(1.0 - out.peak_correlation, 1e-16) * norm;
  const double c2 = -curv * rt / (step * step);
  out.uncertainty = c2 > 0.0 ? std::sqrt(2.0 * mismatch / c2) : pi / ell;
  return out;
}

struct RotationSeries {
  std::vector<double> z_values;
  std::vector<double> angles;        // unwrapped, relative to the reference frame
  std::vector<double> uncertainty;
  std::size_t reference_frame = 0;   // lowest-z frame

  void validate(int ell = 1) const {
    if (z_values.size() != angles.size() || (!uncertainty.empty() && uncertainty.size() != angles.size()))
      throw ConfigError("RotationSeries: list lengths differ");
    for (std::size_t i = 1; i < angles.size(); ++i) {
      if (!(z_values[i] > z_values[i - 1])) throw ConfigError("RotationSeries: z values must increase strictly");
      if (std::abs(angles[i] - angles[i - 1]) >= pi / ell)
        throw ConfigError("RotationSeries: adjacent angles jump by more than the petal symmetry period");
    }
  }
};

enum class SeriesRegistration {
  chained,   // accumulate frame-to-previous-frame increments
  direct,    // register every frame against the reference frame
};

// Rotation of every frame relative to the lowest-z frame. Increments between
// neighbours are assumed below half the petal symmetry period (pi / (2 l)).
inline RotationSeries measure_series(const std::vector<Image>& frames, const std::vector<double>& z_values, int ell,
                                     const RegistrationOptions& opt = {},
                                     SeriesRegistration mode = SeriesRegistration::chained) {
  if (frames.size() != z_values.size() || frames.size() < 2)
    throw ConfigError("measure_series: need at least two frames with matching z values");
  for (std::size_t i = 1; i < z_values.size(); ++i)
    if (!(z_values[i] > z_values[i - 1])) throw ConfigError("measure_series: z values must increase strictly");
  RotationSeries s;
  s.z_values = z_values;
  s.angles.assign(frames.size(), 0.0);
  s.uncertainty.assign(frames.size(), 0.0);
  s.reference_frame = 0;
  const double period = pi / ell;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (mode == SeriesRegistration::chained) {
      const auto m = measure_rotation(frames[i], frames[i - 1], ell, opt);
      s.angles[i] = s.angles[i - 1] + m.angle;
      s.uncertainty[i] = std::hypot(s.uncertainty[i - 1], m.uncertainty);
    } else {
      const auto m = measure_rotation(frames[i], frames[0], ell, opt);
      s.angles[i] = s.angles[i - 1] + detail::wrap_symmetric(m.angle - s.angles[i - 1], period);
      s.uncertainty[i] = m.uncertainty;
    }
  }
  return s;
}

inline RotationSeries measure_series(const FocalStack& st, int ell, const RegistrationOptions& opt = {},
                                     SeriesRegistration mode = SeriesRegistration::chained) {
  st.validate();
  std::vector<Image> frames;
  frames.reserve(st.frames.size());
  for (const auto& f : st.frames) frames.push_back(Image::intensity_of(f));
  return measure_series(frames, st.z_values, ell, opt, mode);
}

// Rotation model fitted to measured angles:
//   Phi(z) = phi0 - (U(dkz z + theta0) - U(theta0)) / l,  U = arctan(q tan .)
// theta0 = 0 is the phase-front law; intensity petals follow theta0 = pi/2.
struct FitResult {
  int ell = 1;
  double D = 0.0;
  double dkz = 0.0;
  double phi0 = 0.0;
  double theta0 = 0.0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // order (D, dkz, phi0, theta0)
  double residual_rms = 0.0;
  int iterations = 0;
  std::size_t reference_frame = 0;

  RotationLaw law() const { return {ell, D, dkz, phi0}; }
  double operator()(double z) const { return rotation_shifted(law(), theta0, z); }
};

class FitError : public NumericalError {
 public:
  FitError(const std::string& what, FitResult best) : NumericalError(what), best_(std::move(best)) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

struct FitOptions {
  std::vector<double> D_starts{0.0, 0.25, 0.5, 0.75};
  std::vector<double> theta_starts{0.0, pi / 4, pi / 2, 3 * pi / 4};
  double max_rms = std::numeric_limits<double>::infinity();  // larger best residual is a failure
  int max_evaluations = 4000;
};

namespace detail {

// D = tanh(u)^2 keeps 0 <= D < 1 without bounds.
inline double D_of(double u) {
  const double t = std::tanh(u);
  return std::min(t * t, 1.0 - 1e-15);
}

struct RotationFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  const std::vector<double>* z;
  const std::vector<double>* y;
  const std::vector<double>* w;
  int ell;
  RotationFunctor(const std::vector<double>& z_, const std::vector<double>& y_, const std::vector<double>& w_, int l)
      : z(&z_), y(&y_), w(&w_), ell(l) {}
  int inputs() const { return 4; }
  int values() const { return static_cast<int>(z->size()); }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const double D = D_of(x[0]);
    const double q = (1.0 + D) / (1.0 - D);
    const double u0 = unwrapped_arctan_q_tan(q, x[3]);
    for (std::size_t i = 0; i < z->size(); ++i) {
      const double m = x[2] - (unwrapped_arctan_q_tan(q, x[1] * (*z)[i] + x[3]) - u0) / ell;
      f[static_cast<Eigen::Index>(i)] = (m - (*y)[i]) * (*w)[i];
    }
    return 0;
  }
};

}  // namespace detail

// Multi-start Levenberg-Marquardt (numerical Jacobian) over D and theta0
// starting grids; dkz starts from the mean slope. Deterministic.
inline FitResult fit_rotation_curve(const RotationSeries& s, int ell, const FitOptions& opt = {}) {
  s.validate(ell);
  const std::size_t n = s.z_values.size();
  if (n < 5) throw ConfigError("fit_rotation_curve: need at least 5 points");
  if (ell < 1) throw DomainError("fit_rotation_curve: ell must be a positive integer");
  std::vector<double> w(n, 1.0);

  // Least-squares line for the dkz start; the mean rate of every law is -dkz/l.
  double mz = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mz += s.z_values[i];
    my += s.angles[i];
  }
  mz /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double szz = 0, szy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    szz += (s.z_values[i] - mz) * (s.z_values[i] - mz);
    szy += (s.z_values[i] - mz) * (s.angles[i] - my);
  }
  const double slope = szz > 0 ? szy / szz : 0.0;
  if (!(std::abs(slope) > 0.0)) throw NumericalError("fit_rotation_curve: series shows no rotation");
  const double dkz0 = -ell * slope;
  const double span = s.z_values.back() - s.z_values.front();
  if (span * std::abs(dkz0) < pi / 2 * 0.9)
    throw ConfigError("fit_rotation_curve: z range covers less than half a rotation period");

  detail::RotationFunctor fn(s.z_values, s.angles, w, ell);
  Eigen::NumericalDiff<detail::RotationFunctor> nd(fn);

  FitResult best;
  best.residual_rms = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x(4);
  bool any = false;
  for (double D0 : opt.D_starts)
    for (double th0 : opt.theta_starts) {
      Eigen::VectorXd x(4);
      x << std::atanh(std::sqrt(std::clamp(D0, 0.0, 0.99))), dkz0, s.angles[0], th0;
      // phi0 start so the model passes through the first point.
      {
        const double D = detail::D_of(x[0]);
        const double q = (1 + D) / (1 - D);
        x[2] = s.angles[0] + (unwrapped_arctan_q_tan(q, dkz0 * s.z_values[0] + th0) -
                              unwrapped_arctan_q_tan(q, th0)) / ell;
      }
      Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::RotationFunctor>> lm(nd);
      lm.parameters.maxfev = opt.max_evaluations;
      lm.parameters.xtol = 1e-15;
      lm.parameters.ftol = 1e-15;
      const auto status = lm.minimize(x);
      (void)status;
      Eigen::VectorXd f(n);
      fn(x, f);
      const double rms = std::sqrt(f.squaredNorm() / static_cast<double>(n));
      if (!std::isfinite(rms)) continue;
      // Ties go to the earlier start so results are independent of tiny noise.
      if (!any || rms < best.residual_rms * (1.0 - 1e-9)) {
        any = true;
        best.residual_rms = rms;
        best.iterations = static_cast<int>(lm.nfev);
        best_x = x;
      }
    }
  if (!any) throw FitError("fit_rotation_curve: no start produced a finite residual", best);

  best.ell = ell;
  best.D = detail::D_of(best_x[0]);
  best.dkz = best_x[1];
  best.phi0 = best_x[2];
  best.theta0 = detail::wrap_symmetric(best_x[3], pi);
  if (best.theta0 < 0) best.theta0 += pi;
  best.reference_frame = s.reference_frame;

  // Covariance in natural parameters from a central-difference Jacobian.
  {
    Eigen::MatrixXd J(n, 4);
    const std::array<double, 4> p{best.D, best.dkz, best.phi0, best.theta0};
    auto model = [&](const std::array<double, 4>& v, double z) {
      const double D = std::clamp(v[0], 0.0, 1.0 - 1e-12);
      const double q = (1 + D) / (1 - D);
      return v[2] - (unwrapped_arctan_q_tan(q, v[1] * z + v[3]) - unwrapped_arctan_q_tan(q, v[3])) / ell;
    };
    for (int c = 0; c < 4; ++c) {
      const double h = 1e-6 * std::max(1.0, std::abs(p[c]));
      auto pp = p, pm = p;
      pp[c] += h;
      pm[c] -= h;
      for (std::size_t i = 0; i < n; ++i)
        J(static_cast<Eigen::Index>(i), c) = (model(pp, s.z_values[i]) - model(pm, s.z_values[i])) / (2 * h);
    }
    const double dof = n > 4 ? static_cast<double>(n - 4) : 1.0;
    const double sigma2 = best.residual_rms * best.residual_rms * static_cast<double>(n) / dof;
    const Eigen::Matrix4d JtJ = J.transpose() * J;
    best.covariance = JtJ.completeOrthogonalDecomposition().pseudoInverse() * sigma2;
  }
  if (!(best.residual_rms <= opt.max_rms))
    throw FitError("fit_rotation_curve: best residual exceeds the accepted bound", best);
  return best;
}

struct KinematicCurves {
  std::vector<double> z, angle, velocity, acceleration;
};

// Evaluates the fitted law and its analytic derivatives on a z grid.
inline KinematicCurves derive_kinematics(const FitResult& fit, const std::vector<double>& z_grid) {
  const RotationLaw law = fit.law();
  law.validate();
  const double zs = fit.theta0 / fit.dkz;  // shifted law is the plain law at z + zs
  KinematicCurves c;
  c.z = z_grid;
  for (double z : z_grid) {
    c.angle.push_back(fit(z));
    c.velocity.push_back(angular_velocity(law, z + zs));
    c.acceleration.push_back(angular_acceleration(law, z + zs));
  }
  return c;
}

}  // namespace acwave
