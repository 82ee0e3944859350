// acwave command-line driver. Every subcommand writes its artifacts plus a
// manifest.json into --out; on any error the files written so far are removed.
//
// Exit status: 0 success, 2 invalid configuration or arguments, 3 numerical
// failure (non-convergence, ambiguous registration, quadrature), 1 otherwise.

#include <acwave/analysis.hpp>
#include <acwave/electrodynamics.hpp>
#include <acwave/holography.hpp>
#include <acwave/io.hpp>
#include <acwave/kinematics.hpp>
#include <acwave/propagation.hpp>
#include <acwave/wavefield.hpp>

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <variant>

using namespace acwave;
using io::json;

namespace {

// Options of one subcommand. Each config key is also a flag of the same name;
// values from --config FILE are applied after the flags and win.
class Params {
 public:
  using Slot = std::variant<int*, double*, std::size_t*, bool*, std::string*>;

  explicit Params(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON file of config keys (overrides flags)");
  }

  template <class T>
  Params& add(const std::string& key, T& var, const std::string& help) {
    slots_[key] = &var;
    order_.push_back(key);
    if constexpr (std::is_same_v<T, bool>)
      opts_[key] = app_->add_option("--" + key, var, help)->default_val(var ? "true" : "false");
    else
      opts_[key] = app_->add_option("--" + key, var, help)->capture_default_str();
    return *this;
  }

  // Loads --config; afterwards set(key) tells whether a key was given explicitly.
  void resolve() {
    for (const auto& [key, opt] : opts_)
      if (opt->count() > 0) explicit_.insert(key);
    if (config_path_.empty()) return;
    const json j = io::read_json(config_path_);
    if (!j.is_object()) throw ConfigError(config_path_ + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      const auto it = slots_.find(key);
      if (it == slots_.end()) throw ConfigError(config_path_ + ": unknown key '" + key + "'");
      try {
        std::visit([&](auto* p) { *p = value.get<std::remove_pointer_t<decltype(p)>>(); }, it->second);
      } catch (const json::exception& e) {
        throw ConfigError(config_path_ + ": bad value for '" + key + "': " + e.what());
      }
      explicit_.insert(key);
    }
  }

  bool set(const std::string& key) const { return explicit_.count(key) > 0; }

  json resolved() const {
    json j = json::object();
    for (const auto& key : order_) std::visit([&](auto* p) { j[key] = *p; }, slots_.at(key));
    return j;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, Slot> slots_;
  std::map<std::string, CLI::Option*> opts_;
  std::vector<std::string> order_;
  std::set<std::string> explicit_;
};

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

Image phase_image(const ComplexField& f) {
  Image im(f.nx, f.ny, f.pitch);
  for (std::size_t i = 0; i < f.values.size(); ++i) im.values[i] = (std::arg(f.values[i]) + pi) / (2.0 * pi);
  return im;
}

double default_k() { return energy_to_k(PhysicalBeam{300e3, Kinematics::relativistic}); }

// ---------------------------------------------------------------------------

struct WaveCmd {
  int ell = 1;
  double D = 0.0, k = 1.0, kr = 0.8, kr2 = 0.0, z = 0.0, pitch = 0.0;
  std::size_t n = 512;

  void bind(Params& p) {
    p.add("ell", ell, "topological charge")
        .add("D", D, "anisotropy parameter in [0, 1]")
        .add("k", k, "total wavenumber")
        .add("kr", kr, "radial wavenumber (+l component)")
        .add("kr2", kr2, "radial wavenumber of the -l component; 0 evaluates a single anisotropic mode")
        .add("z", z, "propagation distance")
        .add("n", n, "grid side in pixels")
        .add("pitch", pitch, "pixel pitch; 0 spans twelve Bessel zeros");
  }

  void run(io::OutputSet& out) const {
    GridSpec g = default_grid(ell, kr, n);
    if (pitch > 0.0) g.pitch = pitch;
    const ComplexField f = kr2 > 0.0 ? sample_state(AccelPair::from_kr(ell, D, k, kr, kr2), z, g)
                                     : sample_state(ModeParams::from_kr(ell, D, k, kr), z, g);
    const Image in = Image::intensity_of(f);
    const Image ph = phase_image(f);
    io::write_pgm16(out.file("intensity.pgm"), in);
    io::write_image_csv(out.file("intensity.csv"), in);
    io::write_pgm16(out.file("phase.pgm"), ph, 1.0);
    io::write_image_csv(out.file("phase.csv"), ph);
    io::write_field(out.file("field.bin"), out.file("field.json"), f);
  }
};

struct KinematicsCmd {
  int ell = 1;
  double D = 0.0, dkz = 1.0, phi0 = 0.0, z_min = 0.0, z_max = 0.0, tube_radius = 1.0;
  std::size_t samples = 401;
  std::string law = "phase";

  void bind(Params& p) {
    p.add("ell", ell, "topological charge")
        .add("D", D, "anisotropy parameter in [0, 1)")
        .add("dkz", dkz, "axial wavenumber difference")
        .add("phi0", phi0, "angle at z = 0")
        .add("z_min", z_min, "first z")
        .add("z_max", z_max, "last z; 0 spans two beat periods")
        .add("samples", samples, "number of z samples")
        .add("law", law, "phase (phase-front rotation) or petal (intensity lobes)")
        .add("tube_radius", tube_radius, "radius of the tracked point on the tube");
  }

  void run(io::OutputSet& out) const {
    if (law != "phase" && law != "petal") throw ConfigError("kinematics: law must be phase or petal");
    if (samples < 2) throw ConfigError("kinematics: samples must be >= 2");
    const RotationLaw rl{ell, D, dkz, phi0};
    rl.validate();
    const double zmax = z_max != 0.0 ? z_max : z_min + 2.0 * rl.period();
    FitResult f;
    f.ell = ell;
    f.D = D;
    f.dkz = dkz;
    f.phi0 = phi0;
    f.theta0 = law == "petal" ? pi / 2 : 0.0;
    const auto c = derive_kinematics(f, linspace(z_min, zmax, samples));
    std::vector<std::vector<double>> rows, tube;
    double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.z.size(); ++i) {
      rows.push_back({c.z[i], c.angle[i], c.velocity[i], c.acceleration[i]});
      tube.push_back({c.z[i], tube_radius * std::cos(c.angle[i]), tube_radius * std::sin(c.angle[i]), c.angle[i]});
      vmax = std::max(vmax, std::abs(c.velocity[i]));
      vmin = std::min(vmin, std::abs(c.velocity[i]));
    }
    io::write_csv(out.file("curves.csv"), {"z", "Phi", "dPhi", "d2Phi"}, rows);
    io::write_csv(out.file("tube.csv"), {"z", "x", "y", "Phi"}, tube);
    io::write_json(out.file("summary.json"),
                   json{{"period", rl.period()},
                        {"sampled_speed_ratio", vmin > 0.0 ? vmax / vmin : 0.0},
                        {"speed_ratio_theory", std::pow((1.0 + D) / (1.0 - D), 2)}});
  }
};

struct FieldsCmd {
  std::string beam = "bessel";
  int ell = 1, p = 0;
  double D = 0.0, k = default_k(), kr = 0.0, w0 = 1e-9, z = 0.0, r = -1.0, r_max = 0.0;
  double current = 1e-9, energy = 300e3, eta = 0.0;
  std::size_t samples = 201;

  void bind(Params& pr) {
    pr.add("beam", beam, "bessel or lg")
        .add("ell", ell, "topological charge")
        .add("D", D, "anisotropy parameter (bessel)")
        .add("k", k, "wavenumber [1/m]; default 300 keV")
        .add("kr", kr, "radial wavenumber [1/m]; 0 maps a 4 um ring through a 1 m lens")
        .add("p", p, "radial index (lg)")
        .add("w0", w0, "waist [m] (lg)")
        .add("z", z, "plane [m] (lg)")
        .add("r", r, "single radius [m]; negative writes a profile")
        .add("r_max", r_max, "profile extent [m]; 0 spans ten Bessel zeros or 4 waists")
        .add("samples", samples, "profile samples")
        .add("current", current, "beam current [A], used when eta = 0")
        .add("energy", energy, "kinetic energy [eV], used when eta = 0")
        .add("eta", eta, "line density [electrons/m]; 0 derives it from current and energy");
  }

  void run(io::OutputSet& out) const {
    if (beam != "bessel" && beam != "lg") throw ConfigError("fields: beam must be bessel or lg");
    if (samples < 2) throw ConfigError("fields: samples must be >= 2");
    const LineDensity n = eta > 0.0 ? LineDensity{eta} : LineDensity::from_current(current, energy);
    n.validate();
    const double krv = kr > 0.0 ? kr : ring_to_kr(4e-6, 2.0 * pi / k, 1.0).kr;
    const ModeParams m = ModeParams::from_kr(ell, D, k, krv);
    const LGParams g{ell, p, w0, k};
    auto sample = [&](double rr) { return beam == "bessel" ? bessel_em(m, n, rr) : lg_em(g, n, rr, z); };
    const double extent = r_max > 0.0 ? r_max
                          : beam == "bessel" ? specfun::bessel_j_zero(std::abs(ell), 10) / krv
                                             : 4.0 * g.w(z);
    const auto radii = r >= 0.0 ? std::vector<double>{r} : linspace(0.0, extent, samples);
    std::vector<std::vector<double>> rows;
    for (double rr : radii) {
      const EMSample s = sample(rr);
      rows.push_back({s.r, s.E_r, s.B_phi, s.B_z, s.S_r, s.S_phi, s.S_z});
    }
    io::write_csv(out.file("profile.csv"), {"r", "E_r", "B_phi", "B_z", "S_r", "S_phi", "S_z"}, rows);
    const EMSample axis = sample(0.0);
    json header{{"beam", beam}, {"eta", n.eta}, {"ell", ell}, {"k", k},
                {"units", {{"r", "m"}, {"E_r", "V/m"}, {"B_phi", "T"}, {"B_z", "T"}, {"S", "W/m^2"}}},
                {"B_z_axis", axis.B_z}, {"eta_mu0_muB", n.eta * PhysConstants::mu0 * PhysConstants::mu_B}};
    if (beam == "bessel") {
      header["D"] = D;
      header["k_r"] = m.kr;
      header["k_z"] = m.kz;
    } else {
      header["p"] = p;
      header["w0"] = w0;
      header["z"] = z;
    }
    io::write_json(out.file("header.json"), header);
    const auto rep = beam == "bessel" ? radiated_power_check(m, n, extent) : radiated_power_check(g, n, z, extent);
    io::write_json(out.file("poynting.json"), json{{"r_far", rep.r_far},
                                                   {"samples", rep.samples},
                                                   {"max_abs_S_r", rep.max_abs_S_r},
                                                   {"radial_flux", rep.radial_flux},
                                                   {"axial_scale", rep.axial_scale},
                                                   {"relative_flux", rep.relative_flux()}});
    std::cout << "B_z(0) = " << io::format_double(axis.B_z) << " T\n";
  }
};

struct TrajectoriesCmd {
  int ell = 1;
  double D = 0.0, k = 1.0, kr1 = 0.5, kr2 = 0.45, z_end = 0.0, seed_radius = 0.0, step = 0.0;
  std::size_t seeds = 8, stride = 10;

  void bind(Params& p) {
    p.add("ell", ell, "topological charge")
        .add("D", D, "anisotropy parameter")
        .add("k", k, "total wavenumber")
        .add("kr1", kr1, "radial wavenumber of the +l component")
        .add("kr2", kr2, "radial wavenumber of the -l component")
        .add("z_end", z_end, "trace length; 0 uses two beat periods (or 200/k for equal kr)")
        .add("seeds", seeds, "number of seed points on a circle")
        .add("seed_radius", seed_radius, "seed circle radius; 0 uses 1/kr_mean")
        .add("step", step, "integration step; 0 automatic")
        .add("stride", stride, "write every stride-th sample");
  }

  void run(io::OutputSet& out) const {
    if (seeds < 1 || stride < 1) throw ConfigError("trajectories: seeds and stride must be >= 1");
    const AccelPair pr = AccelPair::from_kr(ell, D, k, kr1, kr2);
    FluxControl ctrl;
    ctrl.z_end = z_end > 0.0 ? z_end : (pr.dkz() != 0.0 ? 2.0 * 2.0 * pi / std::abs(pr.dkz()) : 200.0 / k);
    ctrl.step = step;
    const double rs = seed_radius > 0.0 ? seed_radius : 2.0 / (kr1 + kr2);
    std::vector<std::pair<double, double>> seed_list;
    for (std::size_t i = 0; i < seeds; ++i)
      seed_list.emplace_back(rs, 2.0 * pi * (static_cast<double>(i) + 0.5) / static_cast<double>(seeds));
    const auto lines = trace_flux_lines(pr, seed_list, ctrl);
    json summary = json::array();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto& t = lines[i];
      std::vector<std::vector<double>> rows;
      for (std::size_t s = 0; s < t.samples.size(); s += stride)
        rows.push_back({t.samples[s].z, t.samples[s].r, t.samples[s].phi, t.x(s), t.y(s)});
      if (!t.samples.empty() && (t.samples.size() - 1) % stride != 0) {
        const std::size_t s = t.samples.size() - 1;
        rows.push_back({t.samples[s].z, t.samples[s].r, t.samples[s].phi, t.x(s), t.y(s)});
      }
      char name[48];
      std::snprintf(name, sizeof name, "trajectory_%03zu.csv", i);
      io::write_csv(out.file(name), {"z", "r", "phi", "x", "y"}, rows);
      summary.push_back(json{{"file", name}, {"r0", t.r0}, {"phi0", t.phi0}, {"chord_length", t.chord_length},
                             {"straightness", t.straightness},
                             {"relative_straightness", t.chord_length > 0.0 ? t.straightness / t.chord_length : 0.0},
                             {"truncated", t.truncated}, {"reason", t.reason}});
    }
    io::write_json(out.file("trajectories.json"), summary);
  }
};

// Hologram geometry keys shared by hologram and series.
struct SpecKeys {
  std::string preset = "fabricated";
  HologramSpec s;
  std::string mode = "grayscale";

  void bind(Params& p) {
    p.add("preset", preset, "fabricated (75 nm carrier, 1024^2) or desk (50 nm carrier, 2048^2)")
        .add("ring1_diameter", s.ring1_diameter, "outer ring diameter [m] (carries +l)")
        .add("ring2_diameter", s.ring2_diameter, "inner ring diameter [m] (carries -l)")
        .add("ring_thickness", s.ring_thickness, "ring width [m]")
        .add("carrier_period", s.carrier_period, "grating period [m]")
        .add("ell", s.ell, "topological charge")
        .add("D", s.D, "anisotropy parameter")
        .add("mode", mode, "grayscale or binary")
        .add("nx", s.nx, "canvas width [px]")
        .add("ny", s.ny, "canvas height [px]")
        .add("pitch", s.pitch, "canvas pitch [m]")
        .add("ring1", s.ring1, "enable ring 1")
        .add("ring2", s.ring2, "enable ring 2")
        .add("balance_rings", s.balance_rings, "equalize ring weights by radius");
  }

  HologramSpec resolve(const Params& p) const {
    HologramSpec out;
    if (preset == "desk") out = HologramSpec::desk();
    else if (preset != "fabricated") throw ConfigError("preset must be fabricated or desk");
    auto take = [&](const char* key, auto member) {
      if (p.set(key)) out.*member = s.*member;
    };
    take("ring1_diameter", &HologramSpec::ring1_diameter);
    take("ring2_diameter", &HologramSpec::ring2_diameter);
    take("ring_thickness", &HologramSpec::ring_thickness);
    take("carrier_period", &HologramSpec::carrier_period);
    take("ell", &HologramSpec::ell);
    take("D", &HologramSpec::D);
    take("nx", &HologramSpec::nx);
    take("ny", &HologramSpec::ny);
    take("pitch", &HologramSpec::pitch);
    take("ring1", &HologramSpec::ring1);
    take("ring2", &HologramSpec::ring2);
    take("balance_rings", &HologramSpec::balance_rings);
    out.mode = hologram_mode_from_string(mode);
    out.validate();
    return out;
  }
};

struct HologramCmd {
  SpecKeys keys;
  bool csv = true;

  void bind(Params& p) {
    keys.bind(p);
    p.add("csv", csv, "also write the mask as CSV");
  }

  void run(io::OutputSet& out, const Params& p) const {
    const HologramSpec s = keys.resolve(p);
    const Image t = design_hologram(s);
    io::write_pgm16(out.file("mask.pgm"), t, 1.0);
    if (csv) io::write_image_csv(out.file("mask.csv"), t);
    json j = io::to_json(s);
    j["spec_hash"] = spec_hash(s);
    if (s.ring1) j["winding_ring1"] = measure_winding(t, s, 1);
    if (s.ring2) j["winding_ring2"] = measure_winding(t, s, 2);
    io::write_json(out.file("spec.json"), j);
  }
};

struct SeriesCmd {
  SpecKeys keys;
  SeriesOptions opt;
  std::string method = "pupil";
  double z_min = 0.0, z_max = 0.0;
  std::size_t frames = 41;
  bool previews = false;

  void bind(Params& p) {
    keys.bind(p);
    p.add("wavelength", opt.optics.wavelength, "electron wavelength [m]; default 300 keV")
        .add("focal_length", opt.optics.focal_length, "Fourier lens focal length [m]")
        .add("method", method, "pupil or angular_spectrum")
        .add("frame_n", opt.frame_n, "frame side [px] (pupil route)")
        .add("frame_pitch", opt.frame_pitch, "frame pitch [m]; 0 automatic")
        .add("window_radius", opt.window_radius, "first-order window [m] (angular_spectrum route); 0 automatic")
        .add("max_cut", opt.max_cut, "largest power fraction the band limit may remove")
        .add("z_min", z_min, "first defocus [m]")
        .add("z_max", z_max, "last defocus [m]; z_min = z_max = 0 spans +/-0.55 beat periods")
        .add("frames", frames, "number of frames")
        .add("previews", previews, "write a 16-bit PGM per frame");
  }

  void run(io::OutputSet& out, const Params& p) const {
    const HologramSpec s = keys.resolve(p);
    SeriesOptions o = opt;
    if (method == "pupil") o.method = SeriesMethod::pupil;
    else if (method == "angular_spectrum") o.method = SeriesMethod::angular_spectrum;
    else throw ConfigError("series: method must be pupil or angular_spectrum");
    if (frames < 2) throw ConfigError("series: frames must be >= 2");
    double a = z_min, b = z_max;
    if (a == 0.0 && b == 0.0) {
      const double k = o.optics.k();
      const double kr1 = ring_to_kr(s.ring1_diameter / 2, o.optics.wavelength, o.optics.focal_length).kr;
      const double kr2 = ring_to_kr(s.ring2_diameter / 2, o.optics.wavelength, o.optics.focal_length).kr;
      const double T = RotationLaw::from_pair(AccelPair::from_kr(s.ell, s.D, k, kr1, kr2)).period();
      a = -0.55 * T;
      b = 0.55 * T;
    }
    const FocalStack st = make_focal_series(s, o, linspace(a, b, frames));
    io::save_stack(out, st, s, o.optics);
    if (previews)
      for (std::size_t i = 0; i < st.frames.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof name, "frame_%04zu.pgm", i);
        io::write_pgm16(out.file(name), Image::intensity_of(st.frames[i]));
      }
  }
};

struct FitCmd {
  std::string stack;
  int ell = 0;
  std::string registration = "chained";
  double r_max_px = 0.0, angle_noise_deg = 0.0;
  std::size_t seed = 0, curve_samples = 401;

  void bind(Params& p) {
    p.add("stack", stack, "focal stack directory or its stack.json")
        .add("ell", ell, "petal charge; 0 takes it from the stack's hologram spec")
        .add("registration", registration, "chained or direct")
        .add("r_max_px", r_max_px, "outer registration radius [px]; 0 limits it to the beam core")
        .add("angle_noise_deg", angle_noise_deg, "Gaussian noise added to measured angles [deg]")
        .add("seed", seed, "seed of the angle-noise generator")
        .add("curve_samples", curve_samples, "samples of the fitted curves");
  }

  void run(io::OutputSet& out) const {
    if (stack.empty()) throw ConfigError("fit: --stack is required");
    if (registration != "chained" && registration != "direct")
      throw ConfigError("fit: registration must be chained or direct");
    if (curve_samples < 2) throw ConfigError("fit: curve_samples must be >= 2");
    if (!(angle_noise_deg >= 0.0)) throw ConfigError("fit: angle_noise_deg must be >= 0");
    const io::StoredStack st = io::load_stack(stack);
    const int l = ell > 0 ? ell : st.spec.ell;
    RegistrationOptions ro = core_registration(st.spec, st.optics, st.stack.frames[0].pitch);
    if (r_max_px > 0.0) ro.r_max_px = r_max_px;
    auto series = measure_series(st.stack, l, ro,
                                 registration == "direct" ? SeriesRegistration::direct : SeriesRegistration::chained);
    if (angle_noise_deg > 0.0) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> noise(0.0, angle_noise_deg * pi / 180.0);
      for (auto& a : series.angles) a += noise(rng);
    }
    FitResult fit;
    bool converged = true;
    std::string message;
    try {
      fit = fit_rotation_curve(series, l);
    } catch (const FitError& e) {
      fit = e.best();
      converged = false;
      message = e.what();
    }
    std::vector<std::vector<double>> rows;
    std::vector<double> residuals;
    for (std::size_t i = 0; i < series.z_values.size(); ++i) {
      const double model = fit(series.z_values[i]);
      residuals.push_back(series.angles[i] - model);
      rows.push_back({series.z_values[i], series.angles[i], series.uncertainty[i], model, residuals.back()});
    }
    io::write_csv(out.file("angles.csv"), {"z", "Phi_measured", "uncertainty", "Phi_fit", "residual"}, rows);
    const auto c = derive_kinematics(fit, linspace(series.z_values.front(), series.z_values.back(), curve_samples));
    std::vector<std::vector<double>> curves;
    for (std::size_t i = 0; i < c.z.size(); ++i) curves.push_back({c.z[i], c.angle[i], c.velocity[i], c.acceleration[i]});
    io::write_csv(out.file("curves.csv"), {"z", "Phi", "dPhi", "d2Phi"}, curves);
    json rep = io::to_json(fit);
    rep["converged"] = converged;
    if (!message.empty()) rep["message"] = message;
    rep["residuals"] = residuals;
    rep["reference_z"] = series.z_values[series.reference_frame];
    rep["registration"] = registration;
    rep["registration_r_max_px"] = ro.r_max_px;
    rep["D_encoded"] = st.spec.D;
    rep["spec_hash"] = st.stack.spec_hash;
    io::write_json(out.file("fit.json"), rep);
    std::cout << "D_fit = " << io::format_double(fit.D) << " (encoded " << io::format_double(st.spec.D) << ")\n";
    if (!converged) throw FitError(message, fit);
  }
};

struct VolumeCmd {
  std::string stack;
  std::size_t nz = 64;

  void bind(Params& p) {
    p.add("stack", stack, "focal stack directory or its stack.json").add("nz", nz, "number of planes");
  }

  void run(io::OutputSet& out) const {
    if (stack.empty()) throw ConfigError("volume: --stack is required");
    const io::StoredStack st = io::load_stack(stack);
    io::write_volume(out.file("volume.f32"), out.file("volume.json"), stack_to_volume(st.stack, nz));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Angularly accelerating electron vortex beams: simulation and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  std::string out_dir = "out";

  struct Entry {
    CLI::App* cmd;
    std::unique_ptr<Params> params;
    std::function<void(io::OutputSet&, const Params&)> run;
  };
  std::vector<Entry> entries;
  WaveCmd wave;
  KinematicsCmd kin;
  FieldsCmd fields;
  TrajectoriesCmd traj;
  HologramCmd holo;
  SeriesCmd series;
  FitCmd fit;
  VolumeCmd volume;

  auto add = [&](const char* name, const char* help, auto& cmd, auto runner) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    auto params = std::make_unique<Params>(sub);
    cmd.bind(*params);
    entries.push_back({sub, std::move(params), runner});
  };
  add("wave", "sample a Bessel mode or accelerating pair on a grid", wave,
      [&](io::OutputSet& o, const Params&) { wave.run(o); });
  add("kinematics", "rotation angle, velocity and acceleration curves", kin,
      [&](io::OutputSet& o, const Params&) { kin.run(o); });
  add("fields", "electromagnetic field and Poynting profiles", fields,
      [&](io::OutputSet& o, const Params&) { fields.run(o); });
  add("trajectories", "probability-current flux lines", traj,
      [&](io::OutputSet& o, const Params&) { traj.run(o); });
  add("hologram", "double-ring off-axis hologram mask", holo,
      [&](io::OutputSet& o, const Params& p) { holo.run(o, p); });
  add("series", "synthetic focal series of the first diffraction order", series,
      [&](io::OutputSet& o, const Params& p) { series.run(o, p); });
  add("fit", "register a focal series and fit the rotation law", fit,
      [&](io::OutputSet& o, const Params&) { fit.run(o); });
  add("volume", "interpolate a focal series into an intensity volume", volume,
      [&](io::OutputSet& o, const Params&) { volume.run(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto& e : entries) {
      if (!e.cmd->parsed()) continue;
      e.params->resolve();
      json config = e.params->resolved();
      io::OutputSet out(out_dir);
      e.run(out, *e.params);
      io::write_manifest(out, e.cmd->get_name(), config);
      out.commit();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
