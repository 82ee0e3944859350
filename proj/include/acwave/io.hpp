#pragma once

// On-disk formats: CSV curves, 16-bit PGM images, raw float32 fields and
// volumes with JSON sidecars, focal-stack directories and run manifests.
// Numbers are written in shortest round-trip form so identical inputs give
// byte-identical files.

#include <acwave/analysis.hpp>
#include <acwave/constants.hpp>
#include <acwave/errors.hpp>
#include <acwave/field.hpp>
#include <acwave/holography.hpp>
#include <acwave/propagation.hpp>

#include <Eigen/Core>
#include <fftw3.h>
#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace acwave::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Tracks the files a run creates. Unless commit() is called, the destructor
// deletes them again, and the output directory too if the run created it.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    if (!fs::exists(dir_)) {
      if (!fs::create_directories(dir_, ec)) throw ConfigError("cannot create output directory " + dir_.string());
      created_dir_ = true;
    } else if (!fs::is_directory(dir_)) {
      throw ConfigError("output path is not a directory: " + dir_.string());
    }
    const fs::path probe = dir_ / ".acwave-write-probe";
    std::ofstream(probe).put('x');
    if (!fs::exists(probe)) throw ConfigError("output directory is not writable: " + dir_.string());
    fs::remove(probe, ec);
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = files_.rbegin(); it != files_.rend(); ++it) fs::remove_all(*it, ec);
    if (created_dir_) fs::remove_all(dir_, ec);
  }

  fs::path file(const std::string& name) {
    const fs::path p = dir_ / name;
    if (p.has_parent_path() && !fs::exists(p.parent_path())) {
      fs::create_directories(p.parent_path());
      files_.push_back(p.parent_path());
    }
    files_.push_back(p);
    names_.push_back(name);
    return p;
  }
  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& names() const { return names_; }
  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  std::vector<std::string> names_;
  bool created_dir_ = false;
  bool committed_ = false;
};

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + p.string() + " for writing");
  os << text;
  if (!os) throw ConfigError("write failed: " + p.string());
}

inline std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline json read_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

inline void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

// Rows of equal length under a header line.
inline void write_csv(const fs::path& p, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ConfigError("write_csv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  write_text(p, out);
}

// Image as a CSV matrix, one line per row of pixels.
inline void write_image_csv(const fs::path& p, const Image& im) {
  std::string out;
  for (std::size_t iy = 0; iy < im.ny; ++iy) {
    for (std::size_t ix = 0; ix < im.nx; ++ix) {
      if (ix) out += ',';
      out += format_double(im.at(ix, iy));
    }
    out += '\n';
  }
  write_text(p, out);
}

// Binary 16-bit PGM (big-endian samples). Values are scaled so that `top`
// maps to 65535; top <= 0 uses the image maximum. Negative values clip to 0.
inline void write_pgm16(const fs::path& p, const Image& im, double top = 0.0) {
  if (top <= 0.0)
    for (double v : im.values) top = std::max(top, v);
  std::string out = "P5\n" + std::to_string(im.nx) + " " + std::to_string(im.ny) + "\n65535\n";
  out.reserve(out.size() + 2 * im.values.size());
  for (double v : im.values) {
    const double s = top > 0.0 ? std::clamp(v / top, 0.0, 1.0) : 0.0;
    const auto q = static_cast<std::uint16_t>(std::lround(s * 65535.0));
    out += static_cast<char>(q >> 8);
    out += static_cast<char>(q & 0xff);
  }
  write_text(p, out);
}

inline Image read_pgm16(const fs::path& p) {
  const std::string s = read_text(p);
  std::istringstream is(s);
  std::string magic;
  std::size_t nx = 0, ny = 0, maxv = 0;
  is >> magic >> nx >> ny >> maxv;
  if (magic != "P5" || maxv != 65535 || nx == 0 || ny == 0) throw ConfigError("not a 16-bit PGM: " + p.string());
  is.get();
  const std::size_t off = static_cast<std::size_t>(is.tellg());
  if (s.size() < off + 2 * nx * ny) throw ConfigError("truncated PGM: " + p.string());
  Image im(nx, ny);
  for (std::size_t i = 0; i < nx * ny; ++i) {
    const auto hi = static_cast<unsigned char>(s[off + 2 * i]), lo = static_cast<unsigned char>(s[off + 2 * i + 1]);
    im.values[i] = static_cast<double>((hi << 8) | lo) / 65535.0;
  }
  return im;
}

namespace detail {

inline void append_f32le(std::string& out, float f) {
  auto u = std::bit_cast<std::uint32_t>(f);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
  char b[4];
  std::memcpy(b, &u, 4);
  out.append(b, 4);
}

inline float read_f32le(const char* p) {
  std::uint32_t u;
  std::memcpy(&u, p, 4);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
  return std::bit_cast<float>(u);
}

template <class T>
T get_key(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

}  // namespace detail

// Field as interleaved little-endian float32 (re, im) in <base>.bin with a
// JSON sidecar <base>.json.
inline void write_field(const fs::path& bin, const fs::path& sidecar, const ComplexField& f) {
  std::string out;
  out.reserve(8 * f.values.size());
  for (const auto& v : f.values) {
    detail::append_f32le(out, static_cast<float>(v.real()));
    detail::append_f32le(out, static_cast<float>(v.imag()));
  }
  write_text(bin, out);
  write_json(sidecar, json{{"nx", f.nx}, {"ny", f.ny}, {"pitch_m", f.pitch}, {"z_m", f.z}, {"dtype", "complex64-le"},
                           {"data", bin.filename().string()}});
}

inline ComplexField read_field(const fs::path& sidecar) {
  const json j = read_json(sidecar);
  const std::string where = sidecar.string();
  ComplexField f(detail::get_key<std::size_t>(j, "nx", where), detail::get_key<std::size_t>(j, "ny", where),
                 detail::get_key<double>(j, "pitch_m", where), detail::get_key<double>(j, "z_m", where));
  const std::string raw = read_text(sidecar.parent_path() / detail::get_key<std::string>(j, "data", where));
  if (raw.size() != 8 * f.values.size()) throw ConfigError(where + ": data size does not match the grid");
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = {detail::read_f32le(raw.data() + 8 * i), detail::read_f32le(raw.data() + 8 * i + 4)};
  return f;
}

inline void write_volume(const fs::path& raw, const fs::path& header, const Volume& v) {
  std::string out;
  out.reserve(4 * v.values.size());
  for (float f : v.values) detail::append_f32le(out, f);
  write_text(raw, out);
  write_json(header, json{{"nx", v.nx}, {"ny", v.ny}, {"nz", v.nz}, {"pitch_m", v.pitch}, {"z0_m", v.z0},
                          {"dz_m", v.dz}, {"dtype", "float32-le"}, {"order", "x fastest, then y, then z"},
                          {"quantity", "intensity"}, {"data", raw.filename().string()}});
}

inline Volume read_volume(const fs::path& header) {
  const json j = read_json(header);
  const std::string where = header.string();
  Volume v;
  v.nx = detail::get_key<std::size_t>(j, "nx", where);
  v.ny = detail::get_key<std::size_t>(j, "ny", where);
  v.nz = detail::get_key<std::size_t>(j, "nz", where);
  v.pitch = detail::get_key<double>(j, "pitch_m", where);
  v.z0 = detail::get_key<double>(j, "z0_m", where);
  v.dz = detail::get_key<double>(j, "dz_m", where);
  const std::string raw = read_text(header.parent_path() / detail::get_key<std::string>(j, "data", where));
  if (raw.size() != 4 * v.nx * v.ny * v.nz) throw ConfigError(where + ": data size does not match the header");
  v.values.resize(v.nx * v.ny * v.nz);
  for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] = detail::read_f32le(raw.data() + 4 * i);
  return v;
}

// ---------------------------------------------------------------------------
// JSON forms of the configuration types. Readers reject unknown keys.

inline json to_json(const HologramSpec& s) {
  return json{{"ring1_diameter", s.ring1_diameter}, {"ring2_diameter", s.ring2_diameter},
              {"ring_thickness", s.ring_thickness}, {"carrier_period", s.carrier_period},
              {"ell", s.ell},
              {"D", s.D},
              {"mode", to_string(s.mode)},
              {"nx", s.nx},
              {"ny", s.ny},
              {"pitch", s.pitch},
              {"ring1", s.ring1},
              {"ring2", s.ring2},
              {"balance_rings", s.balance_rings}};
}

inline void apply_json(const json& j, HologramSpec& s, const std::string& where = "hologram spec") {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    const char* k = key.c_str();
    if (key == "ring1_diameter") s.ring1_diameter = detail::get_key<double>(j, k, where);
    else if (key == "ring2_diameter") s.ring2_diameter = detail::get_key<double>(j, k, where);
    else if (key == "ring_thickness") s.ring_thickness = detail::get_key<double>(j, k, where);
    else if (key == "carrier_period") s.carrier_period = detail::get_key<double>(j, k, where);
    else if (key == "ell") s.ell = detail::get_key<int>(j, k, where);
    else if (key == "D") s.D = detail::get_key<double>(j, k, where);
    else if (key == "mode") s.mode = hologram_mode_from_string(detail::get_key<std::string>(j, k, where));
    else if (key == "nx") s.nx = detail::get_key<std::size_t>(j, k, where);
    else if (key == "ny") s.ny = detail::get_key<std::size_t>(j, k, where);
    else if (key == "pitch") s.pitch = detail::get_key<double>(j, k, where);
    else if (key == "ring1") s.ring1 = detail::get_key<bool>(j, k, where);
    else if (key == "ring2") s.ring2 = detail::get_key<bool>(j, k, where);
    else if (key == "balance_rings") s.balance_rings = detail::get_key<bool>(j, k, where);
    else throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

inline json to_json(const Optics& o) { return json{{"wavelength", o.wavelength}, {"focal_length", o.focal_length}}; }

inline Optics optics_from_json(const json& j, const std::string& where = "optics") {
  Optics o;
  o.wavelength = detail::get_key<double>(j, "wavelength", where);
  o.focal_length = detail::get_key<double>(j, "focal_length", where);
  o.validate();
  return o;
}

inline json to_json(const FitResult& f) {
  json cov = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back(f.covariance(i, k));
    cov.push_back(row);
  }
  return json{{"ell", f.ell},
              {"D", f.D},
              {"dkz", f.dkz},
              {"phi0", f.phi0},
              {"theta0", f.theta0},
              {"covariance", cov},
              {"covariance_order", {"D", "dkz", "phi0", "theta0"}},
              {"residual_rms", f.residual_rms},
              {"iterations", f.iterations},
              {"reference_frame", f.reference_frame}};
}

// ---------------------------------------------------------------------------

inline std::string config_hash(const json& config) { return fnv1a_hex(config.dump()); }

inline json module_versions() {
  json v{{"acwave", kVersion}};
  for (const char* m : {"specfun", "wavefield", "kinematics", "electrodynamics", "holography", "propagation",
                        "analysis", "io"})
    v["modules"][m] = kVersion;
  v["fftw"] = std::string(fftw_version);
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                       "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

// manifest.json: command, resolved configuration, its hash, versions and the
// artifacts written before it.
inline void write_manifest(OutputSet& out, const std::string& command, const json& config) {
  json artifacts = out.names();
  const fs::path p = out.file("manifest.json");
  write_json(p, json{{"command", command},
                     {"config", config},
                     {"config_hash", config_hash(config)},
                     {"versions", module_versions()},
                     {"artifacts", artifacts}});
}

// ---------------------------------------------------------------------------
// Focal stack directory: frame_NNNN.bin/.json plus stack.json listing z
// values, optics, the hologram spec and its hash.

struct StoredStack {
  FocalStack stack;
  HologramSpec spec;
  Optics optics;
};

inline void save_stack(OutputSet& out, const FocalStack& st, const HologramSpec& spec, const Optics& optics) {
  st.validate();
  json frames = json::array();
  for (std::size_t i = 0; i < st.frames.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "frame_%04zu", i);
    const std::string base = name;
    write_field(out.file(base + ".bin"), out.file(base + ".json"), st.frames[i]);
    frames.push_back(base + ".json");
  }
  write_json(out.file("stack.json"), json{{"z_values", st.z_values},
                                          {"optics", to_json(optics)},
                                          {"spec", to_json(spec)},
                                          {"spec_hash", st.spec_hash},
                                          {"frames", frames}});
}

inline StoredStack load_stack(const fs::path& dir) {
  const fs::path mpath = fs::is_directory(dir) ? dir / "stack.json" : dir;
  const json j = read_json(mpath);
  const std::string where = mpath.string();
  StoredStack s;
  if (!j.contains("spec")) throw ConfigError(where + ": missing key 'spec'");
  apply_json(j.at("spec"), s.spec, where + " spec");
  if (!j.contains("optics")) throw ConfigError(where + ": missing key 'optics'");
  s.optics = optics_from_json(j.at("optics"), where + " optics");
  s.stack.z_values = detail::get_key<std::vector<double>>(j, "z_values", where);
  s.stack.spec_hash = detail::get_key<std::string>(j, "spec_hash", where);
  if (s.stack.spec_hash != spec_hash(s.spec)) throw ConfigError(where + ": spec hash does not match the stored spec");
  for (const auto& name : detail::get_key<std::vector<std::string>>(j, "frames", where))
    s.stack.frames.push_back(read_field(mpath.parent_path() / name));
  s.stack.validate();
  return s;
}

}  // namespace acwave::io
