#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nestif/constants.hpp"
#include "nestif/errors.hpp"

// Device registry and derived optomechanical parameters.
//
// Built-in devices: two fabricated trampoline resonators and the two proposed
// ones. Everything is stored in SI; the file format below carries the
// bench-friendly units in its key names (mass_ng, f_m_khz, L_cm, ...) and is
// converted on load, never afterwards.

namespace nestif::devices {

struct Material {
  std::string name;
  double A;            // atomic mass number
  double atomic_mass;  // kg
  double theta_D;      // Debye temperature [K]
  double r0 = 1.25e-15;  // nuclear radius constant [m]
};

inline const Material& tantalum() {
  static const Material ta{"tantalum", 181.0, 181.0 * constants().amu, 240.0,
                           1.25e-15};
  return ta;
}

inline const Material& material_by_name(const std::string& name) {
  if (name == "tantalum" || name == "Ta" || name == "ta") return tantalum();
  throw ValidationError("unknown material '" + name + "'", "material");
}

struct DeviceParams {
  std::string name;
  double m = 0.0;    // effective mass [kg]
  double f_m = 0.0;  // mechanical frequency [Hz]
  double L = 0.0;    // cavity length [m]
  double F = 0.0;    // finesse
  double Q_m = 0.0;  // mechanical quality factor
  std::optional<double> R;  // mirror radius [m], needed for CSL/QG only
  std::optional<double> b;  // mirror thickness [m], needed for CSL/QG only
  double wavelength = 1.064e-6;  // optical wavelength [m]
  std::string material = "tantalum";

  bool has_geometry() const { return R.has_value() && b.has_value(); }
};

struct DerivedParams {
  double omega_m;          // 2 pi f_m [rad/s]
  double x0;               // zero-point motion sqrt(hbar/(2 m omega_m)) [m]
  double g;                // optomechanical coupling omega_o x0 / L [rad/s]
  double kappa;            // g / omega_m
  double cavity_linewidth; // Gamma_c = pi c / (L F) [rad/s]
  double sideband_ratio;   // omega_m / Gamma_c
  double T_EID;            // hbar omega_m Q_m / k_B [K]
};

/// Table of built-in devices. Mirror geometry is only known for the two
/// proposed devices; CSL/QG requests on the trampolines need user-supplied
/// geometry.
inline const std::vector<DeviceParams>& builtin_devices() {
  static const std::vector<DeviceParams> devs = [] {
    std::vector<DeviceParams> d;
    d.push_back({"tramp1", 60e-12, 158e3, 0.05, 38000, 43000, std::nullopt,
                 std::nullopt});
    d.push_back({"tramp2", 110e-12, 9.71e3, 0.05, 29000, 940000, std::nullopt,
                 std::nullopt});
    d.push_back({"proposed1", 1e-12, 300e3, 0.005, 300000, 20000, 4e-6, 5e-6});
    d.push_back({"proposed2", 100e-12, 4.5e3, 0.05, 2e6, 2e6, 40e-6, 5e-6});
    return d;
  }();
  return devs;
}

inline const DeviceParams* find_builtin(const std::string& name) {
  for (const auto& d : builtin_devices())
    if (d.name == name) return &d;
  return nullptr;
}

/// All derived columns. The cavity linewidth convention Gamma_c = pi c/(L F)
/// is the one that reproduces the published sideband-resolution values.
inline DerivedParams derive(const DeviceParams& d) {
  const auto& k = constants();
  DerivedParams out{};
  out.omega_m = 2.0 * M_PI * d.f_m;
  out.x0 = std::sqrt(k.hbar / (2.0 * d.m * out.omega_m));
  const double omega_o = 2.0 * M_PI * k.c / d.wavelength;
  out.g = omega_o * out.x0 / d.L;
  out.kappa = out.g / out.omega_m;
  out.cavity_linewidth = M_PI * k.c / (d.L * d.F);
  out.sideband_ratio = out.omega_m / out.cavity_linewidth;
  out.T_EID = k.hbar * out.omega_m * d.Q_m / k.k_B;
  return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline double parse_positive(const std::string& value, const std::string& key) {
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(value, &pos);
    if (pos != value.size())
      throw ValidationError("trailing characters in value for '" + key + "'",
                            key);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse number '" + value + "' for '" + key +
                              "'",
                          key);
  }
  if (!(v > 0.0))
    throw ValidationError("'" + key + "' must be positive, got " + value, key);
  return v;
}

}  // namespace detail

/// Parse a device description in the flat key=value format.
/// Required: mass_ng, f_m_khz, L_cm, finesse, Q_m.
/// Optional: name, radius_um, thickness_um, wavelength_nm, material.
inline DeviceParams parse_device(std::istream& in,
                                 const std::string& default_name = "device") {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(lineno) +
                                ": expected 'key = value', got '" + line + "'",
                            line);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (kv.count(key))
      throw ValidationError("duplicate key '" + key + "'", key);
    kv[key] = value;
  }

  static const char* known[] = {"name",      "mass_ng",     "f_m_khz",
                                "L_cm",      "finesse",     "Q_m",
                                "radius_um", "thickness_um", "wavelength_nm",
                                "material"};
  for (const auto& [key, value] : kv) {
    (void)value;
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
          return key == k;
        }) == std::end(known))
      throw ValidationError("unknown key '" + key + "'", key);
  }

  auto require = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ValidationError(std::string("missing required key '") + key + "'",
                            key);
    return it->second;
  };

  DeviceParams d;
  d.name = kv.count("name") ? kv["name"] : default_name;
  d.m = detail::parse_positive(require("mass_ng"), "mass_ng") * 1e-12;
  d.f_m = detail::parse_positive(require("f_m_khz"), "f_m_khz") * 1e3;
  d.L = detail::parse_positive(require("L_cm"), "L_cm") * 1e-2;
  d.F = detail::parse_positive(require("finesse"), "finesse");
  d.Q_m = detail::parse_positive(require("Q_m"), "Q_m");
  if (kv.count("radius_um"))
    d.R = detail::parse_positive(kv["radius_um"], "radius_um") * 1e-6;
  if (kv.count("thickness_um"))
    d.b = detail::parse_positive(kv["thickness_um"], "thickness_um") * 1e-6;
  if (kv.count("wavelength_nm"))
    d.wavelength =
        detail::parse_positive(kv["wavelength_nm"], "wavelength_nm") * 1e-9;
  if (kv.count("material")) d.material = kv["material"];
  material_by_name(d.material);  // validate
  return d;
}

inline DeviceParams load_device(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open device file '" + path.string() + "'",
                          path.string());
  return parse_device(in, path.stem().string());
}

/// Serialize in the same key=value format load_device reads. Numeric fields
/// round-trip exactly (17 significant digits).
inline std::string serialize_device(const DeviceParams& d) {
  std::ostringstream out;
  out.precision(17);
  out << "name = " << d.name << "\n";
  out << "mass_ng = " << d.m * 1e12 << "\n";
  out << "f_m_khz = " << d.f_m * 1e-3 << "\n";
  out << "L_cm = " << d.L * 1e2 << "\n";
  out << "finesse = " << d.F << "\n";
  out << "Q_m = " << d.Q_m << "\n";
  if (d.R) out << "radius_um = " << *d.R * 1e6 << "\n";
  if (d.b) out << "thickness_um = " << *d.b * 1e6 << "\n";
  out << "wavelength_nm = " << d.wavelength * 1e9 << "\n";
  out << "material = " << d.material << "\n";
  return out.str();
}

inline void save_device(const DeviceParams& d,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw ValidationError("cannot write device file '" + path.string() + "'",
                          path.string());
  out << serialize_device(d);
}

}  // namespace nestif::devices
