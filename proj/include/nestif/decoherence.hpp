#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nestif/bessel.hpp"
#include "nestif/constants.hpp"
#include "nestif/devices.hpp"
#include "nestif/errors.hpp"
#include "nestif/quadrature.hpp"

// Decoherence timescales for a mechanical superposition of size dx = x0:
//
//   * environmentally induced decoherence (EID) from a thermal bath,
//   * gravitationally induced (Penrose/Diosi) decoherence under four mass
//     distribution models,
//   * continuous spontaneous localization (CSL),
//   * quantum-gravity (spacetime-foam) localization, a CSL variant with
//     Planck-derived parameters.
//
// Everything is closed-form or low-dimensional quadrature; the brute-force
// volume integral exists to validate the closed forms.

namespace nestif::decoherence {

// ---------------------------------------------------------------------------
// Environmentally induced decoherence
// ---------------------------------------------------------------------------

/// tau_EID = hbar Q / (2 kB T). Note: the companion *_quoted variant, larger
/// by exactly 2x, matches the values usually quoted alongside this formula;
/// both are reported side by side and neither is endorsed here.
inline double eid_timescale(double Q_m, double T_env) {
  if (Q_m <= 0.0 || T_env <= 0.0)
    throw Error("eid_timescale: Q_m and T_env must be positive");
  return constants().hbar * Q_m / (2.0 * constants().k_B * T_env);
}

/// The 2x variant hbar Q / (kB T).
inline double eid_timescale_quoted(double Q_m, double T_env) {
  return 2.0 * eid_timescale(Q_m, T_env);
}

/// EID temperature T_EID = hbar omega_m Q_m / kB: the environment temperature
/// at which decoherence becomes as fast as the mechanical oscillation.
inline double eid_temperature(double omega_m, double Q_m) {
  if (omega_m <= 0.0 || Q_m <= 0.0)
    throw Error("eid_temperature: inputs must be positive");
  return constants().hbar * omega_m * Q_m / constants().k_B;
}

/// The equivalent rate identity 1/tau_EID = 2 omega_m (T_env / T_EID).
inline double eid_rate(double omega_m, double T_env, double T_EID) {
  return 2.0 * omega_m * T_env / T_EID;
}

// ---------------------------------------------------------------------------
// Gravitationally induced decoherence
// ---------------------------------------------------------------------------

/// 1/r potential between two uniform spheres of radius a, masses M and m,
/// centers separated by dx. Piecewise: Newtonian point form outside contact,
/// the overlapping-sphere polynomial inside.
inline double overlap_potential(double M, double m, double a, double dx) {
  if (a <= 0.0) throw Error("overlap_potential: a must be positive");
  if (dx < 0.0) throw Error("overlap_potential: dx must be >= 0");
  const double GMm = constants().G * M * m;
  if (dx > 2.0 * a) return -GMm / dx;
  const double a3 = a * a * a;
  const double a6 = a3 * a3;
  const double dx2 = dx * dx;
  const double dx3 = dx2 * dx;
  const double dx5 = dx3 * dx2;
  return -GMm * ((12.0 * a * a - 5.0 * dx2) / (10.0 * a3) -
                 (dx5 - 30.0 * dx3 * a * a) / (160.0 * a6));
}

/// Two superposed mass distributions: spheres of radius a and per-sphere mass
/// m, dx apart, with the sphere-count multiplicity M/m already folded into
/// every energy term (so each term is proportional to G M m).
struct SpherePair {
  double M;   // total superposed mass [kg]
  double m;   // per-sphere mass: nuclear mass, or M for a homogeneous body
  double a;   // sphere radius [m]
  double dx;  // superposition separation [m]
};

/// Penrose energy Delta_P = 4 pi * 2 * (E(dx) - E(0)).
///
/// The difference is expanded algebraically before evaluation: for dx << a
/// the two potentials agree to one part in (dx/a)^2, and the naive
/// subtraction returns pure cancellation noise (identically zero in double
/// precision for femtometre separations against micron spheres).
inline double penrose_energy(const SpherePair& sp) {
  if (sp.a <= 0.0 || sp.M <= 0.0 || sp.m <= 0.0)
    throw Error("penrose_energy: masses and radius must be positive");
  if (sp.dx < 0.0) throw Error("penrose_energy: dx must be >= 0");
  const double GMm = constants().G * sp.M * sp.m;
  double diff;  // (E(dx) - E(0)) / (G M m), units 1/m
  if (sp.dx > 2.0 * sp.a) {
    diff = 6.0 / (5.0 * sp.a) - 1.0 / sp.dx;
  } else {
    const double u = sp.dx / sp.a;
    const double u2 = u * u;
    diff = (u2 / 2.0 - 3.0 * u2 * u / 16.0 + u2 * u2 * u / 160.0) / sp.a;
  }
  return 8.0 * M_PI * GMm * diff;
}

struct GridSpec {
  int initial_cells = 256;   // cells per axis of the first grid
  int max_doublings = 5;     // refine up to initial_cells * 2^max_doublings
  double rel_tol = 1e-4;     // convergence target between successive grids
};

namespace detail {

// Potential kernel of a unit-mass uniform sphere of radius a at distance r
// from its center (positive convention, multiply by -G M elsewhere).
inline double sphere_potential(double r, double a) {
  if (r >= a) return 1.0 / r;
  return (3.0 * a * a - r * r) / (2.0 * a * a * a);
}

// W(d) = (3 / 4 pi a^3) * Integral over a sphere of radius a centered at
// z = d of sphere_potential(|y|, a) d^3y, so E(d) = -G M m W(d). Midpoint
// rule in cylindrical coordinates (z along the separation axis).
inline double mutual_potential_grid(double d, double a, int n) {
  const double zlo = d - a, zhi = d + a;
  const double hz = (zhi - zlo) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = zlo + (i + 0.5) * hz;
    const double rho_max2 = a * a - (z - d) * (z - d);
    if (rho_max2 <= 0.0) continue;
    const double rho_max = std::sqrt(rho_max2);
    const double hr = rho_max / n;
    double inner = 0.0;
    for (int j = 0; j < n; ++j) {
      const double rho = (j + 0.5) * hr;
      inner += sphere_potential(std::hypot(rho, z), a) * rho;
    }
    acc += inner * hr;
  }
  return acc * 2.0 * M_PI * hz * 3.0 / (4.0 * M_PI * a * a * a);
}

}  // namespace detail

/// Direct numerical evaluation of the Penrose energy for uniform spheres,
/// independent of the closed-form overlap polynomial. Cylindrical grids are
/// doubled until two successive estimates agree to grid.rel_tol; throws
/// ConvergenceError (carrying both estimates) if the budget runs out.
inline double brute_force_penrose(const SpherePair& sp,
                                  const GridSpec& grid = {}) {
  if (sp.a <= 0.0) throw Error("brute_force_penrose: a must be positive");
  const double GMm = constants().G * sp.M * sp.m;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int n = grid.initial_cells;
  for (int pass = 0; pass <= grid.max_doublings; ++pass, n *= 2) {
    const double w_dx = detail::mutual_potential_grid(sp.dx, sp.a, n);
    const double w_0 = detail::mutual_potential_grid(0.0, sp.a, n);
    const double delta = 8.0 * M_PI * GMm * (w_0 - w_dx);
    if (pass > 0 && std::abs(delta - prev) <=
                        grid.rel_tol * std::max(std::abs(delta), 1e-300))
      return delta;
    prev = delta;
  }
  throw ConvergenceError(
      "brute_force_penrose: no convergence within grid budget", prev, prev);
}

enum class MassModel {
  resonator_zero_point,     // a = x0 of the resonator mode
  nuclear_radius,           // a = r0 A^{1/3}
  nuclear_zero_point_debye, // a = 3 hbar / (2 sqrt(kB Theta_D M_atom))
  homogeneous_mass,         // one uniform sphere, no nuclear granularity
};

inline const char* mass_model_name(MassModel m) {
  switch (m) {
    case MassModel::resonator_zero_point: return "resonator-zero-point";
    case MassModel::nuclear_radius: return "nuclear-radius";
    case MassModel::nuclear_zero_point_debye: return "nuclear-debye";
    case MassModel::homogeneous_mass: return "homogeneous";
  }
  return "?";
}

/// Which sphere-radius prescription to use, plus the inputs the homogeneous
/// variant needs. The homogeneous defaults (60 ng sphere of 30 um radius)
/// deliberately do not track the selected device; override to generalize.
struct MassDistributionModel {
  MassModel kind = MassModel::resonator_zero_point;
  double homogeneous_radius = 30e-6;  // [m]
  double homogeneous_mass = 60e-12;   // [kg]

  static MassDistributionModel resonator_zero_point() {
    return {MassModel::resonator_zero_point};
  }
  static MassDistributionModel nuclear_radius() {
    return {MassModel::nuclear_radius};
  }
  static MassDistributionModel nuclear_zero_point_debye() {
    return {MassModel::nuclear_zero_point_debye};
  }
  static MassDistributionModel homogeneous(double radius = 30e-6,
                                           double mass = 60e-12) {
    return {MassModel::homogeneous_mass, radius, mass};
  }
};

/// Sphere radius for the given mass-distribution model.
inline double sphere_radius(const MassDistributionModel& model,
                            const devices::DeviceParams& device,
                            const devices::Material& material) {
  const auto& k = constants();
  switch (model.kind) {
    case MassModel::resonator_zero_point: {
      const double omega = 2.0 * M_PI * device.f_m;
      return std::sqrt(k.hbar / (2.0 * device.m * omega));
    }
    case MassModel::nuclear_radius:
      if (material.A <= 0.0)
        throw ConfigError("sphere_radius: material lacks atomic mass number");
      return material.r0 * std::cbrt(material.A);
    case MassModel::nuclear_zero_point_debye:
      if (material.theta_D <= 0.0 || material.atomic_mass <= 0.0)
        throw ConfigError("sphere_radius: material lacks Debye data");
      return 3.0 * k.hbar /
             (2.0 * std::sqrt(k.k_B * material.theta_D * material.atomic_mass));
    case MassModel::homogeneous_mass:
      return model.homogeneous_radius;
  }
  throw Error("sphere_radius: unknown model");
}

/// SpherePair for a device under the given model: dx is always the device
/// zero-point motion; per-sphere mass is the nuclear mass, except the
/// homogeneous model which replaces the whole resonator by one sphere.
inline SpherePair sphere_pair_for(const devices::DeviceParams& device,
                                  const MassDistributionModel& model,
                                  const devices::Material& material) {
  const double omega = 2.0 * M_PI * device.f_m;
  const double x0 = std::sqrt(constants().hbar / (2.0 * device.m * omega));
  if (model.kind == MassModel::homogeneous_mass)
    return {model.homogeneous_mass, model.homogeneous_mass,
            model.homogeneous_radius, x0};
  return {device.m, material.atomic_mass,
          sphere_radius(model, device, material), x0};
}

/// tau_P = hbar / Delta_P.
inline double penrose_timescale(const devices::DeviceParams& device,
                                const MassDistributionModel& model,
                                const devices::Material& material) {
  const double delta = penrose_energy(sphere_pair_for(device, model, material));
  if (delta == 0.0) return std::numeric_limits<double>::infinity();
  return constants().hbar / delta;
}

// ---------------------------------------------------------------------------
// Position-localized decoherence (CSL and quantum gravity)
// ---------------------------------------------------------------------------

inline constexpr double kCslLocalizationDistance = 100e-9;  // a_CSL [m]
inline constexpr double kCslNucleonRate = 1e-16;            // gamma0_CSL [Hz]

/// Disk geometry factor for motion perpendicular to the disk face:
///
///   f(R,b,a) = 4 (2a/R)^4 (2a/b)^2 [1-e^{-b^2/4a^2}]
///              * Int_0^{R/2a} Int_0^{R/2a} x x' e^{-(x^2+x'^2)} I0(2xx')
///
/// The kernel is evaluated as e^{-(x-x')^2} * [e^{-2xx'} I0(2xx')] with the
/// scaled Bessel function, which stays bounded where the unscaled product
/// overflows (R/2a >> 1). Monotonically non-increasing in R and b, in (0,1].
///
/// When both (R/2a)^2 and (b/2a)^2 are so large that the asymptote
/// (2a/R)^2 (2a/b)^2 is within rel_tol, it is returned directly.
inline double disk_geometry_factor(double R, double b, double a_loc,
                                   double rel_tol = 1e-8) {
  if (R <= 0.0 || b <= 0.0 || a_loc <= 0.0)
    throw Error("disk_geometry_factor: dimensions must be positive");
  if (!(rel_tol > 0.0) || rel_tol > 1e-4)
    throw Error("disk_geometry_factor: rel_tol must be in (0, 1e-4]");
  const double X = R / (2.0 * a_loc);
  const double Xb2 = (b / (2.0 * a_loc)) * (b / (2.0 * a_loc));

  // Large-X deficit of the double integral is ~ 1/(sqrt(pi) X).
  const double asym_err = 1.0 / (std::sqrt(M_PI) * X);
  if (asym_err < 0.25 * rel_tol && std::exp(-Xb2) < 0.25 * rel_tol)
    return 1.0 / (X * X * Xb2);

  const double window = 9.0;  // e^{-81} is far below any permitted rel_tol
  quadrature::Options inner_opt{0.1 * rel_tol, 0.0, 400'000, 40};
  quadrature::Options outer_opt{rel_tol, 0.0, 9'600'000, 40};
  auto inner = [&](double x) {
    const double lo = std::max(0.0, x - window);
    const double hi = std::min(X, x + window);
    return quadrature::integrate(
        [&](double xp) {
          const double u = x - xp;
          return xp * std::exp(-u * u) * bessel::i0e(2.0 * x * xp);
        },
        lo, hi, inner_opt);
  };
  const double J =
      quadrature::integrate([&](double x) { return x * inner(x); }, 0.0, X,
                            outer_opt);
  const double bracket = -std::expm1(-Xb2);
  return 4.0 / (X * X * X * X) / Xb2 * bracket * J;
}

/// Localization strength/distance pair plus the resulting rate parameter
/// Lambda = (M/m0)^2 gamma0/(4 a^2) f(R, b, a).
struct LocalizationParams {
  double a_loc;   // localization distance [m]
  double gamma0;  // single-nucleon localization strength [Hz]
  double Lambda;  // localization parameter [Hz/m^2]
  double f;       // geometry factor actually used
};

inline LocalizationParams csl_localization(double M, double R, double b,
                                           double rel_tol = 1e-8) {
  if (M <= 0.0) throw Error("csl_localization: mass must be positive");
  const double a = kCslLocalizationDistance;
  const double f = disk_geometry_factor(R, b, a, rel_tol);
  const double n = M / constants().m0;
  return {a, kCslNucleonRate,
          n * n * kCslNucleonRate / (4.0 * a * a) * f, f};
}

/// Planck-scale localization distance a_QG = hbar m_P / (2 c m0^2);
/// about 1.4 km, so every device here sits deep in the f = 1 limit.
inline double qg_localization_distance() {
  const auto& k = constants();
  return k.hbar * k.m_P / (2.0 * k.c * k.m0 * k.m0);
}

/// Single-nucleon rate gamma0_QG = 4 a_QG^2 c^4 m0^6 / (hbar^3 m_P^3).
inline double qg_nucleon_rate() {
  const auto& k = constants();
  const double a = qg_localization_distance();
  return 4.0 * a * a * std::pow(k.c, 4) * std::pow(k.m0, 6) /
         (std::pow(k.hbar, 3) * std::pow(k.m_P, 3));
}

inline LocalizationParams qg_localization(double M, double R, double b) {
  if (M <= 0.0) throw Error("qg_localization: mass must be positive");
  const auto& k = constants();
  const double a = qg_localization_distance();
  if (R >= a || b >= a)
    throw Error("qg_localization: geometry exceeds the localization distance");
  // R, b << a_QG always holds here, so f = 1 and Lambda reduces to
  // c^4 M^2 m0^4 / (hbar^3 m_P^3).
  const double lambda = std::pow(k.c, 4) * M * M * std::pow(k.m0, 4) /
                        (std::pow(k.hbar, 3) * std::pow(k.m_P, 3));
  return {a, qg_nucleon_rate(), lambda, 1.0};
}

struct LocalizationTimescale {
  double tau;           // 1 / (Lambda dx^2), +inf when dx = 0
  std::string warning;  // set when dx is not << 2 a_loc
};

/// Small-separation decay time tau = 1/(Lambda dx^2), valid for dx << 2 a_loc.
inline LocalizationTimescale localization_timescale(double Lambda, double dx,
                                                    double a_loc) {
  if (Lambda < 0.0) throw Error("localization_timescale: Lambda must be >= 0");
  if (dx < 0.0) throw Error("localization_timescale: dx must be >= 0");
  LocalizationTimescale out{std::numeric_limits<double>::infinity(), {}};
  if (dx > 0.2 * a_loc)
    out.warning = "separation is not small against the localization distance; "
                  "the quadratic rate approximation degrades";
  if (dx == 0.0 || Lambda == 0.0) return out;
  out.tau = 1.0 / (Lambda * dx * dx);
  return out;
}

// ---------------------------------------------------------------------------
// Aggregated per-device report
// ---------------------------------------------------------------------------

enum class Mechanism {
  penrose_resonator_zero_point,
  penrose_nuclear_radius,
  penrose_debye,
  penrose_homogeneous,
  csl,
  qg,
};

inline const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::penrose_resonator_zero_point:
      return "penrose-resonator-zero-point";
    case Mechanism::penrose_nuclear_radius: return "penrose-nuclear-radius";
    case Mechanism::penrose_debye: return "penrose-debye";
    case Mechanism::penrose_homogeneous: return "penrose-homogeneous";
    case Mechanism::csl: return "csl";
    case Mechanism::qg: return "qg";
  }
  return "?";
}

inline const std::vector<Mechanism>& all_mechanisms() {
  static const std::vector<Mechanism> all = {
      Mechanism::penrose_resonator_zero_point,
      Mechanism::penrose_nuclear_radius,
      Mechanism::penrose_debye,
      Mechanism::penrose_homogeneous,
      Mechanism::csl,
      Mechanism::qg};
  return all;
}

struct MechanismResult {
  Mechanism mechanism;
  double tau = std::numeric_limits<double>::quiet_NaN();
  bool testable = false;  // tau < tau_EID
  std::string warning;
  std::string error;  // non-empty when the mechanism could not be evaluated
  bool ok() const { return error.empty(); }
};

struct TimescaleReport {
  std::string device;
  double T_env;
  double tau_eid;         // printed formula hbar Q / (2 kB T)
  double tau_eid_quoted;  // 2x variant
  std::vector<MechanismResult> mechanisms;
};

/// Evaluate every requested mechanism for one device. Per-mechanism failures
/// (e.g. missing mirror geometry for CSL) are collected, not fatal.
inline TimescaleReport full_report(const devices::DeviceParams& device,
                                   double T_env,
                                   const std::vector<Mechanism>& mechanisms) {
  const auto& material = devices::material_by_name(device.material);
  const auto derived = devices::derive(device);
  TimescaleReport rep;
  rep.device = device.name;
  rep.T_env = T_env;
  rep.tau_eid = eid_timescale(device.Q_m, T_env);
  rep.tau_eid_quoted = eid_timescale_quoted(device.Q_m, T_env);

  auto localized_tau = [&](const LocalizationParams& loc,
                           MechanismResult& r) {
    const auto lt = localization_timescale(loc.Lambda, derived.x0, loc.a_loc);
    r.tau = lt.tau;
    r.warning = lt.warning;
  };

  for (Mechanism mech : mechanisms) {
    MechanismResult r;
    r.mechanism = mech;
    try {
      switch (mech) {
        case Mechanism::penrose_resonator_zero_point:
          r.tau = penrose_timescale(
              device, MassDistributionModel::resonator_zero_point(), material);
          break;
        case Mechanism::penrose_nuclear_radius:
          r.tau = penrose_timescale(
              device, MassDistributionModel::nuclear_radius(), material);
          break;
        case Mechanism::penrose_debye:
          r.tau = penrose_timescale(
              device, MassDistributionModel::nuclear_zero_point_debye(),
              material);
          break;
        case Mechanism::penrose_homogeneous:
          r.tau = penrose_timescale(
              device, MassDistributionModel::homogeneous(), material);
          break;
        case Mechanism::csl: {
          if (!device.has_geometry())
            throw ConfigError("csl: device '" + device.name +
                              "' has no mirror geometry (radius_um, "
                              "thickness_um)");
          localized_tau(csl_localization(device.m, *device.R, *device.b), r);
          break;
        }
        case Mechanism::qg: {
          if (!device.has_geometry())
            throw ConfigError("qg: device '" + device.name +
                              "' has no mirror geometry (radius_um, "
                              "thickness_um)");
          localized_tau(qg_localization(device.m, *device.R, *device.b), r);
          break;
        }
      }
      r.testable = r.tau < rep.tau_eid;
    } catch (const Error& e) {
      r.error = e.what();
    }
    rep.mechanisms.push_back(std::move(r));
  }
  return rep;
}

}  // namespace nestif::decoherence
