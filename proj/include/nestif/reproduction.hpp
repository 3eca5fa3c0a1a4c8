#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nestif/decoherence.hpp"
#include "nestif/devices.hpp"
#include "nestif/errors.hpp"
#include "nestif/fock.hpp"
#include "nestif/interferometer.hpp"

// The reference table: every published timescale and derived device column
// this toolkit is expected to reproduce, each with its pinned tolerance.
// Consumed by the `reproduce` CLI command and by the acceptance suite, so a
// tolerance change is a one-line, reviewable diff here.

namespace nestif::reproduction {

enum class Kind {
  relative,            // |computed/expected - 1| <= tolerance
  order_of_magnitude,  // |log10(computed/expected)| <= tolerance (decades)
  lower_bound,         // computed >= expected
};

struct CheckRow {
  std::string id;
  std::string description;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  Kind kind = Kind::relative;
  bool soft = false;  // reported but never fails the run (known discrepancy)
  std::string note;

  double deviation() const {
    switch (kind) {
      case Kind::relative:
        return computed / expected - 1.0;
      case Kind::order_of_magnitude:
        return std::log10(computed / expected);
      case Kind::lower_bound:
        return computed - expected;
    }
    return 0.0;
  }

  bool pass() const {
    if (!std::isfinite(computed)) return false;
    switch (kind) {
      case Kind::relative:
        return std::abs(computed / expected - 1.0) <= tolerance;
      case Kind::order_of_magnitude:
        return std::abs(std::log10(computed / expected)) <= tolerance;
      case Kind::lower_bound:
        return computed >= expected;
    }
    return false;
  }
};

struct ReproduceOptions {
  bool strict_eid_printed = false;  // compare the printed EID formula against
                                    // the quoted values as well
  double quadrature_tol = 1e-8;
};

namespace detail {

inline const devices::DeviceParams& builtin(const std::string& name) {
  const auto* d = devices::find_builtin(name);
  if (!d) throw Error("reproduction: missing builtin device " + name);
  return *d;
}

inline double localized_tau(const decoherence::LocalizationParams& loc,
                            const devices::DeviceParams& dev) {
  const auto derived = devices::derive(dev);
  return decoherence::localization_timescale(loc.Lambda, derived.x0, loc.a_loc)
      .tau;
}

}  // namespace detail

/// Evaluate the full reference table. T_env = 1 mK throughout, matching the
/// published operating point.
inline std::vector<CheckRow> run_reproduction(ReproduceOptions opt = {}) {
  using namespace decoherence;
  const auto& ta = devices::tantalum();
  const auto& p1 = detail::builtin("proposed1");
  const auto& p2 = detail::builtin("proposed2");
  const double T_env = 1e-3;

  std::vector<CheckRow> rows;
  auto add = [&](std::string id, std::string desc, double expected,
                 double computed, double tol, Kind kind, bool soft = false,
                 std::string note = {}) {
    rows.push_back({std::move(id), std::move(desc), expected, computed, tol,
                    kind, soft, std::move(note)});
  };

  // Gravitationally induced decoherence, four mass-distribution models.
  auto tau_p = [&](const devices::DeviceParams& d, MassDistributionModel m) {
    return penrose_timescale(d, m, ta);
  };
  add("penrose-rzp-proposed1", "Penrose tau, resonator-zero-point, 300 kHz [s]",
      3.5e-3, tau_p(p1, MassDistributionModel::resonator_zero_point()), 0.10,
      Kind::relative);
  add("penrose-rzp-proposed2", "Penrose tau, resonator-zero-point, 4.5 kHz [s]",
      28e-6, tau_p(p2, MassDistributionModel::resonator_zero_point()), 0.10,
      Kind::relative);
  add("penrose-nr-proposed1", "Penrose tau, nuclear-radius, 300 kHz [s]",
      7.1e-3, tau_p(p1, MassDistributionModel::nuclear_radius()), 0.10,
      Kind::relative);
  add("penrose-nr-proposed2", "Penrose tau, nuclear-radius, 4.5 kHz [s]",
      100e-6, tau_p(p2, MassDistributionModel::nuclear_radius()), 0.10,
      Kind::relative);
  add("penrose-debye-proposed1", "Penrose tau, nuclear Debye spread, 300 kHz [s]",
      1.8e6, tau_p(p1, MassDistributionModel::nuclear_zero_point_debye()),
      0.15, Kind::relative);
  add("penrose-debye-proposed2", "Penrose tau, nuclear Debye spread, 4.5 kHz [s]",
      2.8e4, tau_p(p2, MassDistributionModel::nuclear_zero_point_debye()),
      0.15, Kind::relative);
  add("penrose-hom-proposed1", "Penrose tau, homogeneous 60 ng sphere, 300 kHz [s]",
      1.2e10, tau_p(p1, MassDistributionModel::homogeneous()), 1.0,
      Kind::order_of_magnitude, false,
      "reference values for this model do not follow from any single "
      "consistent sphere prescription; computed with the fixed 60 ng / 30 um "
      "sphere and the device zero-point separation");
  add("penrose-hom-proposed2", "Penrose tau, homogeneous 60 ng sphere, 4.5 kHz [s]",
      1.8e12, tau_p(p2, MassDistributionModel::homogeneous()), 1.0,
      Kind::order_of_magnitude, false,
      "same prescription as penrose-hom-proposed1; the two reference values "
      "differ by 150x while every consistent prescription yields a ratio "
      "near 1.5x, so one of them cannot be matched");

  // CSL with the full quadrature geometry factor.
  add("csl-proposed1", "CSL tau, 300 kHz device [s]", 1e7,
      detail::localized_tau(
          csl_localization(p1.m, *p1.R, *p1.b, opt.quadrature_tol), p1),
      0.15, Kind::relative);
  add("csl-proposed2", "CSL tau, 4.5 kHz device [s]", 1.5e5,
      detail::localized_tau(
          csl_localization(p2.m, *p2.R, *p2.b, opt.quadrature_tol), p2),
      0.15, Kind::relative);

  // Quantum-gravity localization (f = 1 regime).
  add("qg-proposed1", "Quantum-gravity tau, 300 kHz device [s]", 7.1,
      detail::localized_tau(qg_localization(p1.m, *p1.R, *p1.b), p1), 0.10,
      Kind::relative);
  add("qg-proposed2", "Quantum-gravity tau, 4.5 kHz device [s]", 1.1e-3,
      detail::localized_tau(qg_localization(p2.m, *p2.R, *p2.b), p2), 0.10,
      Kind::relative);

  // EID at 1 mK. The printed formula and its 2x variant are both reported;
  // the quoted reference values match the 2x variant.
  add("eid-printed-proposed1", "EID tau, printed formula, Q=2e4 [s]", 76e-6,
      eid_timescale(p1.Q_m, T_env), 0.05, Kind::relative);
  add("eid-printed-proposed2", "EID tau, printed formula, Q=2e6 [s]", 7.6e-3,
      eid_timescale(p2.Q_m, T_env), 0.05, Kind::relative);
  add("eid-quoted-proposed1", "EID tau, 2x variant vs quoted value [s]",
      150e-6, eid_timescale_quoted(p1.Q_m, T_env), 0.05, Kind::relative);
  add("eid-quoted-proposed2", "EID tau, 2x variant vs quoted value [s]",
      15e-3, eid_timescale_quoted(p2.Q_m, T_env), 0.05, Kind::relative);
  if (opt.strict_eid_printed) {
    add("eid-strict-proposed1",
        "EID tau, printed formula vs quoted value [s]", 150e-6,
        eid_timescale(p1.Q_m, T_env), 0.05, Kind::relative, true,
        "known discrepancy: the printed formula is exactly half the quoted "
        "values");
    add("eid-strict-proposed2",
        "EID tau, printed formula vs quoted value [s]", 15e-3,
        eid_timescale(p2.Q_m, T_env), 0.05, Kind::relative, true,
        "known discrepancy: the printed formula is exactly half the quoted "
        "values");
  }

  // Derived device columns, lambda = 1064 nm assumption.
  struct Ref {
    const char* name;
    double kappa, sideband, t_eid;
  };
  const Ref table[] = {{"tramp1", 0.000034, 2.0, 0.3},
                       {"tramp2", 0.0016, 0.09, 0.4},
                       {"proposed1", 0.001, 3.0, 0.3},
                       {"proposed2", 0.005, 3.0, 0.4}};
  for (const auto& ref : table) {
    const auto derived = devices::derive(detail::builtin(ref.name));
    add(std::string("kappa-") + ref.name,
        std::string("coupling kappa, ") + ref.name, ref.kappa, derived.kappa,
        0.10, Kind::relative);
    add(std::string("sideband-") + ref.name,
        std::string("sideband resolution omega_m/Gamma_c, ") + ref.name,
        ref.sideband, derived.sideband_ratio, 0.05, Kind::relative);
    add(std::string("t-eid-") + ref.name,
        std::string("EID temperature T_EID [K], ") + ref.name, ref.t_eid,
        derived.T_EID, 0.10, Kind::relative);
  }

  // Ground-state postselection limit: conditional state vs |1>, and the
  // success probability vs |alpha|^2/4.
  {
    interferometer::InteractionParams p{0.01, M_PI, 0.0};
    const auto r = interferometer::postselected_state_exact(p, 32);
    const double fid = std::norm(r.state(1)) / r.probability;
    const auto ev = interferometer::evolved_amplitudes(p);
    const double p_lowest = 0.25 * std::norm(ev.alpha_t);
    add("postselect-fidelity", "conditional-state fidelity with |1>, "
        "kappa=0.01, theta=pi", 0.999, fid, 0.0, Kind::lower_bound);
    add("postselect-probability", "dark-port probability vs |alpha|^2/4, "
        "kappa=0.01, theta=pi", p_lowest, r.probability, 1e-3,
        Kind::relative);
  }

  return rows;
}

inline bool all_hard_pass(const std::vector<CheckRow>& rows) {
  for (const auto& r : rows)
    if (!r.soft && !r.pass()) return false;
  return true;
}

}  // namespace nestif::reproduction
