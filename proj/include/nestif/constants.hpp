#pragma once

#include <cmath>

namespace nestif {

/// CODATA-2018 physical constants, SI units throughout.
///
/// The Planck mass is derived from hbar, c and G at construction rather than
/// stored as a separate literal, so the four values can never drift apart.
struct Constants {
  double hbar;  // reduced Planck constant [J s]
  double k_B;   // Boltzmann constant [J/K]
  double G;     // gravitational constant [m^3 kg^-1 s^-2]
  double c;     // speed of light [m/s]
  double amu;   // atomic mass unit [kg]
  double m0;    // nucleon mass (proton) [kg]
  double m_P;   // Planck mass sqrt(hbar c / G) [kg]
};

inline const Constants& constants() {
  static const Constants k = [] {
    Constants v{};
    v.hbar = 1.054571817e-34;
    v.k_B = 1.380649e-23;
    v.G = 6.67430e-11;
    v.c = 299792458.0;
    v.amu = 1.66053906660e-27;
    v.m0 = 1.67262192369e-27;
    v.m_P = std::sqrt(v.hbar * v.c / v.G);
    return v;
  }();
  return k;
}

}  // namespace nestif
