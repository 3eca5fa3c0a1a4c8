#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "nestif/constants.hpp"
#include "nestif/errors.hpp"
#include "nestif/fock.hpp"

// Inner-interferometer postselection: the mechanical state conditioned on a
// dark-port click, its success probability, and thermal averaging over the
// initial coherent amplitude.
//
// The optical modes never appear numerically. A dark-port click projects the
// joint state onto the two-branch mechanical superposition
//     |psi_ps> = 1/2 [ e^{i phi(t)} |gamma(t)+alpha(t)> - |gamma(t)> ],
// so everything here works directly with that reduction.

namespace nestif::interferometer {

using Complex = std::complex<double>;

struct InteractionParams {
  double kappa = 0.0;    // g / omega_m
  double theta = 0.0;    // omega_m * t [rad]
  Complex gamma0 = 0.0;  // initial coherent amplitude

  /// Lowest-order formulas degrade above kappa ~ 0.05; the exact branch
  /// stays valid, so this is a warning flag rather than an error.
  bool weak_coupling() const { return kappa <= 0.05; }
};

struct EvolvedAmplitudes {
  Complex gamma_t;  // gamma e^{-i theta}
  Complex alpha_t;  // kappa (1 - e^{-i theta})
  double phi_t;     // kappa^2 (theta - sin theta)
};

inline EvolvedAmplitudes evolved_amplitudes(const InteractionParams& p) {
  if (p.kappa < 0.0) throw Error("evolved_amplitudes: kappa must be >= 0");
  const Complex rot = std::exp(Complex(0.0, -p.theta));
  return {p.gamma0 * rot, p.kappa * (1.0 - rot),
          p.kappa * p.kappa * (p.theta - std::sin(p.theta))};
}

struct PostselectionResult {
  fock::Vector state;  // unnormalized conditional mechanical state
  double probability;  // <state|state>
  double signal;       // probability - noise
  double noise;        // |<gamma(t)|state>|^2, dark-port events that carry
                       // no phonon
};

struct SignalNoise {
  double signal = 0.0;
  double noise = 0.0;
  double total() const { return signal + noise; }
};

/// Exact dark-port probability from the closed-form coherent overlap,
///   P = 1/2 [1 - e^{-|alpha|^2/2} cos(phi + Im(gamma_t* alpha_t))],
/// valid for any kappa. Algebraically identical to the squared norm of the
/// truncated two-branch state; the two routes are cross-checked in tests.
inline double exact_probability(const InteractionParams& p) {
  const auto ev = evolved_amplitudes(p);
  const double chi = std::imag(std::conj(ev.gamma_t) * ev.alpha_t);
  return 0.5 * (1.0 - std::exp(-0.5 * std::norm(ev.alpha_t)) *
                          std::cos(ev.phi_t + chi));
}

/// Exact noise |<gamma(t)|psi_ps>|^2 by the same closed form.
inline double exact_noise(const InteractionParams& p) {
  const auto ev = evolved_amplitudes(p);
  const double chi = std::imag(std::conj(ev.gamma_t) * ev.alpha_t);
  const Complex ov = std::exp(Complex(-0.5 * std::norm(ev.alpha_t), 0.0)) *
                     std::exp(Complex(0.0, ev.phi_t + chi));
  return 0.25 * std::norm(ov - 1.0);
}

/// Two-branch conditional state built from Fock-space constructors, with no
/// small-kappa approximation. The returned state is unnormalized; its
/// squared norm is the postselection probability.
inline PostselectionResult postselected_state_exact(const InteractionParams& p,
                                                    int dim) {
  const auto ev = evolved_amplitudes(p);
  const fock::Vector displaced =
      fock::coherent_state(ev.gamma_t + ev.alpha_t, dim);
  const fock::Vector undisplaced = fock::coherent_state(ev.gamma_t, dim);
  PostselectionResult r;
  r.state = 0.5 * (std::exp(Complex(0.0, ev.phi_t)) * displaced - undisplaced);
  r.probability = r.state.squaredNorm();
  const Complex ov = undisplaced.dot(r.state);  // <gamma(t)|psi_ps>
  r.noise = std::norm(ov);
  r.signal = r.probability - r.noise;
  return r;
}

/// Lowest-order (in kappa) dark-port probability split:
///   signal = 1/2 kappa^2 (1 - cos theta),
///   noise  = 1/4 kappa^2 |gamma|^2 sin^2 theta.
inline SignalNoise postselect_probability_lowest_order(
    const InteractionParams& p) {
  const double k2 = p.kappa * p.kappa;
  const double s = std::sin(p.theta);
  return {0.5 * k2 * (1.0 - std::cos(p.theta)),
          0.25 * k2 * std::norm(p.gamma0) * s * s};
}

/// Thermal average of the lowest-order probability over the coherent-state
/// mixture with mean occupation nbar:
///   signal = kappa^2 sin^2(theta/2),  noise = 1/4 kappa^2 nbar sin^2 theta.
inline SignalNoise thermal_postselect_probability(double nbar, double kappa,
                                                  double theta) {
  if (nbar < 0.0) throw Error("thermal_postselect_probability: nbar < 0");
  const double k2 = kappa * kappa;
  const double sh = std::sin(0.5 * theta);
  const double s = std::sin(theta);
  return {k2 * sh * sh, 0.25 * k2 * nbar * s * s};
}

/// Signal-to-noise ratio of the thermal split, sec^2(theta/2) / nbar.
inline double thermal_snr(double nbar, double theta) {
  const double c = std::cos(0.5 * theta);
  return 1.0 / (nbar * c * c);
}

/// Mean phonon occupation 1/(e^{hbar w / kB T} - 1); exactly 0 at T = 0.
inline double nbar_from_temperature(double T, double omega_m) {
  if (T < 0.0) throw Error("nbar_from_temperature: T must be >= 0");
  if (omega_m <= 0.0) throw Error("nbar_from_temperature: omega_m must be > 0");
  if (T == 0.0) return 0.0;
  const double x = constants().hbar * omega_m / (constants().k_B * T);
  return 1.0 / std::expm1(x);
}

/// One draw from the thermal coherent-amplitude density
/// exp(-|g|^2/nbar)/(pi nbar): Re and Im are independent N(0, nbar/2).
///
/// Box-Muller in polar form on top of the raw engine output, so streams are
/// reproducible across standard-library implementations.
inline Complex sample_thermal_gamma(double nbar, std::mt19937_64& rng) {
  if (nbar < 0.0) throw Error("sample_thermal_gamma: nbar < 0");
  if (nbar == 0.0) return {0.0, 0.0};
  const double u1 = 1.0 - double(rng() >> 11) * 0x1.0p-53;  // (0, 1]
  const double u2 = double(rng() >> 11) * 0x1.0p-53;        // [0, 1)
  const double r = std::sqrt(-nbar * std::log(u1));
  const double phase = 2.0 * M_PI * u2;
  return {r * std::cos(phase), r * std::sin(phase)};
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

namespace detail {

template <class F>
MonteCarloEstimate mc_over_thermal(double nbar, double kappa, double theta,
                                   std::int64_t samples, std::uint64_t seed,
                                   F&& prob) {
  if (samples < 2) throw Error("monte carlo: need at least 2 samples");
  std::mt19937_64 rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 1; i <= samples; ++i) {
    InteractionParams p{kappa, theta, sample_thermal_gamma(nbar, rng)};
    const double v = prob(p);
    const double d = v - mean;
    mean += d / double(i);
    m2 += d * (v - mean);
  }
  const double var = m2 / double(samples - 1);
  return {mean, std::sqrt(var / double(samples)), samples};
}

}  // namespace detail

inline constexpr std::int64_t kDefaultMcSamples = 100'000;

/// Monte Carlo thermal average of the exact dark-port probability.
inline MonteCarloEstimate mc_exact_probability(
    double nbar, double kappa, double theta,
    std::int64_t samples = kDefaultMcSamples, std::uint64_t seed = 1) {
  return detail::mc_over_thermal(nbar, kappa, theta, samples, seed,
                                 [](const InteractionParams& p) {
                                   return exact_probability(p);
                                 });
}

/// Monte Carlo thermal average of the lowest-order probability.
inline MonteCarloEstimate mc_lowest_order_probability(
    double nbar, double kappa, double theta,
    std::int64_t samples = kDefaultMcSamples, std::uint64_t seed = 1) {
  return detail::mc_over_thermal(
      nbar, kappa, theta, samples, seed, [](const InteractionParams& p) {
        return postselect_probability_lowest_order(p).total();
      });
}

}  // namespace nestif::interferometer
