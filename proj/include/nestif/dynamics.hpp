#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "nestif/constants.hpp"
#include "nestif/decoherence.hpp"
#include "nestif/devices.hpp"
#include "nestif/errors.hpp"
#include "nestif/fock.hpp"

// Master-equation integration on the truncated number basis, for the
// (|0> + |1>)/sqrt(2) mechanical superposition whose interference contrast
// the outer interferometer reads out.

namespace nestif::dynamics {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Rhs = std::function<Matrix(const Matrix&)>;

inline Matrix pure_state_density(const fock::Vector& psi) {
  return psi * psi.adjoint();
}

/// Density matrix of (|0> + |1>)/sqrt(2).
inline Matrix plus_state_density(int dim) {
  fock::Vector psi = fock::Vector::Zero(dim);
  psi(0) = psi(1) = 1.0 / std::sqrt(2.0);
  return pure_state_density(psi);
}

struct DensityDefects {
  double hermiticity;    // max |rho - rho^dag|
  double trace;          // |tr rho - 1|
  double min_eigenvalue; // most negative eigenvalue of (rho + rho^dag)/2
};

inline DensityDefects density_defects(const Matrix& rho) {
  DensityDefects d{};
  d.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  d.trace = std::abs(rho.trace() - Complex(1.0, 0.0));
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

/// Throws unless rho is Hermitian (1e-10), unit trace (1e-9) and positive
/// up to -1e-8 on the spectrum.
inline void validate_density(const Matrix& rho, double herm_tol = 1e-10,
                             double trace_tol = 1e-9, double eig_tol = 1e-8) {
  const auto d = density_defects(rho);
  if (d.hermiticity > herm_tol)
    throw IntegratorError("density matrix is not Hermitian", d.hermiticity);
  if (d.trace > trace_tol)
    throw IntegratorError("density matrix trace deviates from 1", d.trace);
  if (d.min_eigenvalue < -eig_tol)
    throw IntegratorError("density matrix has a negative eigenvalue",
                          d.min_eigenvalue);
}

/// Interference visibility of the (|0>+|1>)/sqrt(2) superposition,
/// V = 2 |<0|rho|1>|. Invariant under global phases of rho; in [0,1] for any
/// valid state.
inline double visibility(const Matrix& rho) {
  return 2.0 * std::abs(rho(0, 1));
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Thermal-bath master equation
///   d rho/dt = (i/hbar)[rho, H] - (i gamma_m/hbar)[x, {p, rho}]
///              - (D/hbar^2)[x, [x, rho]],
/// with H = hbar omega_m c^dag c (no photon is present during the delay),
/// gamma_m = omega_m/Q_m and D = 2 m gamma_m kB T_env. The three terms are
/// exposed individually so each can be validated on its own.
class EidGenerator {
 public:
  EidGenerator(double omega_m, double mass, double Q_m, double T_env, int dim)
      : omega_m_(omega_m), gamma_m_(omega_m / Q_m) {
    if (dim < 3) throw Error("EidGenerator: dim must be >= 3");
    const auto& k = constants();
    x0_ = std::sqrt(k.hbar / (2.0 * mass * omega_m));
    x_ = fock::position_operator(dim, x0_);
    p_ = fock::momentum_operator(dim, x0_);
    h_ = k.hbar * omega_m * fock::number_operator(dim);
    const double D = 2.0 * mass * gamma_m_ * k.k_B * T_env;
    diffusion_coeff_ = D / (k.hbar * k.hbar);  // [1/(m^2 s)]
  }

  Matrix unitary(const Matrix& rho) const {
    return Complex(0, 1) / constants().hbar * (rho * h_ - h_ * rho);
  }

  Matrix damping(const Matrix& rho) const {
    const Matrix anti = p_ * rho + rho * p_;
    return Complex(0, -gamma_m_ / constants().hbar) * (x_ * anti - anti * x_);
  }

  Matrix diffusion(const Matrix& rho) const {
    return -diffusion_coeff_ *
           (x_ * (x_ * rho) - 2.0 * x_ * rho * x_ + (rho * x_) * x_);
  }

  Matrix operator()(const Matrix& rho) const {
    return unitary(rho) + damping(rho) + diffusion(rho);
  }

  double gamma_m() const { return gamma_m_; }
  double x0() const { return x0_; }
  /// D/hbar^2, the coefficient of the double commutator in x.
  double diffusion_coefficient() const { return diffusion_coeff_; }
  const Matrix& position() const { return x_; }
  const Matrix& momentum() const { return p_; }
  const Matrix& hamiltonian() const { return h_; }

  /// Conservative bound on the fastest rate in the generator, for timestep
  /// selection: the top Fock level sees the diffusion scaled by ~4n.
  double max_rate() const {
    const int dim = int(x_.rows());
    return omega_m_ + gamma_m_ * dim +
           4.0 * dim * diffusion_coeff_ * x0_ * x0_;
  }

 private:
  double omega_m_, gamma_m_, x0_, diffusion_coeff_;
  Matrix x_, p_, h_;
};

/// Position-localized master equation in the small-separation regime,
///   d rho/dt = (i/hbar)[rho, H] - Lambda [x, [x, rho]].
/// The position operator is arbitrary, so the same generator covers the
/// Fock-space case and coarse site models used for analytic checks.
class LocalizedGenerator {
 public:
  LocalizedGenerator(Matrix position, double lambda, Matrix hamiltonian)
      : x_(std::move(position)), h_(std::move(hamiltonian)), lambda_(lambda) {
    if (lambda < 0.0) throw Error("LocalizedGenerator: Lambda must be >= 0");
    if (x_.rows() != h_.rows())
      throw Error("LocalizedGenerator: operator dimensions disagree");
  }

  /// Fock-space form: x = x0 (c + c^dag), H = hbar omega_m c^dag c.
  LocalizedGenerator(double lambda, double x0, int dim, double omega_m = 0.0)
      : LocalizedGenerator(
            fock::position_operator(dim, x0), lambda,
            constants().hbar * omega_m * fock::number_operator(dim)) {}

  Matrix unitary(const Matrix& rho) const {
    return Complex(0, 1) / constants().hbar * (rho * h_ - h_ * rho);
  }

  Matrix localization(const Matrix& rho) const {
    return -lambda_ *
           (x_ * (x_ * rho) - 2.0 * x_ * rho * x_ + (rho * x_) * x_);
  }

  Matrix operator()(const Matrix& rho) const {
    return unitary(rho) + localization(rho);
  }

  double lambda() const { return lambda_; }
  const Matrix& position() const { return x_; }

  double max_rate() const {
    const int dim = int(x_.rows());
    const double xmax = x_.cwiseAbs().maxCoeff();
    const double hmax = h_.cwiseAbs().maxCoeff() / constants().hbar;
    return 2.0 * hmax + 4.0 * dim * lambda_ * xmax * xmax;
  }

 private:
  Matrix x_, h_;
  double lambda_;
};

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

/// Timestep resolving the fastest rate: dt = 0.01 / max_rate.
inline double default_timestep(double max_rate) {
  if (max_rate <= 0.0) throw Error("default_timestep: rate must be positive");
  return 0.01 / max_rate;
}

struct EvolutionSpec {
  double t_final = 0.0;
  double dt = 0.0;
  int store_every = 1;          // keep every n-th step in the trajectory
  double trace_tol = 1e-6;      // abort threshold on trace drift
  double negativity_tol = 1e-6; // checked on stored states only
  bool check_negativity = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
  double max_trace_drift = 0.0;
  double max_hermiticity_defect = 0.0;

  const Matrix& final_state() const { return states.back(); }
};

/// Fixed-step classic RK4. No per-step renormalization: trace drift is
/// measured and reported, and drift beyond spec.trace_tol aborts with an
/// IntegratorError. All three generator terms are trace-free, so drift at
/// the default step is rounding-level.
template <class R>
Trajectory integrate(const Matrix& rho0, R&& rhs, const EvolutionSpec& spec) {
  if (spec.dt <= 0.0 || spec.t_final < 0.0)
    throw Error("integrate: need dt > 0 and t_final >= 0");
  validate_density(rho0);

  const auto steps = static_cast<long>(std::llround(spec.t_final / spec.dt));
  Trajectory traj;
  traj.times.reserve(steps / spec.store_every + 2);
  traj.states.reserve(steps / spec.store_every + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);

  Matrix rho = rho0;
  const double h = spec.dt;
  for (long s = 1; s <= steps; ++s) {
    const Matrix k1 = rhs(rho);
    const Matrix k2 = rhs(rho + (0.5 * h) * k1);
    const Matrix k3 = rhs(rho + (0.5 * h) * k2);
    const Matrix k4 = rhs(rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double trace_drift = std::abs(rho.trace() - Complex(1.0, 0.0));
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    traj.max_trace_drift = std::max(traj.max_trace_drift, trace_drift);
    traj.max_hermiticity_defect = std::max(traj.max_hermiticity_defect, herm);
    if (trace_drift > spec.trace_tol)
      throw IntegratorError("integrate: trace drift exceeded tolerance at t=" +
                                std::to_string(double(s) * h),
                            trace_drift);

    if (s % spec.store_every == 0 || s == steps) {
      traj.times.push_back(double(s) * h);
      traj.states.push_back(rho);
    }
  }

  if (spec.check_negativity) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        0.5 * (rho + rho.adjoint()));
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -spec.negativity_tol)
      throw IntegratorError("integrate: final state negativity beyond "
                            "tolerance",
                            min_eig);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Visibility curves
// ---------------------------------------------------------------------------

/// Decoherence channel acting during the delay line: nothing, the thermal
/// bath, or one position-localized mechanism with a fixed Lambda.
struct NoChannel {};
struct EidChannel {
  double T_env;
};
struct LocalizedChannel {
  double Lambda;
};
using Channel = std::variant<NoChannel, EidChannel, LocalizedChannel>;

inline std::string channel_name(const Channel& ch) {
  if (std::holds_alternative<NoChannel>(ch)) return "none";
  if (std::holds_alternative<EidChannel>(ch)) return "eid";
  return "localized";
}

struct VisibilityCurve {
  std::vector<double> times;
  // one column per channel, visibility at each grid time
  std::vector<std::vector<double>> visibility;
  std::vector<std::string> labels;
};

inline constexpr int kDefaultCurveDim = 10;

/// One integration per channel from (|0>+|1>)/sqrt(2), sampled on t_grid.
/// t_grid must be sorted ascending and positive.
inline VisibilityCurve visibility_curve(const devices::DeviceParams& device,
                                        const std::vector<Channel>& channels,
                                        const std::vector<double>& t_grid,
                                        int dim = kDefaultCurveDim) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] <= 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
      throw Error("visibility_curve: t_grid must be sorted and positive");
  }
  const auto derived = devices::derive(device);
  VisibilityCurve out;
  out.times = t_grid;
  if (t_grid.empty()) return out;

  const Matrix rho0 = plus_state_density(dim);
  for (const auto& ch : channels) {
    if (std::holds_alternative<NoChannel>(ch)) {
      out.visibility.emplace_back(t_grid.size(), 1.0);
      out.labels.push_back(channel_name(ch));
      continue;
    }
    Rhs rhs;
    double rate = derived.omega_m;
    if (const auto* eid = std::get_if<EidChannel>(&ch)) {
      auto gen = std::make_shared<EidGenerator>(derived.omega_m, device.m,
                                                device.Q_m, eid->T_env, dim);
      rate = gen->max_rate();
      rhs = [gen](const Matrix& r) { return (*gen)(r); };
    } else {
      const auto& loc = std::get<LocalizedChannel>(ch);
      auto gen = std::make_shared<LocalizedGenerator>(
          loc.Lambda, derived.x0, dim, derived.omega_m);
      rate = gen->max_rate();
      rhs = [gen](const Matrix& r) { return (*gen)(r); };
    }

    const double dt = default_timestep(rate);

    std::vector<double> column;
    column.reserve(t_grid.size());
    Matrix rho = rho0;
    double t = 0.0;
    for (double target : t_grid) {
      const double span = target - t;
      const long steps = std::max(1L, long(std::ceil(span / dt)));
      const double h = span / double(steps);
      for (long s = 0; s < steps; ++s) {
        const Matrix k1 = rhs(rho);
        const Matrix k2 = rhs(rho + (0.5 * h) * k1);
        const Matrix k3 = rhs(rho + (0.5 * h) * k2);
        const Matrix k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t = target;
      column.push_back(visibility(rho));
    }
    out.visibility.push_back(std::move(column));
    out.labels.push_back(channel_name(ch));
  }
  return out;
}

}  // namespace nestif::dynamics
