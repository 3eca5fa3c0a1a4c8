#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <random>

#include "nestif/constants.hpp"
#include "nestif/dynamics.hpp"

using namespace nestif;
using namespace nestif::dynamics;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(n(rng), n(rng));
  return 0.5 * (a + Matrix(a.adjoint()));
}

// Dense Liouvillian tensor for d rho/dt built directly from the operator
// matrices by index bookkeeping, independent of the generator classes.
// Row/column index convention: vec(rho)_(i*dim+j) = rho_ij.
struct LiouvillianBuilder {
  int dim;
  Matrix L;

  explicit LiouvillianBuilder(int d)
      : dim(d), L(Matrix::Zero(d * d, d * d)) {}

  int idx(int i, int j) const { return i * dim + j; }

  // L += c * (A rho B)
  void add_sandwich(Complex c, const Matrix& A, const Matrix& B) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l)
            L(idx(i, j), idx(k, l)) += c * A(i, k) * B(l, j);
  }
  // L += c * (A rho)
  void add_left(Complex c, const Matrix& A) {
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k)
        for (int j = 0; j < dim; ++j)
          L(idx(i, j), idx(k, j)) += c * A(i, k);
  }
  // L += c * (rho B)
  void add_right(Complex c, const Matrix& B) {
    for (int i = 0; i < dim; ++i)
      for (int l = 0; l < dim; ++l)
        for (int j = 0; j < dim; ++j)
          L(idx(i, j), idx(i, l)) += c * B(l, j);
  }

  Eigen::VectorXcd apply(const Matrix& rho) const {
    Eigen::VectorXcd v(dim * dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) v(idx(i, j)) = rho(i, j);
    return L * v;
  }
};

LiouvillianBuilder double_commutator_liouvillian(const Matrix& x,
                                                 double coeff) {
  // -coeff [x,[x,rho]] = -coeff (x^2 rho - 2 x rho x + rho x^2)
  LiouvillianBuilder b(int(x.rows()));
  const Matrix x2 = x * x;
  b.add_left(-coeff, x2);
  b.add_right(-coeff, x2);
  b.add_sandwich(2.0 * coeff, x, x);
  return b;
}

}  // namespace

TEST_CASE("visibility of simple states", "[dynamics]") {
  CHECK_THAT(visibility(plus_state_density(4)), WithinRel(1.0, 1e-14));

  Matrix mixed = Matrix::Zero(4, 4);
  mixed(0, 0) = mixed(1, 1) = 0.5;
  CHECK(visibility(mixed) == 0.0);

  // global phase invariance
  const Matrix rho = plus_state_density(4);
  CHECK_THAT(visibility(std::exp(Complex(0, 1.234)) * rho *
                        std::exp(Complex(0, -1.234))),
             WithinRel(visibility(rho), 1e-14));
}

TEST_CASE("density validation", "[dynamics]") {
  CHECK_NOTHROW(validate_density(plus_state_density(5)));

  Matrix bad = Matrix::Zero(3, 3);
  bad(0, 0) = 0.6;
  bad(1, 1) = 0.5;
  bad(2, 2) = -0.1;
  CHECK_THROWS_AS(validate_density(bad), IntegratorError);

  Matrix nonherm = plus_state_density(3);
  nonherm(0, 2) = Complex(1e-3, 0);
  CHECK_THROWS_AS(validate_density(nonherm), IntegratorError);
}

TEST_CASE("generators are linear", "[dynamics]") {
  const int dim = 8;
  std::mt19937_64 rng(17);
  const EidGenerator eid(2.0 * M_PI * 1e5, 1e-14, 50.0, 1e-5, dim);
  const LocalizedGenerator loc(3e25, 1e-13, dim, 2.0 * M_PI * 1e5);

  for (int trial = 0; trial < 5; ++trial) {
    const Matrix r1 = random_hermitian(dim, rng);
    const Matrix r2 = random_hermitian(dim, rng);
    const Complex a(1.7, 0.0), b(-0.4, 0.0);

    const Matrix lhs_eid = eid(a * r1 + b * r2);
    const Matrix rhs_eid = a * eid(r1) + b * eid(r2);
    CHECK((lhs_eid - rhs_eid).cwiseAbs().maxCoeff() <=
          1e-12 * lhs_eid.cwiseAbs().maxCoeff());

    const Matrix lhs_loc = loc(a * r1 + b * r2);
    const Matrix rhs_loc = a * loc(r1) + b * loc(r2);
    CHECK((lhs_loc - rhs_loc).cwiseAbs().maxCoeff() <=
          1e-12 * lhs_loc.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("diffusion term matches the dense Liouvillian tensor", "[dynamics]") {
  const int dim = 6;
  const double omega = 2.0 * M_PI * 1e5, mass = 1e-14, Q = 100.0, T = 1e-5;
  const EidGenerator gen(omega, mass, Q, T, dim);
  const auto L = double_commutator_liouvillian(gen.position(),
                                               gen.diffusion_coefficient());

  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix rho = random_hermitian(dim, rng);
    const Matrix direct = gen.diffusion(rho);
    const auto flat = L.apply(rho);
    double max_diff = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        max_diff = std::max(max_diff,
                            std::abs(direct(i, j) - flat(i * dim + j)));
    CHECK(max_diff <= 1e-12 * direct.cwiseAbs().maxCoeff());
  }

  SECTION("diagonal input stays real under the diffusion term") {
    Matrix diag = Matrix::Zero(dim, dim);
    diag(0, 0) = 0.25;
    diag(1, 1) = 0.75;
    const Matrix out = gen.diffusion(diag);
    CHECK(out.imag().cwiseAbs().maxCoeff() <=
          1e-14 * out.real().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("localization term equals the diffusion term at matched coefficients",
          "[dynamics]") {
  const int dim = 10;
  const double omega = 2.0 * M_PI * 1e5, mass = 1e-14, Q = 500.0, T = 2e-5;
  const EidGenerator eid(omega, mass, Q, T, dim);
  // Same x0, Lambda = D/hbar^2; same Hamiltonian frequency.
  const LocalizedGenerator loc(eid.diffusion_coefficient(), eid.x0(), dim,
                               omega);

  std::mt19937_64 rng(31);
  const Matrix rho = random_hermitian(dim, rng);
  const Matrix d1 = eid.diffusion(rho);
  const Matrix d2 = loc.localization(rho);
  CHECK((d1 - d2).cwiseAbs().maxCoeff() <= 1e-13 * d1.cwiseAbs().maxCoeff());

  SECTION("whole trajectories coincide when damping is switched off") {
    const Matrix rho0 = plus_state_density(dim);
    auto rhs_eid = [&](const Matrix& r) {
      return eid.unitary(r) + eid.diffusion(r);
    };
    auto rhs_loc = [&](const Matrix& r) { return loc(r); };
    EvolutionSpec spec;
    spec.dt = default_timestep(eid.max_rate());
    spec.t_final = 2000.0 * spec.dt;
    spec.store_every = 500;
    const auto t1 = integrate(rho0, rhs_eid, spec);
    const auto t2 = integrate(rho0, rhs_loc, spec);
    REQUIRE(t1.states.size() == t2.states.size());
    double max_diff = 0.0;
    for (std::size_t i = 0; i < t1.states.size(); ++i)
      max_diff = std::max(
          max_diff,
          (t1.states[i] - t2.states[i]).cwiseAbs().maxCoeff());
    CHECK(max_diff <= 1e-10);
  }
}

TEST_CASE("two-site position-basis decay is exactly exponential", "[dynamics]") {
  // x = diag(x1, x2), H = 0: the off-diagonal obeys
  // rho_12(t) = exp(-Lambda (x1-x2)^2 t) rho_12(0).
  const double x1 = 2e-9, x2 = -3e-9, lambda = 1e16;
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = x1;
  x(1, 1) = x2;
  const LocalizedGenerator gen(x, lambda, Matrix::Zero(2, 2));

  Matrix rho0(2, 2);
  rho0 << 0.5, 0.5, 0.5, 0.5;
  const double rate = lambda * (x1 - x2) * (x1 - x2);

  EvolutionSpec spec;
  spec.dt = 0.01 / rate;
  spec.t_final = 1.0 / rate;  // one decay time
  spec.store_every = 10;
  const auto traj = integrate(rho0, [&](const Matrix& r) { return gen(r); },
                              spec);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double expected = 0.5 * std::exp(-rate * traj.times[i]);
    CHECK_THAT(std::abs(traj.states[i](0, 1)), WithinRel(expected, 0.01));
  }
}

TEST_CASE("coherence decay matches the Liouvillian eigendecomposition",
          "[dynamics]") {
  // H = 0, dim = 10. The Liouvillian of the pure double-commutator term is
  // Hermitian, so the trajectory has the spectral form
  // vec(rho(t)) = sum_k e^{lambda_k t} v_k <v_k, vec(rho0)>.
  const int dim = 10;
  const double x0 = 4.3e-15;
  const double lambda = 1.0 / (4.0 * x0 * x0);  // decay rate scale ~ 0.5 Hz
  const LocalizedGenerator gen(lambda, x0, dim, 0.0);
  const auto L = double_commutator_liouvillian(gen.position(), lambda);

  Eigen::SelfAdjointEigenSolver<Matrix> es(L.L);
  REQUIRE(es.info() == Eigen::Success);

  const Matrix rho0 = plus_state_density(dim);
  Eigen::VectorXcd v0(dim * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) v0(i * dim + j) = rho0(i, j);
  const Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * v0;

  EvolutionSpec spec;
  spec.dt = 0.5 * default_timestep(gen.max_rate());
  spec.t_final = 4.0;  // a few visibility decay times
  spec.store_every = 2000;
  const auto traj = integrate(rho0, [&](const Matrix& r) { return gen(r); },
                              spec);

  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    Eigen::VectorXcd vt = Eigen::VectorXcd::Zero(dim * dim);
    for (int k = 0; k < dim * dim; ++k)
      vt += std::exp(es.eigenvalues()(k) * traj.times[s]) * coeffs(k) *
            es.eigenvectors().col(k);
    const double v_spectral = 2.0 * std::abs(vt(0 * dim + 1));
    const double v_rk4 = visibility(traj.states[s]);
    CHECK_THAT(v_rk4, WithinAbs(v_spectral, 1e-8));
  }
}

TEST_CASE("integrator basics", "[dynamics]") {
  const int dim = 5;
  const Matrix rho0 = plus_state_density(dim);

  SECTION("zero generator is the identity map") {
    EvolutionSpec spec;
    spec.dt = 0.1;
    spec.t_final = 1.0;
    const auto traj =
        integrate(rho0, [](const Matrix& r) { return Matrix::Zero(r.rows(), r.cols()); }, spec);
    CHECK((traj.final_state() - rho0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(traj.max_trace_drift == 0.0);
  }

  SECTION("unitary evolution returns after one mechanical period") {
    const double omega = 2.0 * M_PI * 1e5;
    const LocalizedGenerator gen(0.0, 1e-13, dim, omega);
    EvolutionSpec spec;
    spec.dt = default_timestep(gen.max_rate());
    const long steps = std::lround((2.0 * M_PI / omega) / spec.dt);
    spec.dt = (2.0 * M_PI / omega) / double(steps);  // land exactly on T
    spec.t_final = 2.0 * M_PI / omega;
    spec.store_every = steps;
    const auto traj = integrate(rho0, [&](const Matrix& r) { return gen(r); },
                                spec);
    const double fidelity =
        std::real((traj.final_state() * rho0).trace());
    CHECK(fidelity >= 1.0 - 1e-8);
    CHECK(traj.max_trace_drift <= 1e-12);
    CHECK(traj.max_hermiticity_defect <= 1e-12);
  }

  SECTION("order of accuracy: halving dt shrinks the error ~16x") {
    const double omega = 2.0 * M_PI * 1e5;
    const LocalizedGenerator gen(2e24, 1e-13, dim, omega);
    auto run = [&](double dt) {
      EvolutionSpec spec;
      spec.dt = dt;
      spec.t_final = 512.0 / gen.max_rate();
      spec.store_every = 1 << 20;
      return integrate(rho0, [&](const Matrix& r) { return gen(r); }, spec)
          .final_state();
    };
    const double dt0 = 1.0 / gen.max_rate();
    const Matrix r1 = run(dt0);
    const Matrix r2 = run(dt0 / 2.0);
    const Matrix r4 = run(dt0 / 4.0);
    const double e1 = (r1 - r2).cwiseAbs().maxCoeff();
    const double e2 = (r2 - r4).cwiseAbs().maxCoeff();
    REQUIRE(e2 > 0.0);
    const double order_ratio = e1 / e2;
    CHECK(order_ratio > 8.0);
    CHECK(order_ratio < 32.0);
  }

  SECTION("trace-violating dynamics aborts") {
    EvolutionSpec spec;
    spec.dt = 0.01;
    spec.t_final = 10.0;
    CHECK_THROWS_AS(
        integrate(rho0, [](const Matrix& r) { return Matrix(0.1 * r); }, spec),
        IntegratorError);
  }

  SECTION("positivity-violating dynamics aborts") {
    const LocalizedGenerator gen(5e24, 1e-13, dim, 0.0);
    EvolutionSpec spec;
    const double rate = gen.max_rate();
    spec.dt = 0.01 / rate;
    spec.t_final = 40.0 / rate;
    spec.store_every = 1 << 20;
    // wrong-sign localization amplifies coherences past positivity
    CHECK_THROWS_AS(
        integrate(rho0,
                  [&](const Matrix& r) { return Matrix(-gen.localization(r)); },
                  spec),
        IntegratorError);
  }
}

TEST_CASE("EID trace and hermiticity drift per step", "[dynamics]") {
  const double omega = 2.0 * M_PI * 3e5;
  const EidGenerator gen(omega, 1e-12, 2e4, 1e-3, 10);
  EvolutionSpec spec;
  spec.dt = default_timestep(gen.max_rate());
  const long steps = 5000;
  spec.t_final = double(steps) * spec.dt;
  spec.store_every = steps;
  const auto traj = integrate(plus_state_density(10),
                              [&](const Matrix& r) { return gen(r); }, spec);
  CHECK(traj.max_trace_drift / double(steps) <= 1e-9);
  CHECK(traj.max_hermiticity_defect <= 1e-10);
}

TEST_CASE("EID visibility decay at the 300 kHz device", "[dynamics][slow]") {
  // 1 mK environment. The 1/e time of the interference visibility must sit
  // within a factor 3 of tau_EID; the measured factor (~0.65) is reported.
  const auto& dev = *devices::find_builtin("proposed1");
  const auto derived = devices::derive(dev);
  const double T_env = 1e-3;
  const double tau_eid = decoherence::eid_timescale(dev.Q_m, T_env);

  const int dim = 12;
  const EidGenerator gen(derived.omega_m, dev.m, dev.Q_m, T_env, dim);
  EvolutionSpec spec;
  spec.dt = default_timestep(gen.max_rate());
  spec.t_final = 1.5 * tau_eid;
  spec.store_every = 200;
  const auto traj = integrate(plus_state_density(dim),
                              [&](const Matrix& r) { return gen(r); }, spec);

  double t_1e = -1.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (visibility(traj.states[i]) < std::exp(-1.0)) {
      t_1e = traj.times[i];
      break;
    }
  }
  REQUIRE(t_1e > 0.0);
  const double factor = t_1e / tau_eid;
  INFO("1/e visibility time = " << factor << " tau_EID");
  CHECK(factor > 1.0 / 3.0);
  CHECK(factor < 3.0);

  SECTION("ten times colder environment decays ten times slower") {
    const EidGenerator cold(derived.omega_m, dev.m, dev.Q_m, T_env / 10.0,
                            dim);
    EvolutionSpec cspec;
    cspec.dt = default_timestep(cold.max_rate());
    cspec.t_final = 12.0 * tau_eid;
    cspec.store_every = 200;
    const auto ctraj = integrate(plus_state_density(dim),
                                 [&](const Matrix& r) { return cold(r); },
                                 cspec);
    double t_1e_cold = -1.0;
    for (std::size_t i = 0; i < ctraj.times.size(); ++i) {
      if (visibility(ctraj.states[i]) < std::exp(-1.0)) {
        t_1e_cold = ctraj.times[i];
        break;
      }
    }
    REQUIRE(t_1e_cold > 0.0);
    CHECK_THAT(t_1e_cold / t_1e, WithinRel(10.0, 0.15));
  }
}

TEST_CASE("EID steady state satisfies equipartition", "[dynamics][slow]") {
  // kB T / (hbar w) = 1.5, strong damping, from |1><1|. The moment equations
  // of this generator close, with the exact fixed point <x^2> = kB T/(m w^2);
  // only truncation and finite time perturb it.
  const double omega = 2.0 * M_PI * 1e5;
  const double mass = 1e-14;
  const double Q = 3.0;
  const double T = 1.5 * constants().hbar * omega / constants().k_B;
  const int dim = 14;

  const EidGenerator gen(omega, mass, Q, T, dim);
  Matrix rho0 = Matrix::Zero(dim, dim);
  rho0(1, 1) = 1.0;

  EvolutionSpec spec;
  spec.dt = default_timestep(gen.max_rate());
  spec.t_final = 15.0 / omega * (2.0 * M_PI);
  spec.store_every = 1 << 20;
  spec.trace_tol = 1e-6;
  const auto traj = integrate(rho0, [&](const Matrix& r) { return gen(r); },
                              spec);

  const Matrix& x = gen.position();
  const double x2 = std::real((x * x * traj.final_state()).trace());
  const double equipartition = constants().k_B * T / (mass * omega * omega);
  CHECK_THAT(x2, WithinRel(equipartition, 0.05));
}

TEST_CASE("visibility curves", "[dynamics]") {
  const auto& dev = *devices::find_builtin("proposed1");

  SECTION("no channel gives unit visibility") {
    const auto curve = visibility_curve(dev, {Channel{NoChannel{}}},
                                        {1e-5, 2e-5, 3e-5});
    REQUIRE(curve.visibility.size() == 1);
    for (double v : curve.visibility[0]) CHECK(v == 1.0);
  }

  SECTION("localized channel decays monotonically") {
    const auto derived = devices::derive(dev);
    const double lambda = 0.05 / (derived.x0 * derived.x0) / 1e-4;
    std::vector<double> grid;
    for (int i = 1; i <= 8; ++i) grid.push_back(1e-4 * i / 8.0);
    const auto curve =
        visibility_curve(dev, {Channel{LocalizedChannel{lambda}}}, grid, 8);
    REQUIRE(curve.visibility.size() == 1);
    double prev = 1.0;
    for (double v : curve.visibility[0]) {
      CHECK(v <= prev + 1e-9);
      CHECK(v >= 0.0);
      prev = v;
    }
    CHECK(prev < 1.0);
  }

  SECTION("grid validation") {
    CHECK_THROWS_AS(visibility_curve(dev, {}, {2e-5, 1e-5}), Error);
    CHECK_THROWS_AS(visibility_curve(dev, {}, {-1e-5}), Error);
  }
}
