#include <catch2/catch_amalgamated.hpp>
#include <complex>
#include <random>

#include "nestif/constants.hpp"
#include "nestif/fock.hpp"

using namespace nestif;
using namespace nestif::fock;
using namespace std::complex_literals;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Complex random_amplitude(std::mt19937_64& rng, double max_mod) {
  std::uniform_real_distribution<double> mod(0.0, max_mod);
  std::uniform_real_distribution<double> arg(0.0, 2.0 * M_PI);
  return std::polar(mod(rng), arg(rng));
}

}  // namespace

TEST_CASE("annihilation operator basics", "[fock]") {
  const Matrix c = annihilation(2);
  Vector one = Vector::Zero(2);
  one(1) = 1.0;
  CHECK_THAT(std::abs((c * one)(0) - 1.0), WithinAbs(0.0, 1e-15));

  const Matrix n = Matrix(annihilation(5).adjoint()) * annihilation(5);
  for (int k = 0; k < 5; ++k) {
    CHECK_THAT(std::abs(n(k, k) - double(k)), WithinAbs(0.0, 1e-14));
  }

  CHECK_THROWS_AS(annihilation(1), Error);
}

TEST_CASE("commutator defect only at the truncation edge", "[fock]") {
  const int dim = 12;
  const Matrix c = annihilation(dim);
  const Matrix comm = c * Matrix(c.adjoint()) - Matrix(c.adjoint()) * c;
  for (int n = 0; n < dim - 1; ++n)
    CHECK_THAT(std::abs(comm(n, n) - 1.0), WithinAbs(0.0, 1e-13));
  CHECK_THAT(std::abs(comm(dim - 1, dim - 1) + double(dim - 1)),
             WithinAbs(0.0, 1e-12));
}

TEST_CASE("coherent state construction", "[fock]") {
  SECTION("vacuum case is exact") {
    const Vector v = coherent_state(0.0, 8);
    CHECK(v(0) == Complex(1.0, 0.0));
    CHECK(v.tail(7).norm() == 0.0);
  }

  SECTION("eigenrelation c|g> = g|g>") {
    const Vector v = coherent_state(0.5, 40);
    const Vector cv = annihilation(40) * v;
    for (int n = 0; n < 39; ++n)
      CHECK_THAT(std::abs(cv(n) - 0.5 * v(n)), WithinAbs(0.0, 1e-9));
  }

  SECTION("amplitude ratio structure") {
    const Vector v = coherent_state(1.0, 30);
    CHECK_THAT(std::abs(v(1) / v(0) - 1.0), WithinAbs(0.0, 1e-12));
  }

  SECTION("overlap law |<b|g>|^2 = exp(-|b-g|^2)") {
    const Vector b = coherent_state(0.3, 40);
    const Vector g = coherent_state(0.7i, 40);
    const double got = std::norm(b.dot(g));
    CHECK_THAT(got, WithinAbs(std::exp(-std::norm(0.3 - 0.7i)), 1e-8));
  }

  SECTION("inadequate truncation is refused with the measured tail") {
    try {
      coherent_state(3.0, 10);
      FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
      CHECK(e.tail_mass > 1e-8);
    }
  }
}

TEST_CASE("coherent state properties over random amplitudes", "[fock]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const Complex gamma = random_amplitude(rng, 2.0);
    const Complex beta = random_amplitude(rng, 2.0);
    const int dim = 40;
    const Vector vg = coherent_state(gamma, dim);
    const Vector vb = coherent_state(beta, dim);

    // eigenrelation
    CHECK((annihilation(dim) * vg - gamma * vg).norm() <= 1e-7);
    // overlap law
    CHECK_THAT(std::norm(vb.dot(vg)),
               WithinAbs(std::exp(-std::norm(beta - gamma)), 1e-7));
  }
}

TEST_CASE("quantum-added coherent state", "[fock]") {
  SECTION("gamma = 0 reduces to |1>") {
    const Vector v = added_coherent_state(0.0, 8);
    CHECK(std::abs(v(1)) == 1.0);
    CHECK(std::abs(v(0)) == 0.0);
  }

  SECTION("normalized at complex gamma") {
    const Vector v = added_coherent_state(0.9 + 0.2i, 40);
    CHECK_THAT(v.norm(), WithinAbs(1.0, 1e-9));
    CHECK(std::abs(v(0)) == 0.0);
  }

  SECTION("<g,1|cdag|g> = sqrt(|g|^2+1)") {
    const int dim = 40;
    const Vector added = added_coherent_state(0.5, dim);
    const Vector raised = Matrix(annihilation(dim).adjoint()) *
                          coherent_state(0.5, dim);
    CHECK_THAT(std::abs(added.dot(raised)),
               WithinAbs(std::sqrt(1.25), 1e-8));
  }

  SECTION("equals normalize(cdag |gamma>) elementwise") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const Complex gamma = random_amplitude(rng, 1.5);
      const int dim = 40;
      const Vector direct = added_coherent_state(gamma, dim);
      Vector via = Matrix(annihilation(dim).adjoint()) *
                   coherent_state(gamma, dim);
      via.normalize();
      CHECK((direct - via).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("displacement operator", "[fock]") {
  const int dim = 40;

  SECTION("D(0) is the identity") {
    CHECK((displacement(0.0, dim) - Matrix::Identity(dim, dim))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }

  SECTION("D(eta)|0> is the coherent state |eta>") {
    const Complex eta = 0.4 - 0.1i;
    Vector vac = Vector::Zero(dim);
    vac(0) = 1.0;
    const Vector displaced = displacement(eta, dim) * vac;
    const double fidelity = std::norm(coherent_state(eta, dim).dot(displaced));
    CHECK(fidelity >= 1.0 - 1e-8);
  }

  SECTION("D(eta) D(-eta) is the identity on the interior block") {
    const Complex eta = 0.3 + 0.2i;
    const Matrix prod = displacement(eta, dim) * displacement(-eta, dim);
    const int interior = dim / 2;
    CHECK((prod.topLeftCorner(interior, interior) -
           Matrix::Identity(interior, interior))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
  }

  SECTION("composition law with the Weyl phase") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 8; ++trial) {
      const Complex a = random_amplitude(rng, 1.0);
      const Complex b = random_amplitude(rng, 1.0);
      const Matrix lhs = displacement(a, dim) * displacement(b, dim);
      const Matrix rhs = std::exp(Complex(0.0, std::imag(a * std::conj(b)))) *
                         displacement(a + b, dim);
      const int interior = dim / 2;
      CHECK((lhs - rhs).topLeftCorner(interior, interior).cwiseAbs()
                .maxCoeff() <= 1e-7);
    }
  }
}

TEST_CASE("quadrature operators", "[fock]") {
  const int dim = 30;
  const double x0 = 2.5e-15;
  const Matrix x = position_operator(dim, x0);
  const Matrix p = momentum_operator(dim, x0);

  SECTION("vacuum position variance is x0^2") {
    Vector vac = Vector::Zero(dim);
    vac(0) = 1.0;
    const double var = std::real(vac.dot(x * (x * vac)));
    CHECK_THAT(var, WithinRel(x0 * x0, 1e-12));
  }

  SECTION("<g|x|g> = 2 x0 Re(g)") {
    const Vector g = coherent_state(0.5, dim);
    CHECK_THAT(std::real(g.dot(x * g)), WithinAbs(2.0 * x0 * 0.5, 1e-8 * x0));
  }

  SECTION("canonical commutator on the interior") {
    const Matrix comm = x * p - p * x;
    const Complex expected(0.0, constants().hbar);
    for (int n = 0; n < dim - 1; ++n)
      CHECK(std::abs(comm(n, n) - expected) <= 1e-12 * constants().hbar);
  }
}

TEST_CASE("recommended truncation rule", "[fock]") {
  CHECK(recommended_dim(0.0) == 10);
  const int dim = recommended_dim(2.0);
  CHECK(dim >= 30);
  CHECK_NOTHROW(coherent_state(2.0, dim));
}
