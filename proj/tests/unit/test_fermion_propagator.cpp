#include "fstkit/fermion_propagator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fst;
using namespace fst::fermion;

namespace {

chain::ChainParams make(int n, double theta, double tau = 1.0) {
  chain::ChainSpec s;
  s.n_sites = n;
  s.theta = theta;
  s.tau = tau;
  return chain::synthesize(s);
}

// Excitation-number operator, diagonal.
RealVector number_diagonal(int n) {
  RealVector d(1 << n);
  for (int x = 0; x < (1 << n); ++x) d(x) = popcount(x);
  return d;
}

ComplexVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexVector v(1 << n);
  for (auto& a : v) a = {g(rng), g(rng)};
  return v.normalized();
}

}  // namespace

TEST_CASE("two-site propagator at tau") {
  const auto u = single_propagator(make(2, kPi / 2), 1.0);
  const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
  CHECK(std::abs(u.matrix(0, 0) - cplx(c, 0)) < 1e-14);
  CHECK(std::abs(u.matrix(1, 0) - cplx(0, -s)) < 1e-14);
  CHECK(std::abs(u.matrix(0, 1) - cplx(0, -s)) < 1e-14);
  CHECK(std::abs(u.matrix(1, 1) - cplx(c, 0)) < 1e-14);
  CHECK(extract_transfer_phase(u, kPi / 2).phi == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("propagator at t = 0 is the identity") {
  const auto u = single_propagator(make(7, 1.1), 0.0);
  CHECK(max_abs(u.matrix - ComplexMatrix::Identity(7, 7)) < 1e-14);
}

TEST_CASE("FST structure of the single-particle propagator") {
  for (int n = 2; n <= 16; ++n)
    for (double theta : {0.2, 1.0, kPi / 2, 2.5, kPi}) {
      const auto u = single_propagator(make(n, theta, 0.9), 0.9);
      CHECK(max_abs(u.matrix.adjoint() * u.matrix - ComplexMatrix::Identity(n, n)) < 1e-10);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double a = std::abs(u.matrix(i, j));
          if (i == j && i == n - 1 - j)
            CHECK(a == doctest::Approx(1.0).epsilon(1e-8));
          else if (i == j)
            CHECK(std::abs(a - std::cos(theta / 2)) < 1e-8);
          else if (i == n - 1 - j)
            CHECK(std::abs(a - std::sin(theta / 2)) < 1e-8);
          else
            CHECK(a < 1e-8);
        }
      const auto ph = extract_transfer_phase(u, theta);
      if (n % 2 == 1) {
        REQUIRE(ph.middle_phase_error.has_value());
        CHECK(*ph.middle_phase_error < 1e-8);
      }
    }
}

TEST_CASE("N = 15 quarter turn splits the edge excitation") {
  const auto u = single_propagator(make(15, kPi / 2), 1.0);
  CHECK(std::norm(u.matrix(0, 0)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::norm(u.matrix(14, 0)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("PST propagator is a phased antidiagonal") {
  const auto u = single_propagator(make(9, kPi), 1.0);
  const double phi = extract_transfer_phase(u, kPi).phi;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      const cplx expect = i == 8 - j ? std::exp(-kI * phi) * cplx(0, -1) : cplx(0, 0);
      CHECK(std::abs(u.matrix(i, j) - expect) < 1e-9);
    }
}

TEST_CASE("lift of the identity and of the full iSWAP") {
  const auto id = lift_to_full(ComplexMatrix::Identity(4, 4));
  CHECK(max_abs(id.matrix - ComplexMatrix::Identity(16, 16)) < 1e-15);

  ComplexMatrix sw(2, 2);
  sw << 0.0, cplx(0, -1), cplx(0, -1), 0.0;
  const auto full = lift_to_full(sw);
  // det of the exchange block: (-i)(-i) enters with a minus sign.
  CHECK(std::abs(full.matrix(3, 3) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(full.matrix(1, 2) - cplx(0, -1)) < 1e-15);
  CHECK(std::abs(full.matrix(0, 0) - cplx(1, 0)) < 1e-15);
}

TEST_CASE("determinant lift equals the dense exponential") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> th(0.05, kPi), tt(0.0, 2.5);
  std::uniform_int_distribution<int> nn(2, 8);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = nn(rng);
    const double theta = th(rng), t = tt(rng);
    const auto p = make(n, theta, 1.0);
    const auto lift = lift_to_full(single_propagator(p, t));
    const auto dense = dense_oracle(p, t);
    CHECK(max_abs(lift.matrix - dense.matrix) < 1e-9);
  }
}

TEST_CASE("dense oracle conserves excitation number and is unitary") {
  for (int n = 1; n <= 8; ++n) {
    chain::ChainParams p;
    p.n_sites = n;
    p.tau = 1.0;
    p.theta = 1.0;
    for (int k = 1; k < n; ++k) p.couplings.push_back(0.3 + 0.1 * k);
    for (int k = 1; k <= n; ++k) p.detunings.push_back(0.05 * k * k);
    const auto u = dense_oracle(p, 1.7);
    const ComplexMatrix nd = number_diagonal(n).cast<cplx>().asDiagonal();
    const int dim = 1 << n;
    CHECK(max_abs(u.matrix * nd - nd * u.matrix) < 1e-9);
    CHECK(max_abs(u.matrix.adjoint() * u.matrix - ComplexMatrix::Identity(dim, dim)) < 1e-9);
    if (n == 1) {
      CHECK(std::abs(u.matrix(1, 1) - std::exp(-kI * 0.05 * 1.7)) < 1e-14);
      CHECK(std::abs(u.matrix(0, 0) - cplx(1, 0)) < 1e-14);
    }
  }
}

TEST_CASE("applied lift agrees with the full lift on dense and sparse inputs") {
  std::mt19937_64 rng(5);
  for (int n : {3, 6, 9}) {
    const auto u = single_propagator(make(n, 1.3), 0.8);
    const auto full = lift_to_full(u);
    const StateVector dense{n, random_state(n, rng)};
    CHECK(max_abs(apply_lifted(u.matrix, dense).amplitudes - full.matrix * dense.amplitudes) < 1e-12);
    const auto sparse = StateVector::basis(n, OccupationSubset({1, n}));
    CHECK(max_abs(apply_lifted(u.matrix, sparse).amplitudes - full.matrix * sparse.amplitudes) < 1e-12);
  }
}

TEST_CASE("evolve_state: methods agree, norm preserved, vacuum static") {
  std::mt19937_64 rng(9);
  const auto p = make(6, 0.9);
  const StateVector psi{6, random_state(6, rng)};
  const auto a = evolve_state(psi, p, 0.7, EvolveMethod::Lift);
  const auto b = evolve_state(psi, p, 0.7, EvolveMethod::Dense);
  CHECK(max_abs(a.amplitudes - b.amplitudes) < 1e-8);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-10));

  const auto v = evolve_state(StateVector::vacuum(6), p, 2.0, EvolveMethod::Lift);
  CHECK(std::abs(v.amplitudes(0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("split and refocus dynamics on fifteen sites") {
  const auto p = make(15, kPi / 2);
  const auto edge = StateVector::basis(15, OccupationSubset({1}));
  const auto at2 = evolve_state(edge, p, 2.0, EvolveMethod::Lift).populations();
  CHECK(at2[14] == doctest::Approx(1.0).epsilon(1e-9));

  const auto two = StateVector::basis(15, OccupationSubset({1, 8}));
  const auto at1 = evolve_state(two, p, 1.0, EvolveMethod::Lift).populations();
  CHECK(at1[7] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(at1[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(at1[14] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("bit-order conversion is an involution") {
  std::mt19937_64 rng(2);
  const StateVector psi{5, random_state(5, rng)};
  const ComplexVector lsb = psi.amplitudes_in(BitOrder::SiteOneLsb);
  const auto back = StateVector::from_amplitudes(5, lsb, BitOrder::SiteOneLsb);
  CHECK(max_abs(back.amplitudes - psi.amplitudes) == 0.0);
  const auto e = StateVector::basis(5, OccupationSubset({1}));
  CHECK(std::abs(e.amplitudes(16)) == 1.0);
  CHECK(std::abs(e.amplitudes_in(BitOrder::SiteOneLsb)(1)) == 1.0);
}

TEST_CASE("small determinant") {
  ComplexMatrix m(3, 3);
  m << 2.0, 1.0, 0.0, cplx(0, 1), 3.0, 1.0, 0.0, 1.0, 4.0;
  CHECK(std::abs(small_determinant(m) - m.determinant()) < 1e-13);
}

TEST_CASE("guards and validation") {
  CHECK_THROWS_AS(OccupationSubset({2, 1}), ValidationError);
  CHECK_THROWS_AS(OccupationSubset({0}), ValidationError);
  CHECK_THROWS_AS(lift_to_full(ComplexMatrix::Identity(13, 13)), ValidationError);
  CHECK_THROWS_AS(dense_oracle(make(11, 1.0), 1.0), ValidationError);
  CHECK_THROWS_AS(single_propagator(make(3, 1.0), -1.0), ValidationError);
  StateVector bad{3, ComplexVector::Constant(8, 1.0)};
  CHECK_THROWS_AS(evolve_state(bad, make(3, 1.0), 1.0, EvolveMethod::Lift), ValidationError);
  CHECK_THROWS_AS(apply_x(StateVector::vacuum(3), 4), ValidationError);
}
