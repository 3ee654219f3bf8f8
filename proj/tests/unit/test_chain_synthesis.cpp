#include "fstkit/chain_synthesis.hpp"

#include <doctest.h>

#include <cmath>

using namespace fst;
using namespace fst::chain;

namespace {

ChainParams make(int n, double theta, double tau = 1.0) {
  ChainSpec s;
  s.n_sites = n;
  s.theta = theta;
  s.tau = tau;
  return synthesize(s);
}

}  // namespace

TEST_CASE("two sites rotate by theta/2 per unit time") {
  for (double theta : {0.1, 1.0, kPi / 2, kPi}) {
    const auto p = make(2, theta, 2.0);
    REQUIRE(p.couplings.size() == 1);
    CHECK(p.couplings[0] == doctest::Approx(theta / 4.0).epsilon(1e-14));
    CHECK(p.detunings[0] == 0.0);
    CHECK(p.detunings[1] == 0.0);
  }
}

TEST_CASE("three sites at a quarter turn") {
  const auto p = make(3, kPi / 2);
  const double j = kPi * std::sqrt(6.0) / 4.0;
  CHECK(p.couplings[0] == doctest::Approx(j).epsilon(1e-14));
  CHECK(p.couplings[1] == doctest::Approx(j).epsilon(1e-14));
  CHECK(p.detunings[0] == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(p.detunings[1] == doctest::Approx(-3 * kPi / 4).epsilon(1e-14));
  CHECK(p.detunings[2] == doctest::Approx(kPi / 4).epsilon(1e-14));
  // Middle-minus-outer detuning equals -2(pi - theta)/tau.
  CHECK(p.detunings[1] - p.detunings[0] == doctest::Approx(-kPi).epsilon(1e-14));
}

TEST_CASE("theta = pi gives the PST profile") {
  for (int n = 2; n <= 30; ++n) {
    const double tau = 0.7;
    const auto p = make(n, kPi, tau);
    for (int k = 1; k < n; ++k) {
      const double expect = kPi / (2 * tau) * std::sqrt(double(k) * (n - k));
      CHECK(std::abs(p.couplings[k - 1] - expect) <= 1e-12 * expect);
    }
    for (double d : p.detunings) CHECK(std::abs(d - p.detunings[0]) < 1e-12);
  }
}

TEST_CASE("mirror symmetry, positivity and even-chain detunings") {
  for (int n = 2; n <= 25; ++n)
    for (double theta : {0.01, 0.3, 1.0, 2.0, 3.0, kPi}) {
      const auto p = make(n, theta, 1.3);
      for (int k = 1; k < n; ++k) {
        CHECK(p.couplings[k - 1] > 0.0);
        CHECK(std::abs(p.couplings[k - 1] - p.couplings[n - k - 1]) <= 1e-12 * p.couplings[k - 1]);
      }
      for (int k = 1; k <= n; ++k) {
        CHECK(std::abs(p.detunings[k - 1] - p.detunings[n - k]) <= 1e-12 * (1.0 + std::abs(p.detunings[k - 1])));
        if (n % 2 == 0) CHECK(p.detunings[k - 1] == 0.0);
      }
      const RealMatrix h = p.single_excitation_hamiltonian();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(h(i, j) == doctest::Approx(h(n - 1 - j, n - 1 - i)));
    }
}

TEST_CASE("coupling monotonicity in theta") {
  for (int n = 3; n <= 12; ++n) {
    for (double theta = 0.05; theta < kPi - 0.05; theta += 0.05) {
      const auto a = coupling_time_products(n, theta);
      const auto b = coupling_time_products(n, theta + 1e-4);
      for (int k = 1; k < n; ++k) {
        const double d = b[k - 1] - a[k - 1];
        if (n % 2 == 1 || k == n / 2)
          CHECK(d >= -1e-12);
        else
          CHECK(d <= 1e-12);
      }
    }
  }
}

TEST_CASE("gate time from j_max") {
  ChainSpec s;
  s.j_max = 2.0;
  s.theta = kPi;
  for (int n = 2; n <= 20; ++n) {
    s.n_sites = n;
    const double expect = n % 2 == 0 ? n * kPi / (4 * 2.0) : std::sqrt(n * n - 1.0) * kPi / (4 * 2.0);
    CHECK(solve_gate_time(s) == doctest::Approx(expect).epsilon(1e-13));
  }
  s.j_max = 1.0;
  s.n_sites = 3;
  s.theta = kPi / 2;
  CHECK(solve_gate_time(s) == doctest::Approx(1.9238).epsilon(1e-4));
  CHECK(solve_gate_time(s) == doctest::Approx(kPi * std::sqrt(6.0) / 4).epsilon(1e-14));

  const auto p = synthesize(s);
  CHECK(p.max_coupling() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gate time stays under the closed-form bound") {
  for (int n = 2; n <= 40; ++n)
    for (int i = 1; i <= 60; ++i) {
      ChainSpec s;
      s.n_sites = n;
      s.theta = kPi * i / 60.0;
      s.j_max = 1.0;
      CHECK(solve_gate_time(s) <= gate_time_upper_bound(n, 1.0) * (1 + 1e-12));
    }
}

TEST_CASE("detuning range reports both readings") {
  const auto r3 = detuning_range(make(3, kPi / 2));
  CHECK(r3.direct == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(r3.formula == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK_FALSE(r3.agrees);

  const auto r4 = detuning_range(make(4, 1.0));
  CHECK(r4.direct == 0.0);
  CHECK(r4.formula == 0.0);
  CHECK(r4.agrees);

  const auto r5 = detuning_range(make(5, kPi));
  CHECK(r5.direct == doctest::Approx(0.0));
  CHECK(r5.agrees);
}

TEST_CASE("spectrum conditions") {
  SUBCASE("two sites") {
    const auto r = spectrum_check(make(2, 1.2, 2.0));
    CHECK(r.ok());
    CHECK(r.eigenvalues(0) == doctest::Approx(-0.3));
    CHECK(r.eigenvalues(1) == doctest::Approx(0.3));
    CHECK(r.phase == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("PST chain is equally spaced") {
    const auto r = spectrum_check(make(9, kPi, 1.0));
    CHECK(r.ok());
    for (int i = 0; i + 1 < 9; ++i) CHECK(r.eigenvalues(i + 1) - r.eigenvalues(i) == doctest::Approx(kPi));
  }
  SUBCASE("alternating gaps") {
    const auto r = spectrum_check(make(5, kPi / 2, 1.0));
    CHECK(r.ok());
    for (int i = 0; i + 1 < 5; ++i) {
      const double g = std::fmod(r.eigenvalues(i + 1) - r.eigenvalues(i), kTwoPi);
      CHECK((std::abs(g - kPi / 2) < 1e-8 || std::abs(g - 3 * kPi / 2) < 1e-8));
    }
    for (int i = 0; i + 1 < 5; ++i) CHECK(r.mirror_parity[i] == -r.mirror_parity[i + 1]);
  }
  SUBCASE("grid") {
    for (int n = 2; n <= 16; ++n)
      for (double theta : {0.1, 0.7, 1.5, 2.5, kPi}) CHECK(spectrum_check(make(n, theta)).ok());
  }
  SUBCASE("broken chain reports the failure") {
    auto p = make(6, 1.0);
    p.couplings[0] *= 1.1;
    p.couplings[4] *= 1.1;
    const auto r = spectrum_check(p);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.failure.empty());
  }
}

TEST_CASE("invalid specs") {
  ChainSpec s;
  s.n_sites = 1;
  s.tau = 1.0;
  CHECK_THROWS_AS(synthesize(s), ValidationError);
  s.n_sites = 4;
  s.theta = 0.0;
  CHECK_THROWS_AS(synthesize(s), ValidationError);
  s.theta = 4.0;
  CHECK_THROWS_AS(synthesize(s), ValidationError);
  s.theta = 1.0;
  s.j_max = 1.0;
  CHECK_THROWS_AS(synthesize(s), ValidationError);
  s.tau.reset();
  s.j_max = -1.0;
  CHECK_THROWS_AS(synthesize(s), ValidationError);
  CHECK_THROWS_AS(coupling_time_products(4, 3.0 * kPi), std::domain_error);
}
