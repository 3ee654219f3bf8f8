#include "fstkit/serialization.hpp"

#include <doctest.h>

#include <cmath>

using namespace fst;
using namespace fst::io;

TEST_CASE("angle parsing") {
  CHECK(parse_angle("pi") == doctest::Approx(kPi));
  CHECK(parse_angle("0.5pi") == doctest::Approx(kPi / 2));
  CHECK(parse_angle("-0.25pi") == doctest::Approx(-kPi / 4));
  CHECK(parse_angle("1.25") == 1.25);
  CHECK_THROWS_AS(parse_angle("half"), ConfigError);
  json j = {{"theta", "0.3pi"}, {"x", 2.0}};
  CHECK(parse_angle(j, "theta") == doctest::Approx(0.3 * kPi));
  CHECK(parse_angle(j, "x") == 2.0);
  CHECK_THROWS_AS(parse_angle(j, "missing"), ConfigError);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, kPi, 1e-300, -2.5e17}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("chain spec") {
  const auto s = chain_spec_from_json(json{{"n_sites", 5}, {"theta", "0.5pi"}, {"j_max", 2.0}});
  CHECK(s.n_sites == 5);
  CHECK(s.j_max.value() == 2.0);
  CHECK_FALSE(s.tau.has_value());
  CHECK_THROWS_AS(chain_spec_from_json(json{{"theta", 1.0}}), ConfigError);
  chain::ChainSpec t;
  t.n_sites = 4;
  t.theta = 1.0;
  t.tau = 1.0;
  const json out = to_json(chain::synthesize(t));
  CHECK(out["couplings"].size() == 3);
}

TEST_CASE("circuit round trip") {
  const auto c = gates::compile_decomposition(5, 1.0, 1.0);
  const auto d = circuit_from_json(to_json(c));
  CHECK(d.n_sites == 5);
  CHECK(d.gate_count() == c.gate_count());
  CHECK(d.total_duration() == doctest::Approx(c.total_duration()).epsilon(1e-15));
  CHECK(max_abs(gates::circuit_unitary(d).matrix - gates::circuit_unitary(c).matrix) < 1e-15);
}

TEST_CASE("state round trip") {
  ComplexVector v(4);
  v << cplx(0.5, 0), cplx(0, 0.5), cplx(-0.5, 0), cplx(0, -0.5);
  const fermion::StateVector s{2, v};
  const auto r = state_from_json(state_to_json(s));
  CHECK(r.n_sites == 2);
  CHECK((r.amplitudes - v).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(state_from_json(json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0}),
                                               json::array({0.0, 0.0})})),
                  ConfigError);
}

TEST_CASE("scenario round trip") {
  protocols::Scenario s;
  s.n_sites = 9;
  s.theta = kPi / 2;
  s.excitations = fermion::OccupationSubset({1, 5});
  s.events = {{1.0, protocols::EventKind::XFlip, 5, 0.0}, {2.0, protocols::EventKind::Measure, 0, 0.0}};
  const auto r = scenario_from_json(to_json(s));
  CHECK(r.n_sites == 9);
  CHECK(r.excitations.sites() == s.excitations.sites());
  REQUIRE(r.events.size() == 2);
  CHECK(r.events[0].kind == protocols::EventKind::XFlip);
  CHECK(r.events[0].site == 5);
  CHECK(r.events[1].t == 2.0);
}

TEST_CASE("device spec and pulse") {
  const auto ref = device::DeviceSpec::reference();
  const auto back = device_spec_from_json(to_json(ref));
  CHECK(back.w1 == doctest::Approx(ref.w1).epsilon(1e-12));
  CHECK(back.g23 == doctest::Approx(ref.g23).epsilon(1e-12));
  CHECK(back.phi_dc2 == ref.phi_dc2);
  const auto partial = device_spec_from_json(json{{"w1", 5.1}});
  CHECK(partial.w1 == doctest::Approx(5.1 * device::kTwoPiGHz).epsilon(1e-14));
  CHECK(partial.w2 == ref.w2);
  CHECK(to_json(ref)["w1"].get<double>() == 5.05);

  device::PulseConfig p;
  p.amp1 = 0.1;
  p.wd2 = 2 * kPi * 80e6;
  const auto q = pulse_from_json(to_json(p));
  CHECK(q.amp1 == 0.1);
  CHECK(q.wd2 == doctest::Approx(p.wd2).epsilon(1e-12));
  CHECK(q.gate_time == p.gate_time);
}

TEST_CASE("csv headers") {
  CHECK(speed_csv({}).rfind("N,parity,theta,", 0) == 0);
  CHECK(trace_csv({}).rfind("eval,infidelity,leakage", 0) == 0);
  protocols::PopulationRow row{0.0, {1.0, 0.0}};
  CHECK(populations_csv({row}, 2) == "t,p_1,p_2\n0,1,0\n");
}
