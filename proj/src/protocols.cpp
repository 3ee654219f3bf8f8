#include "fstkit/protocols.hpp"

#include "fstkit/chain_synthesis.hpp"
#include "fstkit/gate_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace fst::protocols {

namespace {

using gates::GateKind;
using gates::GateOp;

ComplexMatrix single_qubit(GateKind kind) {
  GateOp op;
  op.kind = kind;
  return gates::gate_matrix(op, gates::AngleConvention::HalfAngle);
}

void check_normalized(const StateVector& psi, const char* what) {
  if (std::abs(psi.norm() - 1.0) > tolerances().state_norm) {
    std::ostringstream msg;
    msg << what << ": input state is not normalized (norm " << psi.norm() << ")";
    throw ValidationError(msg.str());
  }
}

chain::ChainParams pst_chain(int n_sites, double j_max) {
  chain::ChainSpec spec;
  spec.n_sites = n_sites;
  spec.theta = kPi;
  spec.j_max = j_max;
  return chain::synthesize(spec);
}

}  // namespace

std::string to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

StateVector apply_k_pi(const StateVector& psi, KMethod method, double* phi_out) {
  const int n = psi.n_sites;
  if (method == KMethod::Pairwise) {
    if (phi_out) *phi_out = 0.0;
    return gates::apply_effective_gate(n, kPi, psi);
  }
  const auto params = pst_chain(n, 1.0);
  const auto single = fermion::single_propagator(params, params.tau);
  const double phi = fermion::extract_transfer_phase(single, kPi).phi;
  if (phi_out) *phi_out = phi;
  if (method == KMethod::Dense) {
    const auto u = fermion::dense_oracle(params, params.tau);
    const ComplexVector fix = gates::phase_fix_diagonal(n, kPi, phi);
    return {n, u.matrix * fix.asDiagonal() * psi.amplitudes};
  }
  return fermion::apply_lifted(fermion::phase_fixed(single, kPi, phi), psi);
}

ParityProtocolResult parity_measure(const StateVector& psi, const ParityOptions& opts) {
  check_normalized(psi, "parity_measure");
  const int n = psi.n_sites;
  const int ext = n + 2;
  if (ext > tolerances().limits.lift_max_sites) {
    std::ostringstream msg;
    msg << "parity_measure: N+2=" << ext << " exceeds size guard "
        << tolerances().limits.lift_max_sites;
    throw ValidationError(msg.str());
  }
  if (!(opts.j_max > 0.0)) throw ValidationError("parity_measure: j_max must be > 0");

  StateVector state{ext, ComplexVector::Zero(Eigen::Index{1} << ext)};
  for (Eigen::Index x = 0; x < psi.amplitudes.size(); ++x) state.amplitudes(x << 1) = psi.amplitudes(x);

  ParityProtocolResult res;
  gates::apply_local(state.amplitudes, ext, single_qubit(GateKind::HalfY), {ext, 0}, 1);
  state = apply_k_pi(state, opts.method, &res.transfer_phase);
  gates::apply_local(state.amplitudes, ext, single_qubit(GateKind::HalfX), {1, 0}, 1);

  const std::uint64_t left = site_bit(ext, 1);
  double p1 = 0.0;
  for (Eigen::Index x = 0; x < state.amplitudes.size(); ++x)
    if (static_cast<std::uint64_t>(x) & left) p1 += std::norm(state.amplitudes(x));
  res.left_ancilla_one_probability = p1;
  res.inferred_parity = p1 >= 0.5 ? Parity::Even : Parity::Odd;
  const double tol = tolerances().parity_definite;
  res.definite = p1 <= tol || p1 >= 1.0 - tol;
  res.post_state = std::move(state);
  res.nominal_duration = (ext / 2.0) * gates::gate_duration(GateKind::ISwapTheta, kPi, opts.j_max);
  chain::ChainSpec spec;
  spec.n_sites = ext;
  spec.theta = kPi;
  spec.j_max = opts.j_max;
  res.fst_duration = chain::solve_gate_time(spec);
  return res;
}

StateVector middle_register(const StateVector& extended, int left_outcome) {
  const int ext = extended.n_sites;
  const int n = ext - 2;
  if (n < 1) throw ValidationError("middle_register: extended state needs at least 3 sites");
  const std::uint64_t left = site_bit(ext, 1);
  const std::uint64_t mid_mask = (std::uint64_t{1} << n) - 1;
  std::array<ComplexVector, 2> branch{ComplexVector::Zero(Eigen::Index{1} << n),
                                      ComplexVector::Zero(Eigen::Index{1} << n)};
  for (Eigen::Index xi = 0; xi < extended.amplitudes.size(); ++xi) {
    const std::uint64_t x = static_cast<std::uint64_t>(xi);
    if (((x & left) != 0) != (left_outcome == 1)) continue;
    branch[x & 1](static_cast<Eigen::Index>((x >> 1) & mid_mask)) = extended.amplitudes(xi);
  }
  const int pick = branch[1].norm() > branch[0].norm() ? 1 : 0;
  const double norm = branch[pick].norm();
  if (norm == 0.0) throw ValidationError("middle_register: projected branch has zero weight");
  return {n, branch[pick] / norm};
}

std::vector<Pauli> parse_paulis(const std::string& s) {
  std::vector<Pauli> out;
  for (char c : s) {
    switch (c) {
      case 'X': case 'x': out.push_back(Pauli::X); break;
      case 'Y': case 'y': out.push_back(Pauli::Y); break;
      case 'Z': case 'z': out.push_back(Pauli::Z); break;
      default: throw ValidationError(std::string("unknown Pauli '") + c + "'");
    }
  }
  return out;
}

double correlator_measure(const StateVector& psi, const std::vector<Pauli>& paulis,
                          const ParityOptions& opts) {
  if (static_cast<int>(paulis.size()) != psi.n_sites)
    throw ValidationError("correlator_measure: need one Pauli per site");
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix h(2, 2), hsdg(2, 2);
  h << r, r, r, -r;
  hsdg << r, -kI * r, r, kI * r;
  StateVector rotated = psi;
  for (int s = 1; s <= psi.n_sites; ++s) {
    if (paulis[s - 1] == Pauli::X) gates::apply_local(rotated.amplitudes, psi.n_sites, h, {s, 0}, 1);
    if (paulis[s - 1] == Pauli::Y) gates::apply_local(rotated.amplitudes, psi.n_sites, hsdg, {s, 0}, 1);
  }
  const auto res = parity_measure(rotated, opts);
  return 1.0 - 2.0 * (1.0 - res.left_ancilla_one_probability);
}

double pauli_expectation(const StateVector& psi, const std::vector<Pauli>& paulis) {
  if (static_cast<int>(paulis.size()) != psi.n_sites)
    throw ValidationError("pauli_expectation: need one Pauli per site");
  ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, -kI, kI, 0;
  z << 1, 0, 0, -1;
  ComplexVector phi = psi.amplitudes;
  for (int s = 1; s <= psi.n_sites; ++s) {
    const ComplexMatrix& m = paulis[s - 1] == Pauli::X ? x : paulis[s - 1] == Pauli::Y ? y : z;
    gates::apply_local(phi, psi.n_sites, m, {s, 0}, 1);
  }
  return psi.amplitudes.dot(phi).real();
}

std::uint64_t sample_shots(double p_one, std::uint64_t shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uint64_t ones = 0;
  for (std::uint64_t k = 0; k < shots; ++k) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < p_one) ++ones;
  }
  return ones;
}

std::vector<RepeatedRound> repeated_parity(const StateVector& psi, int rounds,
                                           const ParityOptions& opts,
                                           std::optional<std::uint64_t> seed) {
  if (rounds < 2) throw ValidationError("repeated_parity: rounds must be >= 2");
  std::vector<RepeatedRound> out;
  std::optional<std::mt19937_64> rng;
  if (seed) rng.emplace(*seed);
  StateVector reg = psi;
  for (int r = 0; r < rounds; ++r) {
    RepeatedRound round;
    round.result = parity_measure(reg, opts);
    const double p1 = round.result.left_ancilla_one_probability;
    if (rng) {
      const double u = static_cast<double>((*rng)() >> 11) * 0x1.0p-53;
      round.outcome = u < p1 ? 1 : 0;
    } else {
      round.outcome = p1 >= 0.5 ? 1 : 0;
    }
    reg = middle_register(round.result.post_state, round.outcome);
    round.register_after = reg;
    out.push_back(std::move(round));
  }
  return out;
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::XFlip: return "xflip";
    case EventKind::Measure: return "measure";
    case EventKind::Continue: return "continue";
  }
  return "unknown";
}

EventKind event_kind_from_string(const std::string& s) {
  for (EventKind k : {EventKind::XFlip, EventKind::Measure, EventKind::Continue})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown scenario event kind '" + s + "'");
}

void Scenario::validate() const {
  if (n_sites < 2) throw ValidationError("scenario: n_sites must be >= 2");
  if (n_sites > tolerances().limits.state_max_sites)
    throw ValidationError("scenario: n_sites exceeds the state-vector size guard");
  if (!(theta > 0.0 && theta <= kPi)) throw ValidationError("scenario: theta must lie in (0, pi]");
  if (!(tau > 0.0)) throw ValidationError("scenario: tau must be > 0");
  if (samples_per_tau < 1) throw ValidationError("scenario: samples_per_tau must be >= 1");
  excitations.mask(n_sites);
  double last = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.t >= 0.0)) throw ValidationError("scenario: event times must be >= 0");
    if (e.t < last) {
      std::ostringstream msg;
      msg << "scenario: event " << i << " at t=" << e.t << " precedes the previous event";
      throw ValidationError(msg.str());
    }
    last = e.t;
    if (e.kind == EventKind::XFlip && (e.site < 1 || e.site > n_sites))
      throw ValidationError("scenario: xflip site out of range");
    if (e.kind == EventKind::Continue && !(e.duration >= 0.0))
      throw ValidationError("scenario: continue duration must be >= 0");
  }
}

double Scenario::end_time() const {
  double end = 0.0;
  for (const auto& e : events)
    end = std::max(end, e.kind == EventKind::Continue ? e.t + e.duration : e.t);
  return end;
}

ScenarioResult run_scenario(const Scenario& s) {
  s.validate();
  chain::ChainSpec spec;
  spec.n_sites = s.n_sites;
  spec.theta = s.theta;
  spec.tau = s.tau;
  const auto params = chain::synthesize(spec);

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(params.single_excitation_hamiltonian());
  const ComplexMatrix v = es.eigenvectors().cast<cplx>();
  const RealVector lambda = es.eigenvalues();
  auto step = [&](double dt) {
    const ComplexVector ph = (-kI * dt * lambda.cast<cplx>()).array().exp();
    return ComplexMatrix(v * ph.asDiagonal() * v.transpose());
  };

  ScenarioResult res;
  res.transfer_phase =
      fermion::extract_transfer_phase({step(s.tau), s.tau}, s.theta).phi;

  // Uniform grid merged with event times.
  const double dt = s.tau / s.samples_per_tau;
  const double end = s.end_time();
  const double snap = 1e-9 * dt;
  std::vector<double> times;
  const long steps = static_cast<long>(std::ceil(end / dt - 1e-9));
  for (long k = 0; k <= steps; ++k) times.push_back(std::min(k * dt, end));
  for (const auto& e : s.events) times.push_back(e.t);
  std::sort(times.begin(), times.end());
  std::vector<double> uniq;
  for (double t : times)
    if (uniq.empty() || t - uniq.back() > snap) uniq.push_back(t);

  const ComplexMatrix grid_step = step(dt);
  StateVector psi = StateVector::basis(s.n_sites, s.excitations);
  std::size_t next_event = 0;
  double now = 0.0;
  for (double t : uniq) {
    const double h = t - now;
    if (h > snap) psi = fermion::apply_lifted(std::abs(h - dt) <= snap ? grid_step : step(h), psi);
    now = t;
    res.series.push_back({t, psi.populations()});
    while (next_event < s.events.size() && s.events[next_event].t <= t + snap) {
      const auto& e = s.events[next_event++];
      if (e.kind == EventKind::XFlip) psi = fermion::apply_x(psi, e.site);
      if (e.kind == EventKind::Measure) res.measurements.push_back({t, psi.populations()});
    }
  }
  res.final_state = std::move(psi);
  return res;
}

}  // namespace fst::protocols
