#pragma once

// Ancilla-assisted parity and correlator measurement built on K^{(π)}, and
// timed dynamics scenarios on FST chains.

#include "fstkit/core.hpp"
#include "fstkit/fermion_propagator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fst::protocols {

using fermion::OccupationSubset;
using fermion::StateVector;

enum class Parity { Even, Odd };
std::string to_string(Parity p);

// How K_{N+2}^{(π)} is evaluated inside the protocol.
enum class KMethod { Lift, Pairwise, Dense };

struct ParityOptions {
  double j_max = 1.0;  // rad/s, sets the reported durations
  KMethod method = KMethod::Lift;
};

struct ParityProtocolResult {
  double left_ancilla_one_probability = 0.0;
  Parity inferred_parity = Parity::Even;
  bool definite = false;  // probability within tolerance of 0 or 1
  StateVector post_state;  // N+2 sites: left ancilla, register, right ancilla
  double transfer_phase = 0.0;
  double nominal_duration = 0.0;  // ((N+2)/2)·π/(2 j_max)
  double fst_duration = 0.0;      // minimal PST time of the extended chain
};

// Rotations exp(-iπ/4 X) on the left ancilla and exp(-iπ/4 Y) on the right
// one around K^{(π)} of the extended chain; Y_R acts first.
ParityProtocolResult parity_measure(const StateVector& psi, const ParityOptions& opts = {});

// K_{N+2}^{(π)} on an extended-chain state.
StateVector apply_k_pi(const StateVector& psi, KMethod method, double* phi_out = nullptr);

// Register after projecting the left ancilla on `left_outcome`, with the
// right ancilla traced to its dominant branch. Renormalized.
StateVector middle_register(const StateVector& extended, int left_outcome);

enum class Pauli { X, Y, Z };
std::vector<Pauli> parse_paulis(const std::string& s);

// ⟨P_1 ⊗ … ⊗ P_N⟩ estimated as 1 - 2·P(odd) after single-qubit basis changes.
double correlator_measure(const StateVector& psi, const std::vector<Pauli>& paulis,
                          const ParityOptions& opts = {});
// Direct ⟨ψ|P|ψ⟩.
double pauli_expectation(const StateVector& psi, const std::vector<Pauli>& paulis);

struct RepeatedRound {
  ParityProtocolResult result;
  int outcome = 0;  // left ancilla reading used for the projection
  StateVector register_after;
};

// Rounds of measure-and-project, each on fresh ancillas. The projection uses
// the more likely outcome, or a seeded draw when `seed` is set.
std::vector<RepeatedRound> repeated_parity(const StateVector& psi, int rounds,
                                           const ParityOptions& opts = {},
                                           std::optional<std::uint64_t> seed = std::nullopt);

// Seeded shot sampling of the left ancilla; returns the number of 1 outcomes.
std::uint64_t sample_shots(double p_one, std::uint64_t shots, std::uint64_t seed);

enum class EventKind { XFlip, Measure, Continue };
std::string to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct ScenarioEvent {
  double t = 0.0;  // seconds
  EventKind kind = EventKind::Measure;
  int site = 0;           // XFlip only
  double duration = 0.0;  // Continue only: extends the run to t + duration
};

struct Scenario {
  int n_sites = 2;
  double theta = kPi / 2.0;
  double tau = 1.0;  // FST time of the chain, seconds
  OccupationSubset excitations;
  std::vector<ScenarioEvent> events;
  int samples_per_tau = 100;

  // Throws ValidationError on bad sizes, sites or decreasing event times.
  void validate() const;
  double end_time() const;
};

struct PopulationRow {
  double t = 0.0;
  std::vector<double> populations;
};

struct ScenarioResult {
  std::vector<PopulationRow> series;
  std::vector<PopulationRow> measurements;  // snapshots at Measure events
  double transfer_phase = 0.0;
  StateVector final_state;
};

ScenarioResult run_scenario(const Scenario& s);

}  // namespace fst::protocols
