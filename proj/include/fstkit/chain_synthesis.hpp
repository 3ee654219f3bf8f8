#pragma once

// Hamiltonian parameters for fractional state transfer on an XY chain.
//
// A chain of N two-level sites with nearest-neighbour XY couplings J_n and
// on-site detunings Δ_n rotates every mirror pair (n, N+1-n) by the same
// angle θ after the transfer time τ when the single-excitation spectrum is
// arranged as λτ = ±θ/2 + φ + 2πm with the narrowest choice of m.
// All frequencies are angular (rad/s), ħ = 1.

#include "fstkit/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fst::chain {

struct ChainSpec {
  int n_sites = 2;
  double theta = kPi;
  // Exactly one of the two time scales must be set.
  std::optional<double> tau;
  std::optional<double> j_max;

  void validate() const;
};

struct ChainParams {
  int n_sites = 0;
  double theta = 0.0;
  double tau = 0.0;
  std::vector<double> couplings;  // J_1 .. J_{N-1}
  std::vector<double> detunings;  // Δ_1 .. Δ_N

  // Real symmetric tridiagonal N×N matrix of the single-excitation manifold.
  RealMatrix single_excitation_hamiltonian() const;
  double max_coupling() const;
};

// J_n·τ for n = 1..N-1. Independent of τ.
std::vector<double> coupling_time_products(int n_sites, double theta);

// Δ_n·τ for n = 1..N. Zero for even N.
std::vector<double> detuning_time_products(int n_sites, double theta);

ChainParams synthesize(const ChainSpec& spec);

// Minimal τ with max_n J_n = j_max. Requires spec.j_max.
double solve_gate_time(const ChainSpec& spec);

// Closed-form upper bound on solve_gate_time over all θ.
double gate_time_upper_bound(int n_sites, double j_max);

struct DetuningRange {
  double direct = 0.0;   // max Δ - min Δ of the synthesized parameters
  double formula = 0.0;  // N(π-θ)/(3τ) for odd N, 0 for even N
  bool agrees = true;    // the two within 1e-9 relative
};

DetuningRange detuning_range(const ChainParams& params);

struct SpectrumReport {
  RealVector eigenvalues;           // ascending
  std::vector<int> mirror_parity;   // +1 symmetric, -1 antisymmetric
  double min_gap = 0.0;
  double max_gap_pattern_error = 0.0;
  double phase = 0.0;               // transfer phase φ in [0, 2π)
  bool non_degenerate = false;
  bool gap_pattern_ok = false;
  bool parity_alternates = false;
  std::string failure;              // empty when all checks pass

  bool ok() const { return failure.empty(); }
};

// Diagonalizes the single-excitation Hamiltonian and checks the FST
// spectrum conditions. Never throws on a failed condition; inspect `failure`.
SpectrumReport spectrum_check(const ChainParams& params);

}  // namespace fst::chain
