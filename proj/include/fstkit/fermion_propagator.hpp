#pragma once

// Exact time evolution of XY chains.
//
// The chain Hamiltonian conserves excitation number and maps to free
// fermions under the Jordan-Wigner transformation, so the full 2^N
// propagator follows from the N×N single-excitation propagator u through
// Slater determinants:  <S'|U|S> = det u[S', S]  for |S| = |S'|.
// A dense 2^N exponential is provided as an independent oracle.
//
// Basis convention: site 1 is the most significant bit of a basis index.

#include "fstkit/chain_synthesis.hpp"
#include "fstkit/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fst::fermion {

struct SinglePropagator {
  ComplexMatrix matrix;  // N×N
  double t = 0.0;

  int n_sites() const { return static_cast<int>(matrix.rows()); }
};

// Strictly increasing 1-based site list; a Fock state and, identically, a
// computational basis string.
class OccupationSubset {
 public:
  OccupationSubset() = default;
  explicit OccupationSubset(std::vector<int> sites);

  const std::vector<int>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  std::uint64_t mask(int n_sites) const;
  static OccupationSubset from_mask(std::uint64_t mask, int n_sites);

 private:
  std::vector<int> sites_;
};

enum class BitOrder { SiteOneMsb, SiteOneLsb };

struct StateVector {
  int n_sites = 0;
  ComplexVector amplitudes;

  static StateVector basis(int n_sites, std::uint64_t index);
  static StateVector basis(int n_sites, const OccupationSubset& occupied);
  static StateVector vacuum(int n_sites) { return basis(n_sites, std::uint64_t{0}); }

  double norm() const { return amplitudes.norm(); }
  // Expected occupation <n_s> of every site, s = 1..N.
  std::vector<double> populations() const;
  // Amplitudes re-indexed for the requested bit order (internal order is
  // SiteOneMsb; conversion is an involution).
  ComplexVector amplitudes_in(BitOrder order) const;
  static StateVector from_amplitudes(int n_sites, const ComplexVector& amps, BitOrder order);
};

struct FullUnitary {
  int n_sites = 0;
  ComplexMatrix matrix;  // 2^N × 2^N
};

SinglePropagator single_propagator(const chain::ChainParams& params, double t);

struct TransferPhase {
  double phi = 0.0;  // in [0, 2π)
  // Odd chains: distance between arg U[mid][mid] and -(φ + θ/2) on the circle.
  std::optional<double> middle_phase_error;
};

TransferPhase extract_transfer_phase(const SinglePropagator& u, double theta);

// Single-particle matrix of U at its FST time, multiplied by the diagonal
// phase fix e^{iφ} per site (plus e^{iθ/2} on the middle site of odd chains).
ComplexMatrix phase_fixed(const SinglePropagator& u, double theta, double phi);

FullUnitary lift_to_full(const ComplexMatrix& single);
inline FullUnitary lift_to_full(const SinglePropagator& u) { return lift_to_full(u.matrix); }

// Applies the lift of `single` to a state without forming the 2^N matrix,
// choosing between the sector-wise determinant expansion (sparse input) and
// a Givens factorization of `single` (O(N²·2^N)).
StateVector apply_lifted(const ComplexMatrix& single, const StateVector& psi);

// Real symmetric 2^N Hamiltonian of the chain in the computational basis.
RealMatrix dense_hamiltonian(const chain::ChainParams& params);

FullUnitary dense_oracle(const chain::ChainParams& params, double t);

enum class EvolveMethod { Lift, Dense };

StateVector evolve_state(const StateVector& psi, const chain::ChainParams& params, double t,
                         EvolveMethod method);

// Pauli X on `site` (1-based).
StateVector apply_x(const StateVector& psi, int site);

// Determinant of a small complex matrix via LU with partial pivoting.
cplx small_determinant(const ComplexMatrix& m);

}  // namespace fst::fermion
