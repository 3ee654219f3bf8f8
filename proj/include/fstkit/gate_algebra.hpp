#pragma once

// The effective mirror-pair gate K_N = exp(-i(θ/2)G_N), the stroboscopic
// mapping check against the chain evolution, and its compilation into
// iSWAP(θ)/FSWAP circuits.

#include "fstkit/chain_synthesis.hpp"
#include "fstkit/core.hpp"
#include "fstkit/fermion_propagator.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace fst::gates {

using fermion::FullUnitary;
using fermion::StateVector;

// HalfAngle: iSWAP(a) = exp(i(a/2)(XX+YY)/2), duration |a|/(2 j_max).
// FullAngle: the literal cos(a)/sin(a) block, duration |a|/j_max.
enum class AngleConvention { HalfAngle, FullAngle };

enum class GateKind { ISwapTheta, FSwap, RzPhase, PiFlipX, HalfX, HalfY };

struct GateOp {
  GateKind kind = GateKind::FSwap;
  std::array<int, 2> targets{0, 0};  // 1-based; targets[1] unused for 1-qubit gates
  double angle = 0.0;
  double duration = 0.0;

  int arity() const { return kind == GateKind::ISwapTheta || kind == GateKind::FSwap ? 2 : 1; }
};

std::string to_string(GateKind kind);
GateKind gate_kind_from_string(const std::string& name);

struct Circuit {
  int n_sites = 0;
  AngleConvention convention = AngleConvention::HalfAngle;
  std::vector<std::vector<GateOp>> layers;

  double total_duration() const;
  std::size_t count(GateKind kind) const;
  std::size_t gate_count() const;
  // Throws ValidationError if a layer reuses a site or a target is out of range.
  void validate() const;
};

// 4×4 matrices in the basis |00>,|01>,|10>,|11> with the first target as the
// high bit.
ComplexMatrix iswap_matrix(double angle, AngleConvention conv = AngleConvention::HalfAngle);
ComplexMatrix fswap_matrix();
// 2×2 or 4×4 matrix of a gate.
ComplexMatrix gate_matrix(const GateOp& op, AngleConvention conv);

double gate_duration(GateKind kind, double angle, double j_max,
                     AngleConvention conv = AngleConvention::HalfAngle);

// Applies a 2×2 (one target) or 4×4 (two targets) matrix in place.
void apply_local(ComplexVector& amps, int n_sites, const ComplexMatrix& m,
                 const std::array<int, 2>& targets, int arity);
StateVector apply_circuit(const Circuit& circuit, const StateVector& psi);
FullUnitary circuit_unitary(const Circuit& circuit);

struct EffectiveGenerator {
  int n_sites = 0;
  RealMatrix matrix;  // 2^N × 2^N, real symmetric
};

// Hopping term of mirror pair `pair` (1-based, pair k couples k and N+1-k),
// Z strings on the sites in between.
RealMatrix pair_term(int n_sites, int pair);
EffectiveGenerator build_generator(int n_sites);
// Largest max-norm commutator between any two pair terms.
double max_pair_commutator(int n_sites);

// K_N applied pairwise on a state; no size guard beyond the state's.
StateVector apply_effective_gate(int n_sites, double theta, const StateVector& psi);
FullUnitary effective_gate(int n_sites, double theta);
// Independent construction: eigendecomposition of build_generator.
FullUnitary effective_gate_expm(int n_sites, double theta);

// Diagonal per-basis-state phase fix: e^{iφ} per excitation, extra e^{iθ/2}
// when the middle site of an odd chain is occupied.
ComplexVector phase_fix_diagonal(int n_sites, double theta, double phi);

struct MappingReport {
  int n_sites = 0;
  double theta = 0.0;
  double phi = 0.0;
  double distance = 0.0;  // max-norm
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  bool ok = false;
};

MappingReport verify_mapping(const chain::ChainParams& params);

struct ZLayerEquivalence {
  bool equivalent = false;
  double residual = 0.0;  // max deviation after removing the best Z layer
  bool layer_on_left = false;
  double global_phase = 0.0;
  std::vector<double> z_angles;  // one per site
};

// Tests a = b·D or a = D·b for D a global phase times a product of
// single-qubit Z rotations.
ZLayerEquivalence equivalent_up_to_z_layer(const ComplexMatrix& a, const ComplexMatrix& b,
                                           double tol);

struct DecompositionOptions {
  AngleConvention convention = AngleConvention::HalfAngle;
  // Circuits up to this size are checked against K_N before returning.
  int verify_max_sites = 6;
};

Circuit compile_decomposition(int n_sites, double theta, double j_max,
                              const DecompositionOptions& opts = {});

struct SpeedGain {
  double t_fst = 0.0;
  double t_decomp = 0.0;
  double ratio = 0.0;
};

SpeedGain speed_gain(int n_sites, double theta, double j_max,
                     AngleConvention conv = AngleConvention::HalfAngle);

// Closed-form even-N small-angle asymptote √3·N/√(N²-4).
double even_small_angle_asymptote(int n_sites);

}  // namespace fst::gates
