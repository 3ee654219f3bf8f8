#pragma once

// Gate metrics of a simulated three-qubit operation against K_3(θ), with free
// virtual-Z corrections, and the analytic pulse parameters for a target θ.

#include "fstkit/device_model.hpp"

#include <array>

namespace fst::device {

// 8×8 target K_3(θ), computational index with qubit 1 as the high bit.
ComplexMatrix k3_target(double theta);

// M_yx = <d_y|ψ_x(τ)> e^{iE_x τ}: propagated dressed computational columns
// (bare basis, dim × 8) projected back onto the dressed computational states,
// in the frame rotating at the dressed energies.
ComplexMatrix computational_block(const DressedBasis& basis, const ComplexMatrix& columns, double gate_time);

struct GateMetrics {
  double avg_fidelity = 0.0;
  double leakage = 0.0;
  std::array<double, 3> z_corrections{};  // per qubit, applied after the gate
  double infidelity() const { return 1.0 - avg_fidelity; }
};

// F = (Tr M†M + |Tr V†M|²)/72 maximized over V = diag(e^{i z·bits}) K_3(θ).
GateMetrics gate_metrics(const ComplexMatrix& m, double theta);

struct TheoryPulse {
  double delta = 0.0;  // rad/s
  double tau = 0.0;    // s
};

// Detuning and interaction time realizing K_3(θ) at exchange coupling j.
TheoryPulse theory_pulse(double theta, double j);

}  // namespace fst::device
