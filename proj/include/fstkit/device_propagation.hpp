#pragma once

// Flux-drive pulses and time evolution of the device model.
//
// Within one sample of the held envelope H(t) = H_dc + δ₁(t)·n_c1 + δ₂(t)·n_c2,
// where H_dc is the static Hamiltonian at the DC bias and δ_c the coupler
// detuning from its bias frequency. The δ terms are diagonal and commute at
// all times, so their flow is integrated exactly (Gauss-Legendre in time);
// exp(-i H_dc h) is precomputed per parity block. Steps are split
// symmetrically (second order); SplitScheme selects a symmetric composition
// of that step (Yoshida triple jump, Suzuki five-stage, Kahan-Li nine-stage).

#include "fstkit/device_model.hpp"

#include <optional>

namespace fst::device {

struct PulseConfig {
  double amp1 = 0.0, amp2 = 0.0;  // Φ₀
  double wd1 = 0.0, wd2 = 0.0;    // rad/s
  double rise_time = 2e-9;        // s
  double gate_time = 212e-9;      // s
  double sample_rate = 2.4e9;     // samples/s

  void validate(const DeviceSpec& spec) const;
};

// Unscaled erf flattop at time t (amplitude 1).
double flattop(double t, double rise_time, double gate_time);

struct EnvelopeSample {
  double a1 = 0.0, a2 = 0.0;      // held envelope
  double phi1 = 0.0, phi2 = 0.0;  // total coupler flux
};

EnvelopeSample pulse_envelope(const DeviceSpec& spec, const PulseConfig& cfg, double t);

enum class SplitScheme { Second, FourthTriple, Fourth, Sixth };

struct PropagationOptions {
  int substeps_per_sample = 4;
  SplitScheme scheme = SplitScheme::Fourth;
};

// Propagates the given columns (bare basis, dim × k) from 0 to gate_time.
ComplexMatrix propagate_columns(const DeviceModel& model, const PulseConfig& cfg,
                                const ComplexMatrix& initial, const PropagationOptions& opts = {});

struct Propagation {
  ComplexMatrix unitary;  // dim × dim in the bare basis
  double unitarity_error = 0.0;
};

Propagation propagate(const DeviceModel& model, const PulseConfig& cfg,
                      const PropagationOptions& opts = {});

struct ConvergenceReport {
  ComplexMatrix columns;  // result at the finer step
  double halving_difference = 0.0;
  double unitarity_error = 0.0;  // ‖C†C − I‖_max of the propagated columns
  bool converged = false;
};

// Runs at `opts` and at twice the substep count and compares.
ConvergenceReport propagate_checked(const DeviceModel& model, const PulseConfig& cfg,
                                    const ComplexMatrix& initial, const PropagationOptions& opts = {});

}  // namespace fst::device
