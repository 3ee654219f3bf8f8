#pragma once

// Theory-seeded flux pulses, the four-parameter pulse optimizer and the ZZ
// bias scan.

#include "fstkit/device_metrics.hpp"
#include "fstkit/device_propagation.hpp"

#include <optional>
#include <vector>

namespace fst::device {

// Exchange rate fixed by the θ=π gate with the reference plateau length.
double reference_exchange_rate(double gate_time_pi, double rise_time);

struct PulseSeed {
  PulseConfig pulse;
  double j = 0.0;            // target sideband exchange rate, rad/s
  TheoryPulse theory;        // Δ and interaction time at θ
  std::array<double, 3> averaged{};  // modulation-averaged qubit frequencies
};

// Amplitudes solve |ḡ⁽¹⁾_c(A)| = J, drive frequencies are the averaged
// qubit-frequency differences minus Δ, and the plateau is scaled with the
// interaction time relative to θ = π.
PulseSeed theory_seed(const DeviceSpec& spec, double theta, double gate_time_pi = 212e-9,
                      double rise_time = 2e-9);

// Propagates the dressed computational states and evaluates the metrics.
struct PulseEvaluation {
  GateMetrics metrics;
  ComplexMatrix block;  // 8×8
  double halving_difference = -1.0;  // set when checked
  double unitarity_error = -1.0;
  bool converged = false;
};

PulseEvaluation evaluate_pulse(const DeviceModel& model, const DressedBasis& basis, const PulseConfig& cfg,
                               double theta, const PropagationOptions& opts, bool check_convergence);

// Drive detuning Δ_c = |ω̄_c − ω̄_2| − ω_dc realized by a pulse, with ω̄ the
// modulation-averaged frequencies at its amplitudes, against the theory value.
// The error is relative to max(|Δ_theory|, J) since Δ_theory vanishes at π.
struct DetuningTracking {
  std::array<double, 2> delta{};  // rad/s, couplers 1 and 2
  double theory = 0.0;
  double scale = 0.0;
  double error = 0.0;  // worst of the two, relative to scale
};

DetuningTracking detuning_tracking(const DeviceSpec& spec, const PulseConfig& pulse, const PulseSeed& seed);

enum class OptimizerKind { QuasiNewton, NelderMead };

struct OptimizeOptions {
  OptimizerKind method = OptimizerKind::QuasiNewton;
  int max_evaluations = 200;
  double fd_step = 1e-4;            // relative, per parameter
  double target_infidelity = 0.0;   // stop once reached
  PropagationOptions propagation{1, SplitScheme::Fourth};
};

struct TraceRow {
  int eval = 0;
  double infidelity = 0.0;  // best so far
  double leakage = 0.0;
  double amp1 = 0.0, amp2 = 0.0, wd1 = 0.0, wd2 = 0.0;
};

struct OptimizeResult {
  PulseConfig best;
  GateMetrics metrics;
  GateMetrics initial_metrics;
  std::vector<TraceRow> trace;
  int evaluations = 0;
  bool budget_exhausted = false;
};

OptimizeResult optimize_pulse(const DeviceModel& model, double theta, const PulseConfig& initial,
                              const OptimizeOptions& opts = {});

struct ZZPoint {
  double phi = 0.0;
  double zeta12 = 0.0, zeta23 = 0.0;  // rad/s
  bool ambiguous = false;
};

struct ZZScan {
  std::vector<ZZPoint> points;
  std::vector<double> zeros12;  // refined sign changes of ζ₁₂
  std::vector<double> zeros23;
};

// Both couplers biased at the same Φ, swept over [lo, hi].
ZZScan zz_scan(const DeviceSpec& spec, double lo = 0.0, double hi = 0.45, int points = 46);

}  // namespace fst::device
