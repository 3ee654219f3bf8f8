#pragma once

// Three fixed-frequency transmons coupled through two flux-tunable couplers,
// each mode a Duffing oscillator truncated to `levels` states.
// Mode order q1, q2, q3, c1, c2; q1 is the most significant digit of a basis
// index. Frequencies are angular (rad/s), flux in units of Φ₀.

#include "fstkit/core.hpp"

#include <array>
#include <string>
#include <vector>

namespace fst::device {

inline constexpr int kModes = 5;
inline constexpr double kTwoPiGHz = 2.0e9 * std::numbers::pi;
inline constexpr double kTwoPiMHz = 2.0e6 * std::numbers::pi;

struct DeviceSpec {
  double w1 = 0, w2 = 0, w3 = 0;
  double wc1 = 0, wc2 = 0;  // coupler frequencies at the DC bias point
  double a1 = 0, a2 = 0, a3 = 0, ac1 = 0, ac2 = 0;
  double g1c1 = 0, g2c1 = 0, g2c2 = 0, g3c2 = 0, g12 = 0, g23 = 0;
  double dc1 = 0, dc2 = 0;
  double phi_dc1 = 0, phi_dc2 = 0;
  int levels = 3;

  static DeviceSpec reference();  // the reference three-qubit parameter set

  void validate() const;
  // Human-readable dispersive-regime warnings; empty when all ratios are fine.
  std::vector<std::string> warnings() const;

  double qubit_frequency(int q) const;      // q = 1..3
  double qubit_anharmonicity(int q) const;  // q = 1..3
  double coupler_alpha(int c) const;        // c = 1..2
  double coupler_asymmetry(int c) const;
  double coupler_bias(int c) const;
  // Zero-flux (maximal) frequency chosen so the coupler sits at wc{c} at its bias.
  double coupler_max_frequency(int c) const;
};

// [cos²(πΦ) + d² sin²(πΦ)]^{1/4}
double flux_factor(double phi, double d);
double flux_to_frequency(const DeviceSpec& spec, int coupler, double phi);

class DeviceModel {
 public:
  explicit DeviceModel(const DeviceSpec& spec);

  const DeviceSpec& spec() const { return spec_; }
  int levels() const { return spec_.levels; }
  Eigen::Index dim() const { return dim_; }

  Eigen::Index index(const std::array<int, kModes>& occupation) const;
  std::array<int, kModes> occupation(Eigen::Index index) const;
  // Bare index of computational state x (3 bits, qubit 1 high), couplers empty.
  Eigen::Index computational_index(int x) const;

  // Everything except the flux-dependent ω_c·n_c terms.
  const RealMatrix& fixed_part() const { return fixed_; }
  // Diagonal of n_c for coupler c = 1..2.
  const RealVector& coupler_number(int c) const { return c == 1 ? nc1_ : nc2_; }
  RealMatrix hamiltonian(double phi_c1, double phi_c2) const;

  // Basis indices with even / odd total excitation number; H is block
  // diagonal in this split.
  const std::array<std::vector<Eigen::Index>, 2>& parity_blocks() const { return blocks_; }

 private:
  DeviceSpec spec_;
  Eigen::Index dim_ = 0;
  RealMatrix fixed_;
  RealVector nc1_, nc2_;
  std::array<std::vector<Eigen::Index>, 2> blocks_;
};

RealMatrix build_hamiltonian(const DeviceSpec& spec, double phi_c1, double phi_c2);

struct DressedBasis {
  RealVector energies;   // ascending
  RealMatrix vectors;    // columns, largest bare component positive
  // Dressed column index and bare overlap for computational states 0..7.
  std::array<Eigen::Index, 8> computational{};
  std::array<double, 8> overlap{};
  bool ambiguous = false;  // some overlap below the identification threshold
};

DressedBasis dressed_basis(const DeviceModel& model, double phi_c1, double phi_c2);
// Dressed state with maximal overlap on a bare occupation.
Eigen::Index dressed_index(const DressedBasis& basis, Eigen::Index bare, double* overlap = nullptr);

struct ZZResult {
  double zeta = 0.0;  // rad/s
  double min_overlap = 1.0;
  bool ambiguous = false;
};

// pair 1: qubits 1-2, pair 2: qubits 2-3.
ZZResult zz_coupling(const DeviceModel& model, double phi_c1, double phi_c2, int pair);

struct SwtParams {
  double w1 = 0, w2 = 0, w3 = 0;
  double g12 = 0, g23 = 0;
  double max_dispersive_ratio = 0.0;
  bool dispersive_warning = false;
};

SwtParams swt_effective_params(const DeviceSpec& spec, double phi_c1, double phi_c2);

// Half the minimal splitting of the dressed q_a/q_b single-excitation pair as
// the frequency of the first qubit of the pair is swept through the second,
// signed by the eigenvector symmetry. The qubit outside the pair is moved
// away by `spectator_offset`. Also returns the SWT value at the crossing.
struct NumericCoupling {
  double g_numeric = 0.0;
  double g_swt = 0.0;
  double crossing_frequency = 0.0;  // swept qubit frequency at the minimum
};

NumericCoupling numeric_exchange_coupling(const DeviceSpec& spec, int pair, double phi_c1,
                                          double phi_c2, double spectator_offset = kTwoPiGHz);

// First Fourier coefficient of g̃ over one drive cycle of amplitude `amp` on
// coupler c, the other coupler held at its DC bias.
double sideband_coupling(const DeviceSpec& spec, int coupler, double amp, int grid = 256);
// Modulation-averaged SWT qubit frequencies with both couplers driven.
std::array<double, 3> averaged_qubit_frequencies(const DeviceSpec& spec, double amp1, double amp2,
                                                 int grid = 128);

}  // namespace fst::device
