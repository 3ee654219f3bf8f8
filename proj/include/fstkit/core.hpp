#pragma once

// Shared numeric types, error classes and the central tolerance table.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fst {

inline constexpr const char* kVersion = "0.1.0";

using cplx = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Input failed a precondition (bad parameters, size guard, malformed data).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical self-check exceeded its tolerance.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Size limits for the exponential-cost routines. Overridable at runtime
// through Tolerances::limits.
struct SizeLimits {
  int dense_max_sites = 10;
  int lift_max_sites = 12;
  int state_max_sites = 20;
  int generator_max_sites = 12;
};

// Every acceptance threshold used by the library lives here.
struct Tolerances {
  double mirror_symmetry = 1e-12;
  double eigenvalue = 1e-10;
  double gap_pattern = 1e-8;
  double unitarity_single = 1e-10;
  double fst_structure = 1e-8;
  double middle_phase = 1e-8;
  double unitarity_full = 1e-9;
  double lift_vs_dense = 1e-9;
  double mapping = 1e-8;
  double decomposition = 1e-8;
  double generator_commutator = 1e-12;
  double state_norm = 1e-10;
  double method_agreement = 1e-8;
  double parity_definite = 1e-9;
  double correlator = 1e-8;
  double propagator_unitarity = 1e-8;
  double propagator_convergence = 1e-6;
  double dispersive_ratio_warning = 0.2;
  double zz_overlap = 0.5;
  SizeLimits limits{};
};

// Process-wide defaults; the CLI may override fields before dispatching.
Tolerances& tolerances();

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

// Bit mask of site `site` (1-based) in an N-site register; site 1 is the
// most significant bit of the basis index.
inline std::uint64_t site_bit(int n_sites, int site) {
  return std::uint64_t{1} << (n_sites - site);
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Wrap an angle into [0, 2π).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  return r < 0 ? r + kTwoPi : r;
}

// Distance between two angles on the circle, in [0, π].
inline double angle_distance(double a, double b) {
  double d = wrap_angle(a - b);
  return d > kPi ? kTwoPi - d : d;
}

}  // namespace fst
