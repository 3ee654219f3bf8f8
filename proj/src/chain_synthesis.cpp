#include "fstkit/chain_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fst::chain {

void ChainSpec::validate() const {
  if (n_sites < 2) throw ValidationError("chain: n_sites must be >= 2");
  if (!(theta > 0.0 && theta <= kPi))
    throw ValidationError("chain: theta must lie in (0, pi]");
  if (tau.has_value() == j_max.has_value())
    throw ValidationError("chain: exactly one of tau and j_max must be given");
  if (tau && !(*tau > 0.0)) throw ValidationError("chain: tau must be > 0");
  if (j_max && !(*j_max > 0.0)) throw ValidationError("chain: j_max must be > 0");
}

RealMatrix ChainParams::single_excitation_hamiltonian() const {
  const int n = n_sites;
  RealMatrix h = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = detunings[i];
  for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = couplings[i];
  return h;
}

double ChainParams::max_coupling() const {
  return couplings.empty() ? 0.0 : *std::max_element(couplings.begin(), couplings.end());
}

std::vector<double> coupling_time_products(int n_sites, double theta) {
  const int N = n_sites;
  const double t = theta / kPi;
  std::vector<double> out(N - 1);
  for (int n = 1; n < N; ++n) {
    const double k = N - 2.0 * n;
    double radicand;
    if (N % 2 == 0) {
      radicand = n * (N - n) * (k * k - t * t) / ((N - 1.0 - 2.0 * n) * (N + 1.0 - 2.0 * n));
    } else {
      radicand = n * (N - n) * (k * k - (t - 1.0) * (t - 1.0)) / (k * k);
    }
    // Exact zeros come out as tiny negatives at the domain edge.
    if (radicand < 0.0 && radicand > -1e-12) radicand = 0.0;
    if (radicand < 0.0) {
      std::ostringstream msg;
      msg << "chain: negative coupling radicand at n=" << n << " (theta=" << theta << ")";
      throw std::domain_error(msg.str());
    }
    out[n - 1] = 0.5 * kPi * std::sqrt(radicand);
  }
  return out;
}

std::vector<double> detuning_time_products(int n_sites, double theta) {
  const int N = n_sites;
  std::vector<double> out(N, 0.0);
  if (N % 2 == 0) return out;
  const double scale = 0.5 * kPi * (theta / kPi - 1.0) * N / 2.0;
  for (int n = 1; n <= N; ++n) {
    out[n - 1] = scale * (1.0 / (2.0 * n - N) - 1.0 / (2.0 * n - 2.0 - N));
  }
  return out;
}

double solve_gate_time(const ChainSpec& spec) {
  if (!spec.j_max || !(*spec.j_max > 0.0))
    throw ValidationError("solve_gate_time: j_max must be given and > 0");
  const auto products = coupling_time_products(spec.n_sites, spec.theta);
  return *std::max_element(products.begin(), products.end()) / *spec.j_max;
}

double gate_time_upper_bound(int n_sites, double j_max) {
  const double N = n_sites;
  // The even closed form vanishes at N = 2; there J·τ = θ/2 peaks at π/2.
  if (n_sites == 2) return kPi / (2.0 * j_max);
  if (n_sites % 2 == 0) return kPi * std::sqrt(N * N - 4.0) / (2.0 * std::sqrt(3.0) * j_max);
  return kPi * std::sqrt(N * N - 1.0) / (4.0 * j_max);
}

ChainParams synthesize(const ChainSpec& spec) {
  spec.validate();
  ChainParams p;
  p.n_sites = spec.n_sites;
  p.theta = spec.theta;
  p.tau = spec.tau ? *spec.tau : solve_gate_time(spec);
  p.couplings = coupling_time_products(spec.n_sites, spec.theta);
  p.detunings = detuning_time_products(spec.n_sites, spec.theta);
  for (double& j : p.couplings) j /= p.tau;
  for (double& d : p.detunings) d /= p.tau;
  return p;
}

DetuningRange detuning_range(const ChainParams& params) {
  DetuningRange r;
  const auto [lo, hi] = std::minmax_element(params.detunings.begin(), params.detunings.end());
  r.direct = *hi - *lo;
  r.formula = params.n_sites % 2 == 0
                  ? 0.0
                  : params.n_sites * (kPi - params.theta) / (3.0 * params.tau);
  const double scale = std::max({std::abs(r.direct), std::abs(r.formula), 1e-300});
  r.agrees = std::abs(r.direct - r.formula) <= 1e-9 * scale ||
             (r.direct == 0.0 && r.formula == 0.0);
  return r;
}

SpectrumReport spectrum_check(const ChainParams& params) {
  SpectrumReport rep;
  const int n = params.n_sites;
  const double tau = params.tau;
  const double theta = params.theta;
  const auto& tol = tolerances();

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(params.single_excitation_hamiltonian());
  rep.eigenvalues = es.eigenvalues();
  const RealMatrix& vecs = es.eigenvectors();

  rep.mirror_parity.resize(n);
  bool parity_clean = true;
  for (int k = 0; k < n; ++k) {
    const RealVector v = vecs.col(k);
    const double overlap = v.dot(v.reverse());
    rep.mirror_parity[k] = overlap >= 0 ? +1 : -1;
    if (std::abs(std::abs(overlap) - 1.0) > 1e-8) parity_clean = false;
  }

  const double norm = std::max(1.0, rep.eigenvalues.cwiseAbs().maxCoeff());
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < n; ++k)
    rep.min_gap = std::min(rep.min_gap, rep.eigenvalues(k + 1) - rep.eigenvalues(k));
  rep.non_degenerate = n < 2 || rep.min_gap > tol.eigenvalue * norm;

  // Consecutive gaps·τ alternate between θ and 2π-θ; accept either start.
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < 2; ++start) {
    double worst = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
      const double gap = (rep.eigenvalues(k + 1) - rep.eigenvalues(k)) * tau;
      const double expected = ((k + start) % 2 == 0) ? theta : kTwoPi - theta;
      worst = std::max(worst, angle_distance(gap, expected));
    }
    best = std::min(best, worst);
  }
  rep.max_gap_pattern_error = best;
  rep.gap_pattern_ok = best <= tol.gap_pattern;

  rep.parity_alternates = parity_clean;
  for (int k = 0; k + 1 < n; ++k)
    if (rep.mirror_parity[k] == rep.mirror_parity[k + 1]) rep.parity_alternates = false;

  // Symmetric eigenvectors carry λτ = φ + θ/2, antisymmetric ones φ - θ/2.
  double sx = 0.0, sy = 0.0;
  for (int k = 0; k < n; ++k) {
    const double phi_k = rep.eigenvalues(k) * tau - rep.mirror_parity[k] * theta / 2.0;
    sx += std::cos(phi_k);
    sy += std::sin(phi_k);
  }
  rep.phase = wrap_angle(std::atan2(sy, sx));

  if (!rep.non_degenerate) {
    rep.failure = "eigenvalues are degenerate";
  } else if (!rep.gap_pattern_ok) {
    std::ostringstream msg;
    msg << "gap pattern deviates from {theta, 2pi-theta} by " << rep.max_gap_pattern_error;
    rep.failure = msg.str();
  } else if (!rep.parity_alternates) {
    rep.failure = "eigenvector mirror parity does not alternate";
  }
  return rep;
}

}  // namespace fst::chain
