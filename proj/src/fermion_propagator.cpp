#include "fstkit/fermion_propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace fst::fermion {

namespace {

constexpr int kMaxDet = 24;

// In-place LU determinant on a row-major k×k buffer.
cplx det_inplace(std::array<cplx, kMaxDet * kMaxDet>& a, int k) {
  cplx det{1.0, 0.0};
  for (int c = 0; c < k; ++c) {
    int piv = c;
    double best = std::abs(a[c * k + c]);
    for (int r = c + 1; r < k; ++r) {
      const double v = std::abs(a[r * k + c]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return {0.0, 0.0};
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
      det = -det;
    }
    const cplx d = a[c * k + c];
    det *= d;
    for (int r = c + 1; r < k; ++r) {
      const cplx f = a[r * k + c] / d;
      if (f == cplx{}) continue;
      for (int j = c + 1; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return det;
}

// 0-based matrix indices of the occupied sites, in increasing site order.
int occupied_indices(std::uint64_t mask, int n_sites, std::array<int, 64>& out) {
  int k = 0;
  for (int s = 1; s <= n_sites; ++s)
    if (mask & site_bit(n_sites, s)) out[k++] = s - 1;
  return k;
}

cplx minor_det(const ComplexMatrix& u, const std::array<int, 64>& rows,
               const std::array<int, 64>& cols, int k) {
  if (k == 0) return {1.0, 0.0};
  if (k == 1) return u(rows[0], cols[0]);
  if (k == 2)
    return u(rows[0], cols[0]) * u(rows[1], cols[1]) - u(rows[0], cols[1]) * u(rows[1], cols[0]);
  std::array<cplx, kMaxDet * kMaxDet> buf;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) buf[i * k + j] = u(rows[i], cols[j]);
  return det_inplace(buf, k);
}

std::vector<std::vector<std::uint64_t>> masks_by_weight(int n_sites) {
  std::vector<std::vector<std::uint64_t>> out(n_sites + 1);
  const std::uint64_t dim = std::uint64_t{1} << n_sites;
  for (std::uint64_t x = 0; x < dim; ++x) out[popcount(x)].push_back(x);
  return out;
}

void guard(int n_sites, int limit, const char* what) {
  if (n_sites > limit) {
    std::ostringstream msg;
    msg << what << ": N=" << n_sites << " exceeds size guard " << limit;
    throw ValidationError(msg.str());
  }
}

ComplexMatrix exp_hermitian(const RealMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
  const RealMatrix& v = es.eigenvectors();
  ComplexVector phases = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp();
  ComplexMatrix vc = v.cast<cplx>();
  return vc * phases.asDiagonal() * v.transpose().cast<cplx>();
}

// Sector-wise determinant expansion over the non-zero input amplitudes.
StateVector apply_by_minors(const ComplexMatrix& single, const StateVector& psi,
                            const std::vector<std::vector<std::uint64_t>>& groups) {
  const int n = psi.n_sites;
  StateVector out{n, ComplexVector::Zero(psi.amplitudes.size())};
  std::array<int, 64> rows{}, cols{};
  for (Eigen::Index x = 0; x < psi.amplitudes.size(); ++x) {
    const cplx a = psi.amplitudes(x);
    if (a == cplx{}) continue;
    const int k = occupied_indices(static_cast<std::uint64_t>(x), n, cols);
    for (std::uint64_t sp : groups[k]) {
      occupied_indices(sp, n, rows);
      out.amplitudes(static_cast<Eigen::Index>(sp)) += a * minor_det(single, rows, cols, k);
    }
  }
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

OccupationSubset::OccupationSubset(std::vector<int> sites) : sites_(std::move(sites)) {
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (sites_[i] < 1) throw ValidationError("OccupationSubset: sites are 1-based");
    if (i > 0 && sites_[i] <= sites_[i - 1])
      throw ValidationError("OccupationSubset: sites must be strictly increasing");
  }
}

std::uint64_t OccupationSubset::mask(int n_sites) const {
  std::uint64_t m = 0;
  for (int s : sites_) {
    if (s > n_sites) throw ValidationError("OccupationSubset: site beyond chain length");
    m |= site_bit(n_sites, s);
  }
  return m;
}

OccupationSubset OccupationSubset::from_mask(std::uint64_t mask, int n_sites) {
  std::vector<int> sites;
  for (int s = 1; s <= n_sites; ++s)
    if (mask & site_bit(n_sites, s)) sites.push_back(s);
  return OccupationSubset(std::move(sites));
}

StateVector StateVector::basis(int n_sites, std::uint64_t index) {
  guard(n_sites, tolerances().limits.state_max_sites, "StateVector");
  StateVector s;
  s.n_sites = n_sites;
  s.amplitudes = ComplexVector::Zero(Eigen::Index{1} << n_sites);
  s.amplitudes(static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

StateVector StateVector::basis(int n_sites, const OccupationSubset& occupied) {
  return basis(n_sites, occupied.mask(n_sites));
}

std::vector<double> StateVector::populations() const {
  std::vector<double> p(n_sites, 0.0);
  for (Eigen::Index x = 0; x < amplitudes.size(); ++x) {
    const double w = std::norm(amplitudes(x));
    if (w == 0.0) continue;
    for (int s = 1; s <= n_sites; ++s)
      if (static_cast<std::uint64_t>(x) & site_bit(n_sites, s)) p[s - 1] += w;
  }
  return p;
}

namespace {
std::uint64_t reverse_bits(std::uint64_t x, int n) {
  std::uint64_t r = 0;
  for (int i = 0; i < n; ++i)
    if (x & (std::uint64_t{1} << i)) r |= std::uint64_t{1} << (n - 1 - i);
  return r;
}
}  // namespace

ComplexVector StateVector::amplitudes_in(BitOrder order) const {
  if (order == BitOrder::SiteOneMsb) return amplitudes;
  ComplexVector out(amplitudes.size());
  for (Eigen::Index x = 0; x < amplitudes.size(); ++x)
    out(static_cast<Eigen::Index>(reverse_bits(x, n_sites))) = amplitudes(x);
  return out;
}

StateVector StateVector::from_amplitudes(int n_sites, const ComplexVector& amps, BitOrder order) {
  if (amps.size() != (Eigen::Index{1} << n_sites))
    throw ValidationError("StateVector: amplitude count does not match 2^N");
  StateVector s;
  s.n_sites = n_sites;
  s.amplitudes = amps;
  if (order == BitOrder::SiteOneLsb) s.amplitudes = s.amplitudes_in(BitOrder::SiteOneLsb);
  return s;
}

SinglePropagator single_propagator(const chain::ChainParams& params, double t) {
  if (!(t >= 0.0)) throw ValidationError("single_propagator: t must be >= 0");
  return {exp_hermitian(params.single_excitation_hamiltonian(), t), t};
}

TransferPhase extract_transfer_phase(const SinglePropagator& u, double theta) {
  const int n = u.n_sites();
  const ComplexMatrix& m = u.matrix;
  TransferPhase out;
  const double c = std::cos(theta / 2.0);
  if (std::abs(c) >= 1e-6) {
    out.phi = wrap_angle(-std::arg(m(0, 0) / c));
  } else {
    const cplx edge = kI * m(n - 1, 0);
    if (std::abs(edge) < 1e-6)
      throw ToleranceError("extract_transfer_phase: degenerate propagator (not an FST chain?)");
    out.phi = wrap_angle(-std::arg(edge));
  }
  if (n % 2 == 1) {
    const int mid = (n - 1) / 2;
    out.middle_phase_error = angle_distance(std::arg(m(mid, mid)), -(out.phi + theta / 2.0));
  }
  return out;
}

ComplexMatrix phase_fixed(const SinglePropagator& u, double theta, double phi) {
  const int n = u.n_sites();
  ComplexVector d = ComplexVector::Constant(n, std::exp(kI * phi));
  if (n % 2 == 1) d((n - 1) / 2) *= std::exp(kI * theta / 2.0);
  return u.matrix * d.asDiagonal();
}

cplx small_determinant(const ComplexMatrix& m) {
  const int k = static_cast<int>(m.rows());
  if (k != m.cols()) throw ValidationError("small_determinant: matrix must be square");
  if (k > kMaxDet) return m.partialPivLu().determinant();
  std::array<cplx, kMaxDet * kMaxDet> buf;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) buf[i * k + j] = m(i, j);
  return k == 0 ? cplx{1.0, 0.0} : det_inplace(buf, k);
}

FullUnitary lift_to_full(const ComplexMatrix& single) {
  const int n = static_cast<int>(single.rows());
  guard(n, tolerances().limits.lift_max_sites, "lift_to_full");
  const Eigen::Index dim = Eigen::Index{1} << n;
  FullUnitary out{n, ComplexMatrix::Zero(dim, dim)};
  const auto groups = masks_by_weight(n);
  std::array<int, 64> rows{}, cols{};
  for (const auto& group : groups) {
    for (std::uint64_t s : group) {
      const int k = occupied_indices(s, n, cols);
      for (std::uint64_t sp : group) {
        occupied_indices(sp, n, rows);
        out.matrix(static_cast<Eigen::Index>(sp), static_cast<Eigen::Index>(s)) =
            minor_det(single, rows, cols, k);
      }
    }
  }
  return out;
}

StateVector apply_lifted(const ComplexMatrix& single, const StateVector& psi) {
  const int n = psi.n_sites;
  if (single.rows() != n || single.cols() != n)
    throw ValidationError("apply_lifted: single-particle matrix does not match the state");
  guard(n, tolerances().limits.state_max_sites, "apply_lifted");

  double minor_cost = 0.0;
  for (Eigen::Index x = 0; x < psi.amplitudes.size(); ++x) {
    if (psi.amplitudes(x) == cplx{}) continue;
    const int k = popcount(static_cast<std::uint64_t>(x));
    minor_cost += binomial(n, k) * (1 + k * k * k);
  }
  const double givens_cost = 0.5 * n * (n - 1) * std::ldexp(1.0, n) + std::ldexp(1.0, n);
  if (minor_cost < givens_cost) return apply_by_minors(single, psi, masks_by_weight(n));

  // Reduce u to a diagonal with adjacent-row Givens rotations, G_m…G_1 u = D,
  // so u = G_1†…G_m† D. Adjacent modes carry no Jordan-Wigner string, so each
  // factor lifts to a local 2×2 mix plus det on the doubly occupied pair.
  struct Rotation {
    int row;  // 0-based upper row of the pair
    cplx h00, h01, h10, h11;  // G†
  };
  ComplexMatrix u = single;
  std::vector<Rotation> rots;
  for (int c = 0; c + 1 < n; ++c) {
    for (int r = n - 1; r > c; --r) {
      const cplx b = u(r, c);
      if (b == cplx{}) continue;
      const cplx a = u(r - 1, c);
      const double rho = std::hypot(std::abs(a), std::abs(b));
      const cplx g00 = std::conj(a) / rho, g01 = std::conj(b) / rho;
      const cplx g10 = -b / rho, g11 = a / rho;
      for (int j = 0; j < n; ++j) {
        const cplx top = u(r - 1, j), bot = u(r, j);
        u(r - 1, j) = g00 * top + g01 * bot;
        u(r, j) = g10 * top + g11 * bot;
      }
      rots.push_back({r - 1, std::conj(g00), std::conj(g10), std::conj(g01), std::conj(g11)});
    }
  }

  StateVector out = psi;
  ComplexVector& amps = out.amplitudes;
  const Eigen::Index dim = amps.size();
  for (Eigen::Index xi = 0; xi < dim; ++xi) {
    const std::uint64_t x = static_cast<std::uint64_t>(xi);
    cplx ph{1.0, 0.0};
    for (int s = 1; s <= n; ++s)
      if (x & site_bit(n, s)) ph *= u(s - 1, s - 1);
    amps(xi) *= ph;
  }
  for (auto it = rots.rbegin(); it != rots.rend(); ++it) {
    const std::uint64_t bp = site_bit(n, it->row + 1), bq = site_bit(n, it->row + 2);
    const cplx det = it->h00 * it->h11 - it->h01 * it->h10;
    for (Eigen::Index xi = 0; xi < dim; ++xi) {
      const std::uint64_t x = static_cast<std::uint64_t>(xi);
      if (x & bq) {
        if (x & bp) amps(xi) *= det;
        continue;
      }
      if (!(x & bp)) continue;
      // x has p occupied and q empty; y is the partner with the particle on q.
      const Eigen::Index yi = static_cast<Eigen::Index>(x ^ bp ^ bq);
      const cplx ap = amps(xi), aq = amps(yi);
      amps(xi) = it->h00 * ap + it->h01 * aq;
      amps(yi) = it->h10 * ap + it->h11 * aq;
    }
  }
  return out;
}

RealMatrix dense_hamiltonian(const chain::ChainParams& params) {
  const int n = params.n_sites;
  guard(n, tolerances().limits.dense_max_sites, "dense_oracle");
  const Eigen::Index dim = Eigen::Index{1} << n;
  RealMatrix h = RealMatrix::Zero(dim, dim);
  for (Eigen::Index xi = 0; xi < dim; ++xi) {
    const std::uint64_t x = static_cast<std::uint64_t>(xi);
    for (int s = 1; s <= n; ++s)
      if (x & site_bit(n, s)) h(xi, xi) += params.detunings[s - 1];
    // σ+_s σ-_{s+1} + h.c. moves one excitation across the bond.
    for (int s = 1; s < n; ++s) {
      const std::uint64_t a = site_bit(n, s), b = site_bit(n, s + 1);
      if (((x & a) != 0) != ((x & b) != 0)) {
        const Eigen::Index y = static_cast<Eigen::Index>(x ^ (a | b));
        h(y, xi) += params.couplings[s - 1];
      }
    }
  }
  return h;
}

FullUnitary dense_oracle(const chain::ChainParams& params, double t) {
  if (!(t >= 0.0)) throw ValidationError("dense_oracle: t must be >= 0");
  return {params.n_sites, exp_hermitian(dense_hamiltonian(params), t)};
}

StateVector evolve_state(const StateVector& psi, const chain::ChainParams& params, double t,
                         EvolveMethod method) {
  if (psi.n_sites != params.n_sites)
    throw ValidationError("evolve_state: state and chain sizes differ");
  if (std::abs(psi.norm() - 1.0) > tolerances().state_norm)
    throw ValidationError("evolve_state: input state is not normalized");
  if (method == EvolveMethod::Dense) {
    const FullUnitary u = dense_oracle(params, t);
    return {psi.n_sites, u.matrix * psi.amplitudes};
  }
  return apply_lifted(single_propagator(params, t).matrix, psi);
}

StateVector apply_x(const StateVector& psi, int site) {
  if (site < 1 || site > psi.n_sites) throw ValidationError("apply_x: site out of range");
  const std::uint64_t b = site_bit(psi.n_sites, site);
  StateVector out{psi.n_sites, ComplexVector(psi.amplitudes.size())};
  for (Eigen::Index x = 0; x < psi.amplitudes.size(); ++x)
    out.amplitudes(static_cast<Eigen::Index>(static_cast<std::uint64_t>(x) ^ b)) =
        psi.amplitudes(x);
  return out;
}

}  // namespace fst::fermion
