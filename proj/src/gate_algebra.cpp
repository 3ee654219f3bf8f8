#include "fstkit/gate_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fst::gates {

namespace {

void guard(int n_sites, int limit, const char* what) {
  if (n_sites > limit) {
    std::ostringstream msg;
    msg << what << ": N=" << n_sites << " exceeds size guard " << limit;
    throw ValidationError(msg.str());
  }
}

// Sign of the Z string strictly between sites lo < hi for basis state x.
int string_sign(std::uint64_t x, int n_sites, int lo, int hi) {
  std::uint64_t between = 0;
  for (int s = lo + 1; s < hi; ++s) between |= site_bit(n_sites, s);
  return (popcount(x & between) % 2) ? -1 : 1;
}

}  // namespace

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::ISwapTheta: return "iswap";
    case GateKind::FSwap: return "fswap";
    case GateKind::RzPhase: return "rz";
    case GateKind::PiFlipX: return "x";
    case GateKind::HalfX: return "half_x";
    case GateKind::HalfY: return "half_y";
  }
  return "unknown";
}

GateKind gate_kind_from_string(const std::string& name) {
  for (GateKind k : {GateKind::ISwapTheta, GateKind::FSwap, GateKind::RzPhase, GateKind::PiFlipX,
                     GateKind::HalfX, GateKind::HalfY})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown gate kind '" + name + "'");
}

double Circuit::total_duration() const {
  double total = 0.0;
  for (const auto& layer : layers) {
    double longest = 0.0;
    for (const auto& op : layer) longest = std::max(longest, op.duration);
    total += longest;
  }
  return total;
}

std::size_t Circuit::count(GateKind kind) const {
  std::size_t c = 0;
  for (const auto& layer : layers)
    for (const auto& op : layer)
      if (op.kind == kind) ++c;
  return c;
}

std::size_t Circuit::gate_count() const {
  std::size_t c = 0;
  for (const auto& layer : layers) c += layer.size();
  return c;
}

void Circuit::validate() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<char> used(n_sites + 1, 0);
    for (const auto& op : layers[l]) {
      for (int k = 0; k < op.arity(); ++k) {
        const int s = op.targets[k];
        if (s < 1 || s > n_sites) {
          std::ostringstream msg;
          msg << "circuit: layer " << l << " targets site " << s << " outside 1.." << n_sites;
          throw ValidationError(msg.str());
        }
        if (used[s]) {
          std::ostringstream msg;
          msg << "circuit: layer " << l << " uses site " << s << " twice";
          throw ValidationError(msg.str());
        }
        used[s] = 1;
      }
    }
  }
}

ComplexMatrix iswap_matrix(double angle, AngleConvention conv) {
  const double a = conv == AngleConvention::HalfAngle ? angle / 2.0 : angle;
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 1) = m(2, 2) = std::cos(a);
  m(1, 2) = m(2, 1) = kI * std::sin(a);
  return m;
}

ComplexMatrix fswap_matrix() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 2) = m(2, 1) = 1.0;
  m(3, 3) = -1.0;
  return m;
}

ComplexMatrix gate_matrix(const GateOp& op, AngleConvention conv) {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix m(2, 2);
  switch (op.kind) {
    case GateKind::ISwapTheta: return iswap_matrix(op.angle, conv);
    case GateKind::FSwap: return fswap_matrix();
    case GateKind::RzPhase: m << 1.0, 0.0, 0.0, std::exp(kI * op.angle); return m;
    case GateKind::PiFlipX: m << 0.0, 1.0, 1.0, 0.0; return m;
    case GateKind::HalfX: m << r, -kI * r, -kI * r, r; return m;
    case GateKind::HalfY: m << r, -r, r, r; return m;
  }
  throw ValidationError("gate_matrix: unknown gate");
}

double gate_duration(GateKind kind, double angle, double j_max, AngleConvention conv) {
  if (!(j_max > 0.0)) throw ValidationError("gate_duration: j_max must be > 0");
  switch (kind) {
    case GateKind::ISwapTheta:
      return conv == AngleConvention::HalfAngle ? std::abs(angle) / (2.0 * j_max)
                                                : std::abs(angle) / j_max;
    case GateKind::FSwap: return kPi / (2.0 * j_max);
    default: return 0.0;
  }
}

void apply_local(ComplexVector& amps, int n_sites, const ComplexMatrix& m,
                 const std::array<int, 2>& targets, int arity) {
  const Eigen::Index dim = amps.size();
  if (arity == 1) {
    const std::uint64_t b = site_bit(n_sites, targets[0]);
    for (Eigen::Index xi = 0; xi < dim; ++xi) {
      const std::uint64_t x = static_cast<std::uint64_t>(xi);
      if (x & b) continue;
      const Eigen::Index y = static_cast<Eigen::Index>(x | b);
      const cplx a0 = amps(xi), a1 = amps(y);
      amps(xi) = m(0, 0) * a0 + m(0, 1) * a1;
      amps(y) = m(1, 0) * a0 + m(1, 1) * a1;
    }
    return;
  }
  const std::uint64_t hi = site_bit(n_sites, targets[0]);
  const std::uint64_t lo = site_bit(n_sites, targets[1]);
  for (Eigen::Index xi = 0; xi < dim; ++xi) {
    const std::uint64_t x = static_cast<std::uint64_t>(xi);
    if (x & (hi | lo)) continue;
    const std::array<Eigen::Index, 4> idx{xi, static_cast<Eigen::Index>(x | lo),
                                          static_cast<Eigen::Index>(x | hi),
                                          static_cast<Eigen::Index>(x | hi | lo)};
    std::array<cplx, 4> in;
    for (int k = 0; k < 4; ++k) in[k] = amps(idx[k]);
    for (int r = 0; r < 4; ++r) {
      cplx acc = 0.0;
      for (int c = 0; c < 4; ++c) acc += m(r, c) * in[c];
      amps(idx[r]) = acc;
    }
  }
}

StateVector apply_circuit(const Circuit& circuit, const StateVector& psi) {
  if (psi.n_sites != circuit.n_sites)
    throw ValidationError("apply_circuit: state and circuit sizes differ");
  StateVector out = psi;
  for (const auto& layer : circuit.layers)
    for (const auto& op : layer)
      apply_local(out.amplitudes, out.n_sites, gate_matrix(op, circuit.convention), op.targets,
                  op.arity());
  return out;
}

FullUnitary circuit_unitary(const Circuit& circuit) {
  const int n = circuit.n_sites;
  guard(n, tolerances().limits.lift_max_sites, "circuit_unitary");
  const Eigen::Index dim = Eigen::Index{1} << n;
  FullUnitary u{n, ComplexMatrix::Identity(dim, dim)};
  for (const auto& layer : circuit.layers) {
    for (const auto& op : layer) {
      const ComplexMatrix g = gate_matrix(op, circuit.convention);
      for (Eigen::Index c = 0; c < dim; ++c) {
        ComplexVector col = u.matrix.col(c);
        apply_local(col, n, g, op.targets, op.arity());
        u.matrix.col(c) = col;
      }
    }
  }
  return u;
}

RealMatrix pair_term(int n_sites, int pair) {
  const int n = n_sites;
  const int lo = pair, hi = n + 1 - pair;
  if (lo < 1 || lo >= hi) throw ValidationError("pair_term: pair index out of range");
  guard(n, tolerances().limits.generator_max_sites, "pair_term");
  const Eigen::Index dim = Eigen::Index{1} << n;
  RealMatrix p = RealMatrix::Zero(dim, dim);
  const std::uint64_t bl = site_bit(n, lo), bh = site_bit(n, hi);
  for (Eigen::Index xi = 0; xi < dim; ++xi) {
    const std::uint64_t x = static_cast<std::uint64_t>(xi);
    if (((x & bl) != 0) == ((x & bh) != 0)) continue;
    p(static_cast<Eigen::Index>(x ^ (bl | bh)), xi) = string_sign(x, n, lo, hi);
  }
  return p;
}

EffectiveGenerator build_generator(int n_sites) {
  if (n_sites < 1) throw ValidationError("build_generator: n_sites must be >= 1");
  guard(n_sites, tolerances().limits.generator_max_sites, "build_generator");
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  EffectiveGenerator g{n_sites, RealMatrix::Zero(dim, dim)};
  for (int k = 1; 2 * k <= n_sites; ++k) g.matrix += pair_term(n_sites, k);
  return g;
}

double max_pair_commutator(int n_sites) {
  std::vector<RealMatrix> terms;
  for (int k = 1; 2 * k <= n_sites; ++k) terms.push_back(pair_term(n_sites, k));
  double worst = 0.0;
  for (std::size_t a = 0; a < terms.size(); ++a)
    for (std::size_t b = a + 1; b < terms.size(); ++b) {
      const RealMatrix c = terms[a] * terms[b] - terms[b] * terms[a];
      worst = std::max(worst, c.cwiseAbs().maxCoeff());
    }
  return worst;
}

StateVector apply_effective_gate(int n_sites, double theta, const StateVector& psi) {
  if (psi.n_sites != n_sites) throw ValidationError("apply_effective_gate: size mismatch");
  const int n = n_sites;
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  ComplexVector amps = psi.amplitudes;
  // Pair terms commute; each exp(-iαP) mixes x with x^pairmask when the two
  // pair bits differ.
  for (int k = 1; 2 * k <= n; ++k) {
    const int lo = k, hi = n + 1 - k;
    const std::uint64_t bl = site_bit(n, lo), bh = site_bit(n, hi);
    for (Eigen::Index xi = 0; xi < amps.size(); ++xi) {
      const std::uint64_t x = static_cast<std::uint64_t>(xi);
      if (!(x & bl) || (x & bh)) continue;
      const Eigen::Index y = static_cast<Eigen::Index>(x ^ (bl | bh));
      const double sign = string_sign(x, n, lo, hi);
      const cplx ax = amps(xi), ay = amps(y);
      amps(xi) = c * ax - kI * s * sign * ay;
      amps(y) = c * ay - kI * s * sign * ax;
    }
  }
  return {n, amps};
}

FullUnitary effective_gate(int n_sites, double theta) {
  guard(n_sites, tolerances().limits.generator_max_sites, "effective_gate");
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  FullUnitary u{n_sites, ComplexMatrix::Zero(dim, dim)};
  for (Eigen::Index c = 0; c < dim; ++c) {
    const StateVector col =
        apply_effective_gate(n_sites, theta, StateVector::basis(n_sites, std::uint64_t(c)));
    u.matrix.col(c) = col.amplitudes;
  }
  return u;
}

FullUnitary effective_gate_expm(int n_sites, double theta) {
  const EffectiveGenerator g = build_generator(n_sites);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g.matrix);
  const ComplexVector ph = (-kI * (theta / 2.0) * es.eigenvalues().cast<cplx>()).array().exp();
  const ComplexMatrix v = es.eigenvectors().cast<cplx>();
  return {n_sites, v * ph.asDiagonal() * v.adjoint()};
}

ComplexVector phase_fix_diagonal(int n_sites, double theta, double phi) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  ComplexVector d(dim);
  const std::uint64_t mid = n_sites % 2 ? site_bit(n_sites, (n_sites + 1) / 2) : 0;
  for (Eigen::Index xi = 0; xi < dim; ++xi) {
    const std::uint64_t x = static_cast<std::uint64_t>(xi);
    double a = phi * popcount(x);
    if (x & mid) a += theta / 2.0;
    d(xi) = std::exp(kI * a);
  }
  return d;
}

MappingReport verify_mapping(const chain::ChainParams& params) {
  const int n = params.n_sites;
  guard(n, tolerances().limits.dense_max_sites, "verify_mapping");
  MappingReport rep;
  rep.n_sites = n;
  rep.theta = params.theta;
  const auto single = fermion::single_propagator(params, params.tau);
  rep.phi = fermion::extract_transfer_phase(single, params.theta).phi;
  const FullUnitary dense = fermion::dense_oracle(params, params.tau);
  const ComplexMatrix fixed = dense.matrix * phase_fix_diagonal(n, params.theta, rep.phi).asDiagonal();
  const ComplexMatrix diff = fixed - effective_gate(n, params.theta).matrix;
  Eigen::Index r = 0, c = 0;
  rep.distance = diff.cwiseAbs().maxCoeff(&r, &c);
  rep.worst_row = static_cast<std::size_t>(r);
  rep.worst_col = static_cast<std::size_t>(c);
  rep.ok = rep.distance <= tolerances().mapping;
  return rep;
}

ZLayerEquivalence equivalent_up_to_z_layer(const ComplexMatrix& a, const ComplexMatrix& b,
                                           double tol) {
  const Eigen::Index dim = a.rows();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || a.cols() != dim || b.rows() != dim || b.cols() != dim)
    throw ValidationError("equivalent_up_to_z_layer: matrices must be 2^N square and equal size");

  ZLayerEquivalence best;
  best.residual = std::numeric_limits<double>::infinity();
  for (int side = 0; side < 2; ++side) {
    const ComplexMatrix d = side == 0 ? ComplexMatrix(b.adjoint() * a) : ComplexMatrix(a * b.adjoint());
    ComplexMatrix off = d;
    off.diagonal().setZero();
    double residual = max_abs(off);
    const double g = std::arg(d(0, 0));
    std::vector<double> z(n);
    for (int s = 1; s <= n; ++s)
      z[s - 1] = std::arg(d(static_cast<Eigen::Index>(site_bit(n, s)), static_cast<Eigen::Index>(site_bit(n, s)))) - g;
    for (Eigen::Index xi = 0; xi < dim; ++xi) {
      double a_pred = g;
      for (int s = 1; s <= n; ++s)
        if (static_cast<std::uint64_t>(xi) & site_bit(n, s)) a_pred += z[s - 1];
      residual = std::max(residual, std::abs(d(xi, xi) - std::exp(kI * a_pred)));
    }
    if (residual < best.residual) {
      best.residual = residual;
      best.layer_on_left = side == 1;
      best.global_phase = wrap_angle(g);
      best.z_angles.assign(z.begin(), z.end());
      for (double& v : best.z_angles) v = wrap_angle(v);
    }
  }
  best.equivalent = best.residual <= tol;
  return best;
}

Circuit compile_decomposition(int n_sites, double theta, double j_max,
                              const DecompositionOptions& opts) {
  const int n = n_sites;
  if (n < 3) throw ValidationError("compile_decomposition: n_sites must be >= 3");
  if (!(theta > 0.0 && theta <= kPi))
    throw ValidationError("compile_decomposition: theta must lie in (0, pi]");
  if (!(j_max > 0.0)) throw ValidationError("compile_decomposition: j_max must be > 0");

  Circuit circ;
  circ.n_sites = n;
  circ.convention = opts.convention;
  const double angle = opts.convention == AngleConvention::HalfAngle ? -theta : -theta / 2.0;

  // Odd-even transposition sort of the labels towards reversed order. Each
  // label pair meets exactly once; a mirror pair meeting gets the rotation
  // instead of the swap. Odd chains skip bond 1 in the first round.
  std::vector<int> label(n + 1);
  std::iota(label.begin(), label.end(), 0);
  auto reversed = [&] {
    for (int p = 1; p <= n; ++p)
      if (label[p] != n + 1 - p) return false;
    return true;
  };
  const int max_rounds = n + 2;
  for (int round = 0; round < max_rounds && !reversed(); ++round) {
    const int first = 1 + (round % 2);
    std::vector<GateOp> layer;
    for (int p = first; p + 1 <= n; p += 2) {
      if (n % 2 == 1 && round == 0 && p == 1) continue;
      if (label[p] > label[p + 1]) continue;
      GateOp op;
      op.targets = {p, p + 1};
      if (label[p] + label[p + 1] == n + 1) {
        op.kind = GateKind::ISwapTheta;
        op.angle = angle;
      } else {
        op.kind = GateKind::FSwap;
      }
      op.duration = gate_duration(op.kind, op.angle, j_max, opts.convention);
      std::swap(label[p], label[p + 1]);
      layer.push_back(op);
    }
    if (!layer.empty()) circ.layers.push_back(std::move(layer));
  }
  if (!reversed()) throw ToleranceError("compile_decomposition: swap network did not terminate");
  circ.validate();

  if (n <= opts.verify_max_sites) {
    const ComplexMatrix c = circuit_unitary(circ).matrix;
    const auto eq = equivalent_up_to_z_layer(c, effective_gate(n, theta).matrix,
                                             tolerances().decomposition);
    if (!eq.equivalent) {
      std::ostringstream msg;
      msg << "compile_decomposition: circuit differs from K_N beyond a Z layer (residual "
          << eq.residual << ")";
      throw ToleranceError(msg.str());
    }
  }
  return circ;
}

SpeedGain speed_gain(int n_sites, double theta, double j_max, AngleConvention conv) {
  SpeedGain g;
  chain::ChainSpec spec;
  spec.n_sites = n_sites;
  spec.theta = theta;
  spec.j_max = j_max;
  spec.validate();
  g.t_fst = chain::solve_gate_time(spec);
  DecompositionOptions opts;
  opts.convention = conv;
  opts.verify_max_sites = 0;
  g.t_decomp = compile_decomposition(n_sites, theta, j_max, opts).total_duration();
  g.ratio = g.t_decomp / g.t_fst;
  return g;
}

double even_small_angle_asymptote(int n_sites) {
  const double n = n_sites;
  return std::sqrt(3.0) * n / std::sqrt(n * n - 4.0);
}

}  // namespace fst::gates
