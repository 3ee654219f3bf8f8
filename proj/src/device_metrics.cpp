#include "fstkit/device_metrics.hpp"

#include "fstkit/gate_algebra.hpp"

#include <cmath>

namespace fst::device {

ComplexMatrix k3_target(double theta) { return gates::effective_gate(3, theta).matrix; }

ComplexMatrix computational_block(const DressedBasis& basis, const ComplexMatrix& columns, double gate_time) {
  if (columns.cols() != 8 || columns.rows() != basis.vectors.rows())
    throw ValidationError("computational_block: expected dim × 8 columns");
  ComplexMatrix m(8, 8);
  for (int y = 0; y < 8; ++y) {
    const RealVector& dy = basis.vectors.col(basis.computational[y]);
    for (int x = 0; x < 8; ++x) m(y, x) = dy.cast<cplx>().dot(columns.col(x));
  }
  for (int x = 0; x < 8; ++x)
    m.col(x) *= std::exp(kI * basis.energies(basis.computational[x]) * gate_time);
  return m;
}

namespace {

int bit(int x, int q) { return (x >> (2 - q)) & 1; }

// |Σ_x e^{-i z·bits(x)} c_x|
double overlap(const std::array<cplx, 8>& c, const std::array<double, 3>& z) {
  cplx s = 0.0;
  for (int x = 0; x < 8; ++x) {
    double ph = 0.0;
    for (int q = 0; q < 3; ++q) ph += z[q] * bit(x, q);
    s += std::exp(-kI * ph) * c[x];
  }
  return std::abs(s);
}

// Coordinate ascent: with the other angles fixed, the optimum for qubit q
// aligns the bit-1 partial sum with the bit-0 partial sum.
std::array<double, 3> ascend(const std::array<cplx, 8>& c, std::array<double, 3> z) {
  double last = -1.0;
  for (int sweep = 0; sweep < 200; ++sweep) {
    for (int q = 0; q < 3; ++q) {
      cplx p = 0.0, r = 0.0;
      for (int x = 0; x < 8; ++x) {
        double ph = 0.0;
        for (int o = 0; o < 3; ++o)
          if (o != q) ph += z[o] * bit(x, o);
        (bit(x, q) ? r : p) += std::exp(-kI * ph) * c[x];
      }
      if (std::abs(p) > 0.0 && std::abs(r) > 0.0) z[q] = wrap_angle(std::arg(r) - std::arg(p));
    }
    const double v = overlap(c, z);
    if (v - last < 1e-15) break;
    last = v;
  }
  return z;
}

}  // namespace

GateMetrics gate_metrics(const ComplexMatrix& m, double theta) {
  if (m.rows() != 8 || m.cols() != 8) throw ValidationError("gate_metrics: expected an 8×8 block");
  const ComplexMatrix k = k3_target(theta);
  const ComplexMatrix mk = m * k.adjoint();
  std::array<cplx, 8> c;
  for (int x = 0; x < 8; ++x) c[x] = mk(x, x);

  std::array<double, 3> best{};
  double best_val = -1.0;
  for (int start = 0; start < 8; ++start) {
    std::array<double, 3> z0{};
    for (int q = 0; q < 3; ++q) z0[q] = bit(start, q) ? kPi : 0.0;
    z0[1] += 0.5 * start;
    const auto z = ascend(c, z0);
    const double v = overlap(c, z);
    if (v > best_val + 1e-14) {
      best_val = v;
      best = z;
    }
  }
  GateMetrics g;
  const double norm2 = m.squaredNorm();
  g.avg_fidelity = (norm2 + best_val * best_val) / 72.0;
  g.leakage = std::max(0.0, 1.0 - norm2 / 8.0);
  g.z_corrections = best;
  return g;
}

TheoryPulse theory_pulse(double theta, double j) {
  if (!(theta > 0.0 && theta <= kPi)) throw ValidationError("theory_pulse: theta must lie in (0, pi]");
  if (!(j > 0.0)) throw ValidationError("theory_pulse: J must be > 0");
  const double root = std::sqrt((kPi - theta / 2.0) * theta);
  return {2.0 * j * (kPi - theta) / root, root / j};
}

}  // namespace fst::device
