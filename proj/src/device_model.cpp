#include "fstkit/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fst::device {

DeviceSpec DeviceSpec::reference() {
  DeviceSpec s;
  s.w1 = 5.05 * kTwoPiGHz;
  s.w2 = 5.00 * kTwoPiGHz;
  s.w3 = 5.075 * kTwoPiGHz;
  s.wc1 = 6.086 * kTwoPiGHz;
  s.wc2 = 6.106 * kTwoPiGHz;
  s.a1 = s.a2 = s.a3 = -300.0 * kTwoPiMHz;
  s.ac1 = s.ac2 = -350.0 * kTwoPiMHz;
  s.g1c1 = 100.0 * kTwoPiMHz;
  s.g2c2 = 100.0 * kTwoPiMHz;
  s.g2c1 = -100.0 * kTwoPiMHz;
  s.g3c2 = -100.0 * kTwoPiMHz;
  s.g12 = s.g23 = -6.6 * kTwoPiMHz;
  s.dc1 = s.dc2 = 0.5;
  s.phi_dc1 = s.phi_dc2 = 0.3;
  s.levels = 3;
  return s;
}

void DeviceSpec::validate() const {
  if (levels < 2 || levels > 6) throw ValidationError("device: levels must be in 2..6");
  for (double d : {dc1, dc2})
    if (!(d >= 0.0 && d <= 1.0)) throw ValidationError("device: coupler asymmetry must be in [0, 1]");
  for (double w : {w1, w2, w3, wc1, wc2})
    if (!(w > 0.0)) throw ValidationError("device: frequencies must be > 0");
  for (double p : {phi_dc1, phi_dc2})
    if (!(std::abs(p) < 0.5)) throw ValidationError("device: DC bias must satisfy |phi| < 0.5");
}

double DeviceSpec::qubit_frequency(int q) const { return q == 1 ? w1 : q == 2 ? w2 : w3; }
double DeviceSpec::qubit_anharmonicity(int q) const { return q == 1 ? a1 : q == 2 ? a2 : a3; }
double DeviceSpec::coupler_alpha(int c) const { return c == 1 ? ac1 : ac2; }
double DeviceSpec::coupler_asymmetry(int c) const { return c == 1 ? dc1 : dc2; }
double DeviceSpec::coupler_bias(int c) const { return c == 1 ? phi_dc1 : phi_dc2; }

double DeviceSpec::coupler_max_frequency(int c) const {
  const double bias_freq = c == 1 ? wc1 : wc2;
  const double a = coupler_alpha(c);
  return a + (bias_freq - a) / flux_factor(coupler_bias(c), coupler_asymmetry(c));
}

std::vector<std::string> DeviceSpec::warnings() const {
  std::vector<std::string> out;
  const double limit = tolerances().dispersive_ratio_warning;
  struct Link {
    const char* name;
    double g, wq, wc;
  };
  for (const Link& l : {Link{"g1c1", g1c1, w1, wc1}, Link{"g2c1", g2c1, w2, wc1},
                        Link{"g2c2", g2c2, w2, wc2}, Link{"g3c2", g3c2, w3, wc2}}) {
    const double ratio = std::abs(l.g / (l.wc - l.wq));
    if (ratio > limit) {
      std::ostringstream msg;
      msg << l.name << ": |g/(wc-w)| = " << ratio << " exceeds " << limit;
      out.push_back(msg.str());
    }
  }
  const double gmin = std::min({std::abs(g1c1), std::abs(g2c1), std::abs(g2c2), std::abs(g3c2)});
  if (std::max(std::abs(g12), std::abs(g23)) > 0.2 * gmin)
    out.push_back("direct qubit coupling is not small against the coupler couplings");
  return out;
}

double flux_factor(double phi, double d) {
  const double c = std::cos(kPi * phi), s = std::sin(kPi * phi);
  return std::pow(c * c + d * d * s * s, 0.25);
}

double flux_to_frequency(const DeviceSpec& spec, int coupler, double phi) {
  if (coupler != 1 && coupler != 2) throw ValidationError("flux_to_frequency: coupler must be 1 or 2");
  const double a = spec.coupler_alpha(coupler);
  return a + (spec.coupler_max_frequency(coupler) - a) *
                 flux_factor(phi, spec.coupler_asymmetry(coupler));
}

DeviceModel::DeviceModel(const DeviceSpec& spec) : spec_(spec) {
  spec_.validate();
  const int L = spec_.levels;
  dim_ = 1;
  for (int k = 0; k < kModes; ++k) dim_ *= L;
  fixed_ = RealMatrix::Zero(dim_, dim_);
  nc1_ = RealVector::Zero(dim_);
  nc2_ = RealVector::Zero(dim_);

  const std::array<double, kModes> alpha{spec_.a1, spec_.a2, spec_.a3, spec_.ac1, spec_.ac2};
  const std::array<double, 3> wq{spec_.w1, spec_.w2, spec_.w3};
  struct Coupling {
    int i, j;
    double g;
  };
  const std::array<Coupling, 6> couplings{Coupling{0, 3, spec_.g1c1}, Coupling{1, 3, spec_.g2c1},
                                          Coupling{1, 4, spec_.g2c2}, Coupling{2, 4, spec_.g3c2},
                                          Coupling{0, 1, spec_.g12}, Coupling{1, 2, spec_.g23}};

  for (Eigen::Index x = 0; x < dim_; ++x) {
    const auto n = occupation(x);
    double diag = 0.0;
    int total = 0;
    for (int k = 0; k < kModes; ++k) {
      if (k < 3) diag += wq[k] * n[k];
      diag += 0.5 * alpha[k] * n[k] * (n[k] - 1);
      total += n[k];
    }
    fixed_(x, x) = diag;
    nc1_(x) = n[3];
    nc2_(x) = n[4];
    blocks_[total % 2].push_back(x);

    // -g (b_i† - b_i)(b_j† - b_j): each factor raises with +sqrt(n+1) or
    // lowers with -sqrt(n).
    for (const auto& c : couplings) {
      if (c.g == 0.0) continue;
      for (int di : {+1, -1}) {
        const int ni = n[c.i] + di;
        if (ni < 0 || ni >= L) continue;
        const double fi = di > 0 ? std::sqrt(ni) : -std::sqrt(n[c.i]);
        for (int dj : {+1, -1}) {
          const int nj = n[c.j] + dj;
          if (nj < 0 || nj >= L) continue;
          const double fj = dj > 0 ? std::sqrt(nj) : -std::sqrt(n[c.j]);
          auto m = n;
          m[c.i] = ni;
          m[c.j] = nj;
          fixed_(index(m), x) += -c.g * fi * fj;
        }
      }
    }
  }
}

Eigen::Index DeviceModel::index(const std::array<int, kModes>& occ) const {
  Eigen::Index x = 0;
  for (int k = 0; k < kModes; ++k) x = x * spec_.levels + occ[k];
  return x;
}

std::array<int, kModes> DeviceModel::occupation(Eigen::Index x) const {
  std::array<int, kModes> n{};
  for (int k = kModes - 1; k >= 0; --k) {
    n[k] = static_cast<int>(x % spec_.levels);
    x /= spec_.levels;
  }
  return n;
}

Eigen::Index DeviceModel::computational_index(int x) const {
  return index({(x >> 2) & 1, (x >> 1) & 1, x & 1, 0, 0});
}

RealMatrix DeviceModel::hamiltonian(double phi_c1, double phi_c2) const {
  RealMatrix h = fixed_;
  h.diagonal() += flux_to_frequency(spec_, 1, phi_c1) * nc1_ + flux_to_frequency(spec_, 2, phi_c2) * nc2_;
  return h;
}

RealMatrix build_hamiltonian(const DeviceSpec& spec, double phi_c1, double phi_c2) {
  return DeviceModel(spec).hamiltonian(phi_c1, phi_c2);
}

Eigen::Index dressed_index(const DressedBasis& basis, Eigen::Index bare, double* overlap) {
  Eigen::Index best = 0;
  const double w = basis.vectors.row(bare).cwiseAbs2().maxCoeff(&best);
  if (overlap) *overlap = w;
  return best;
}

DressedBasis dressed_basis(const DeviceModel& model, double phi_c1, double phi_c2) {
  DressedBasis b;
  const RealMatrix h = model.hamiltonian(phi_c1, phi_c2);
  b.energies = RealVector::Zero(model.dim());
  b.vectors = RealMatrix::Zero(model.dim(), model.dim());
  // Diagonalize per parity block; columns are then sorted by energy.
  std::vector<std::pair<double, RealVector>> cols;
  for (const auto& block : model.parity_blocks()) {
    const Eigen::Index m = static_cast<Eigen::Index>(block.size());
    RealMatrix hb(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) hb(i, j) = h(block[i], block[j]);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(hb);
    for (Eigen::Index k = 0; k < m; ++k) {
      RealVector v = RealVector::Zero(model.dim());
      for (Eigen::Index i = 0; i < m; ++i) v(block[i]) = es.eigenvectors()(i, k);
      // Gauge: largest bare component positive.
      Eigen::Index imax = 0;
      v.cwiseAbs().maxCoeff(&imax);
      if (v(imax) < 0.0) v = -v;
      cols.emplace_back(es.eigenvalues()(k), std::move(v));
    }
  }
  std::stable_sort(cols.begin(), cols.end(),
                   [](const auto& a, const auto& c) { return a.first < c.first; });
  for (Eigen::Index k = 0; k < model.dim(); ++k) {
    b.energies(k) = cols[k].first;
    b.vectors.col(k) = cols[k].second;
  }
  const double thr = tolerances().zz_overlap;
  for (int x = 0; x < 8; ++x) {
    b.computational[x] = dressed_index(b, model.computational_index(x), &b.overlap[x]);
    if (b.overlap[x] < thr) b.ambiguous = true;
  }
  return b;
}

ZZResult zz_coupling(const DeviceModel& model, double phi_c1, double phi_c2, int pair) {
  if (pair != 1 && pair != 2) throw ValidationError("zz_coupling: pair must be 1 or 2");
  const DressedBasis b = dressed_basis(model, phi_c1, phi_c2);
  // Computational labels: qubit 1 is bit 2.
  const int hi = pair == 1 ? 0b100 : 0b010;
  const int lo = pair == 1 ? 0b010 : 0b001;
  ZZResult r;
  const std::array<int, 4> states{0, hi, lo, hi | lo};
  std::array<double, 4> e{};
  for (int k = 0; k < 4; ++k) {
    e[k] = b.energies(b.computational[states[k]]);
    r.min_overlap = std::min(r.min_overlap, b.overlap[states[k]]);
  }
  r.zeta = e[3] - e[1] - e[2] + e[0];
  r.ambiguous = r.min_overlap < tolerances().zz_overlap;
  return r;
}

namespace {

// g²/Δ + g²/Σ shift of a qubit at frequency wq from a coupler at wc.
double dispersive_shift(double g, double wq, double wc) {
  return g * g / (wc - wq) + g * g / (wc + wq);
}

double swt_coupling(double g, double ga, double gb, double wa, double wb, double wc) {
  double s = 0.0;
  for (double w : {wa, wb}) s += 1.0 / (wc - w) + 1.0 / (wc + w);
  return g - 0.5 * ga * gb * s;
}

}  // namespace

SwtParams swt_effective_params(const DeviceSpec& spec, double phi_c1, double phi_c2) {
  const double c1 = flux_to_frequency(spec, 1, phi_c1);
  const double c2 = flux_to_frequency(spec, 2, phi_c2);
  SwtParams p;
  p.w1 = spec.w1 - dispersive_shift(spec.g1c1, spec.w1, c1);
  p.w2 = spec.w2 - dispersive_shift(spec.g2c1, spec.w2, c1) - dispersive_shift(spec.g2c2, spec.w2, c2);
  p.w3 = spec.w3 - dispersive_shift(spec.g3c2, spec.w3, c2);
  p.g12 = swt_coupling(spec.g12, spec.g1c1, spec.g2c1, spec.w1, spec.w2, c1);
  p.g23 = swt_coupling(spec.g23, spec.g2c2, spec.g3c2, spec.w2, spec.w3, c2);
  p.max_dispersive_ratio = std::max({std::abs(spec.g1c1 / (c1 - spec.w1)), std::abs(spec.g2c1 / (c1 - spec.w2)),
                                     std::abs(spec.g2c2 / (c2 - spec.w2)), std::abs(spec.g3c2 / (c2 - spec.w3))});
  p.dispersive_warning = p.max_dispersive_ratio > tolerances().dispersive_ratio_warning;
  return p;
}

NumericCoupling numeric_exchange_coupling(const DeviceSpec& spec, int pair, double phi_c1,
                                          double phi_c2, double spectator_offset) {
  if (pair != 1 && pair != 2) throw ValidationError("numeric_exchange_coupling: pair must be 1 or 2");
  // Pair 1 sweeps q1 through q2; pair 2 sweeps q3 through q2.
  const int swept = pair == 1 ? 1 : 3;
  const int spectator = pair == 1 ? 3 : 1;
  DeviceSpec base = spec;
  (spectator == 1 ? base.w1 : base.w3) += spectator_offset;

  auto with_swept = [&](double w) {
    DeviceSpec s = base;
    (swept == 1 ? s.w1 : s.w3) = w;
    return s;
  };
  struct Split {
    double gap;
    double sign;
  };
  auto splitting = [&](double w) {
    const DeviceSpec s = with_swept(w);
    const DeviceModel model(s);
    const RealMatrix h = model.hamiltonian(phi_c1, phi_c2);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    std::array<int, kModes> a{}, b{};
    a[swept - 1] = 1;
    b[1] = 1;
    const Eigen::Index ia = model.index(a), ib = model.index(b);
    // The two eigenstates with the largest weight in span{|a>, |b>}.
    std::vector<std::pair<double, Eigen::Index>> weight;
    for (Eigen::Index k = 0; k < model.dim(); ++k) {
      const double va = es.eigenvectors()(ia, k), vb = es.eigenvectors()(ib, k);
      weight.emplace_back(va * va + vb * vb, k);
    }
    std::partial_sort(weight.begin(), weight.begin() + 2, weight.end(),
                      [](const auto& x, const auto& y) { return x.first > y.first; });
    Eigen::Index lo = weight[0].second, hi = weight[1].second;
    if (es.eigenvalues()(lo) > es.eigenvalues()(hi)) std::swap(lo, hi);
    const double prod = es.eigenvectors()(ia, lo) * es.eigenvectors()(ib, lo);
    return Split{es.eigenvalues()(hi) - es.eigenvalues()(lo), prod > 0 ? -1.0 : 1.0};
  };

  // Golden-section search for the minimal gap around the middle qubit.
  const SwtParams ref = swt_effective_params(base, phi_c1, phi_c2);
  const double centre = spec.w2 + (swept == 1 ? spec.w1 - ref.w1 : spec.w3 - ref.w3) - (spec.w2 - ref.w2);
  double a = centre - 50.0 * kTwoPiMHz, b = centre + 50.0 * kTwoPiMHz;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = splitting(c).gap, fd = splitting(d).gap;
  for (int it = 0; it < 80 && (b - a) > 1e-9 * kTwoPiMHz; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = splitting(c).gap;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = splitting(d).gap;
    }
  }
  NumericCoupling out;
  out.crossing_frequency = 0.5 * (a + b);
  const Split s = splitting(out.crossing_frequency);
  out.g_numeric = s.sign * 0.5 * s.gap;
  const SwtParams at = swt_effective_params(with_swept(out.crossing_frequency), phi_c1, phi_c2);
  out.g_swt = pair == 1 ? at.g12 : at.g23;
  return out;
}

double sideband_coupling(const DeviceSpec& spec, int coupler, double amp, int grid) {
  if (coupler != 1 && coupler != 2) throw ValidationError("sideband_coupling: coupler must be 1 or 2");
  if (amp < 0.0) throw ValidationError("sideband_coupling: amplitude must be >= 0");
  const double bias = spec.coupler_bias(coupler);
  if (std::abs(bias) + amp >= 0.5)
    throw ValidationError("sideband_coupling: flux excursion leaves the flux branch");
  double acc = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double x = kTwoPi * k / grid;
    const double phi = bias + amp * std::cos(x);
    const SwtParams p = coupler == 1 ? swt_effective_params(spec, phi, spec.phi_dc2)
                                     : swt_effective_params(spec, spec.phi_dc1, phi);
    acc += (coupler == 1 ? p.g12 : p.g23) * std::cos(x);
  }
  return acc / grid;
}

std::array<double, 3> averaged_qubit_frequencies(const DeviceSpec& spec, double amp1, double amp2,
                                                 int grid) {
  const SwtParams s0 = swt_effective_params(spec, spec.phi_dc1, spec.phi_dc2);
  std::array<double, 3> r{0.0, 0.0, 0.0};
  for (int k = 0; k < grid; ++k) {
    const double x = kTwoPi * k / grid;
    const SwtParams s1 = swt_effective_params(spec, spec.phi_dc1 + amp1 * std::cos(x), spec.phi_dc2);
    const SwtParams s2 = swt_effective_params(spec, spec.phi_dc1, spec.phi_dc2 + amp2 * std::cos(x));
    r[0] += s1.w1;
    r[1] += s1.w2 + s2.w2 - s0.w2;
    r[2] += s2.w3;
  }
  for (double& v : r) v /= grid;
  return r;
}

}  // namespace fst::device
