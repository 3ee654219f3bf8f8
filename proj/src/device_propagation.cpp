#include "fstkit/device_propagation.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace fst::device {

void PulseConfig::validate(const DeviceSpec& spec) const {
  if (!(rise_time > 0.0)) throw ValidationError("pulse: rise_time must be > 0");
  if (!(gate_time >= 0.0)) throw ValidationError("pulse: gate_time must be >= 0");
  if (gate_time > 0.0 && !(gate_time > 4.0 * rise_time))
    throw ValidationError("pulse: gate_time must exceed 4 * rise_time");
  if (amp1 < 0.0 || amp2 < 0.0) throw ValidationError("pulse: amplitudes must be >= 0");
  if (!(sample_rate > 0.0)) throw ValidationError("pulse: sample_rate must be > 0");
  if (std::abs(spec.phi_dc1) + amp1 >= 0.5 || std::abs(spec.phi_dc2) + amp2 >= 0.5)
    throw ValidationError("pulse: |phi_dc| + amplitude must stay below 0.5 (one flux branch)");
}

double flattop(double t, double rise_time, double gate_time) {
  return (1.0 + std::erf(t / rise_time - 2.0)) * (1.0 + std::erf((gate_time - t) / rise_time - 2.0)) / 4.0;
}

namespace {

double held_time(double t, double rate) { return std::floor(t * rate) / rate; }

}  // namespace

EnvelopeSample pulse_envelope(const DeviceSpec& spec, const PulseConfig& cfg, double t) {
  if (t < 0.0 || t > cfg.gate_time) throw ValidationError("pulse_envelope: t outside [0, gate_time]");
  const double f = flattop(held_time(t, cfg.sample_rate), cfg.rise_time, cfg.gate_time);
  EnvelopeSample s;
  s.a1 = cfg.amp1 * f;
  s.a2 = cfg.amp2 * f;
  s.phi1 = spec.phi_dc1 + s.a1 * std::cos(cfg.wd1 * t);
  s.phi2 = spec.phi_dc2 + s.a2 * std::cos(cfg.wd2 * t);
  return s;
}

namespace {

constexpr std::array<double, 4> kGaussX{-0.8611363115940526, -0.3399810435848563,
                                        0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussW{0.3478548451374538, 0.6521451548625461,
                                        0.6521451548625461, 0.3478548451374538};

class Stepper {
 public:
  Stepper(const DeviceModel& model, const PulseConfig& cfg, const ComplexMatrix& initial)
      : model_(model), cfg_(cfg) {
    const DeviceSpec& s = model.spec();
    const RealMatrix h = model.hamiltonian(s.phi_dc1, s.phi_dc2);
    wc_dc_ = {flux_to_frequency(s, 1, s.phi_dc1), flux_to_frequency(s, 2, s.phi_dc2)};
    for (int b = 0; b < 2; ++b) {
      const auto& idx = model.parity_blocks()[b];
      const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
      RealMatrix hb(m, m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) hb(i, j) = h(idx[i], idx[j]);
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(hb);
      energies_[b] = es.eigenvalues();
      vectors_[b] = es.eigenvectors().cast<cplx>();
      n1_[b].resize(m);
      n2_[b].resize(m);
      state_[b].resize(m, initial.cols());
      for (Eigen::Index i = 0; i < m; ++i) {
        n1_[b][i] = static_cast<int>(model.coupler_number(1)(idx[i]));
        n2_[b][i] = static_cast<int>(model.coupler_number(2)(idx[i]));
        state_[b].row(i) = initial.row(idx[i]);
      }
    }
  }

  // Static flow for duration h, cached per distinct h.
  void static_flow(double h) {
    auto it = cache_.find(h);
    if (it == cache_.end()) {
      std::array<ComplexMatrix, 2> p;
      for (int b = 0; b < 2; ++b) {
        const ComplexVector ph = (-kI * h * energies_[b].cast<cplx>()).array().exp();
        p[b] = vectors_[b] * ph.asDiagonal() * vectors_[b].transpose();
      }
      it = cache_.emplace(h, std::move(p)).first;
    }
    for (int b = 0; b < 2; ++b) state_[b] = (it->second[b] * state_[b]).eval();
  }

  // Exact flow of the diagonal coupler detuning over [ta, tb] with envelope
  // values (a1, a2) held.
  void detuning_flow(double ta, double tb, double a1, double a2) {
    const DeviceSpec& s = model_.spec();
    const double half = 0.5 * (tb - ta), mid = 0.5 * (tb + ta);
    double i1 = 0.0, i2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double t = mid + half * kGaussX[k];
      if (a1 != 0.0)
        i1 += kGaussW[k] * (flux_to_frequency(s, 1, s.phi_dc1 + a1 * std::cos(cfg_.wd1 * t)) - wc_dc_[0]);
      if (a2 != 0.0)
        i2 += kGaussW[k] * (flux_to_frequency(s, 2, s.phi_dc2 + a2 * std::cos(cfg_.wd2 * t)) - wc_dc_[1]);
    }
    i1 *= half;
    i2 *= half;
    if (i1 == 0.0 && i2 == 0.0) return;
    const std::array<cplx, 3> p1{1.0, std::exp(-kI * i1), std::exp(-2.0 * kI * i1)};
    const std::array<cplx, 3> p2{1.0, std::exp(-kI * i2), std::exp(-2.0 * kI * i2)};
    for (int b = 0; b < 2; ++b)
      for (Eigen::Index i = 0; i < state_[b].rows(); ++i) {
        const int k1 = n1_[b][i], k2 = n2_[b][i];
        const cplx ph = (k1 < 3 ? p1[k1] : std::exp(-kI * double(k1) * i1)) *
                        (k2 < 3 ? p2[k2] : std::exp(-kI * double(k2) * i2));
        state_[b].row(i) *= ph;
      }
  }

  void strang(double t, double h, double a1, double a2) {
    detuning_flow(t, t + 0.5 * h, a1, a2);
    static_flow(h);
    detuning_flow(t + 0.5 * h, t + h, a1, a2);
  }

  ComplexMatrix result() const {
    ComplexMatrix out(model_.dim(), state_[0].cols());
    for (int b = 0; b < 2; ++b) {
      const auto& idx = model_.parity_blocks()[b];
      for (std::size_t i = 0; i < idx.size(); ++i) out.row(idx[i]) = state_[b].row(i);
    }
    return out;
  }

 private:
  const DeviceModel& model_;
  const PulseConfig& cfg_;
  std::array<double, 2> wc_dc_{};
  std::array<RealVector, 2> energies_;
  std::array<ComplexMatrix, 2> vectors_;
  std::array<std::vector<int>, 2> n1_, n2_;
  std::array<ComplexMatrix, 2> state_;
  std::map<double, std::array<ComplexMatrix, 2>> cache_;
};

// Symmetric compositions of the second-order step.
const std::vector<double>& composition_weights(SplitScheme scheme) {
  static const std::vector<double> second{1.0};
  static const std::vector<double> yoshida = [] {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    return std::vector<double>{w1, 1.0 - 2.0 * w1, w1};
  }();
  static const std::vector<double> suzuki = [] {
    const double w = 1.0 / (4.0 - std::cbrt(4.0));
    return std::vector<double>{w, w, 1.0 - 4.0 * w, w, w};
  }();
  static const std::vector<double> kahan_li = [] {
    const std::vector<double> half{0.39216144400731413928, 0.33259913678935943860,
                                   -0.70624617255763935981, 0.08221359629355080023,
                                   0.79854399093482996340};
    std::vector<double> w(half);
    for (int k = 3; k >= 0; --k) w.push_back(half[k]);
    return w;
  }();
  switch (scheme) {
    case SplitScheme::Second: return second;
    case SplitScheme::Fourth: return suzuki;
    case SplitScheme::FourthTriple: return yoshida;
    case SplitScheme::Sixth: return kahan_li;
  }
  return second;
}

}  // namespace

ComplexMatrix propagate_columns(const DeviceModel& model, const PulseConfig& cfg,
                                const ComplexMatrix& initial, const PropagationOptions& opts) {
  cfg.validate(model.spec());
  if (initial.rows() != model.dim()) throw ValidationError("propagate: initial columns have wrong dimension");
  if (opts.substeps_per_sample < 1) throw ValidationError("propagate: substeps_per_sample must be >= 1");
  if (cfg.gate_time == 0.0) return initial;

  Stepper stepper(model, cfg, initial);
  const double period = 1.0 / cfg.sample_rate;
  const long samples = static_cast<long>(std::ceil(cfg.gate_time * cfg.sample_rate - 1e-9));
  const std::vector<double>& weights = composition_weights(opts.scheme);
  for (long k = 0; k < samples; ++k) {
    const double ta = k * period;
    const double tb = std::min((k + 1) * period, cfg.gate_time);
    const double f = flattop(ta, cfg.rise_time, cfg.gate_time);
    const double a1 = cfg.amp1 * f, a2 = cfg.amp2 * f;
    const int m = opts.substeps_per_sample;
    const double h = (tb - ta) / m;
    for (int s = 0; s < m; ++s) {
      double t = ta + s * h;
      for (double w : weights) {
        stepper.strang(t, w * h, a1, a2);
        t += w * h;
      }
    }
  }
  return stepper.result();
}

Propagation propagate(const DeviceModel& model, const PulseConfig& cfg, const PropagationOptions& opts) {
  Propagation p;
  p.unitary = propagate_columns(model, cfg, ComplexMatrix::Identity(model.dim(), model.dim()), opts);
  p.unitarity_error =
      max_abs(p.unitary.adjoint() * p.unitary - ComplexMatrix::Identity(model.dim(), model.dim()));
  return p;
}

ConvergenceReport propagate_checked(const DeviceModel& model, const PulseConfig& cfg,
                                    const ComplexMatrix& initial, const PropagationOptions& opts) {
  ConvergenceReport r;
  const ComplexMatrix coarse = propagate_columns(model, cfg, initial, opts);
  PropagationOptions fine = opts;
  fine.substeps_per_sample *= 2;
  r.columns = propagate_columns(model, cfg, initial, fine);
  r.halving_difference = max_abs(r.columns - coarse);
  const ComplexMatrix gram = r.columns.adjoint() * r.columns;
  r.unitarity_error = max_abs(gram - initial.adjoint() * initial);
  r.converged = r.halving_difference < tolerances().propagator_convergence;
  return r;
}

}  // namespace fst::device
