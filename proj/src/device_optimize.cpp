#include "fstkit/device_optimize.hpp"

#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace fst::device {

double reference_exchange_rate(double gate_time_pi, double rise_time) {
  const double plateau = gate_time_pi - 4.0 * rise_time;
  if (!(plateau > 0.0)) throw ValidationError("theory_seed: gate time must exceed 4 * rise_time");
  return std::sqrt(kPi * kPi / 2.0) / plateau;
}

namespace {

// Smallest amplitude with |ḡ⁽¹⁾| = J: first sign change on a grid, then refined.
double solve_amplitude(const DeviceSpec& spec, int coupler, double j) {
  const double hi = 0.5 - std::abs(spec.coupler_bias(coupler)) - 1e-3;
  auto f = [&](double a) { return std::abs(sideband_coupling(spec, coupler, a)) - j; };
  constexpr int kGrid = 64;
  double a0 = 0.0, f0 = -j;
  for (int i = 1; i <= kGrid; ++i) {
    const double a1 = hi * i / kGrid, f1 = f(a1);
    if (f1 >= 0.0) {
      boost::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(f, a0, a1, f0, f1,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
      return 0.5 * (r.first + r.second);
    }
    a0 = a1;
    f0 = f1;
  }
  throw ValidationError("theory_seed: sideband coupling cannot reach the target rate");
}

}  // namespace

PulseSeed theory_seed(const DeviceSpec& spec, double theta, double gate_time_pi, double rise_time) {
  spec.validate();
  PulseSeed s;
  s.j = reference_exchange_rate(gate_time_pi, rise_time);
  s.theory = theory_pulse(theta, s.j);
  s.pulse.rise_time = rise_time;
  s.pulse.gate_time = s.theory.tau + 4.0 * rise_time;
  s.pulse.amp1 = solve_amplitude(spec, 1, s.j);
  s.pulse.amp2 = solve_amplitude(spec, 2, s.j);
  s.averaged = averaged_qubit_frequencies(spec, s.pulse.amp1, s.pulse.amp2);
  s.pulse.wd1 = std::abs(s.averaged[0] - s.averaged[1]) - s.theory.delta;
  s.pulse.wd2 = std::abs(s.averaged[2] - s.averaged[1]) - s.theory.delta;
  return s;
}

PulseEvaluation evaluate_pulse(const DeviceModel& model, const DressedBasis& basis, const PulseConfig& cfg,
                               double theta, const PropagationOptions& opts, bool check_convergence) {
  ComplexMatrix init(model.dim(), 8);
  for (int x = 0; x < 8; ++x) init.col(x) = basis.vectors.col(basis.computational[x]).cast<cplx>();
  PulseEvaluation e;
  ComplexMatrix cols;
  if (check_convergence) {
    ConvergenceReport r = propagate_checked(model, cfg, init, opts);
    cols = std::move(r.columns);
    e.halving_difference = r.halving_difference;
    e.unitarity_error = r.unitarity_error;
    e.converged = r.converged && r.unitarity_error < tolerances().propagator_unitarity;
  } else {
    cols = propagate_columns(model, cfg, init, opts);
    e.unitarity_error = max_abs(cols.adjoint() * cols - ComplexMatrix::Identity(8, 8));
  }
  e.block = computational_block(basis, cols, cfg.gate_time);
  e.metrics = gate_metrics(e.block, theta);
  return e;
}

namespace {

// Parameters are optimized as offsets from the initial point in natural
// units: 1e-3 Φ₀ for amplitudes, 2π·0.1 MHz for drive frequencies.
constexpr std::array<double, 4> kScale{1e-3, 1e-3, 0.1 * kTwoPiMHz, 0.1 * kTwoPiMHz};

struct Problem {
  const DeviceModel* model;
  DressedBasis basis;
  double theta;
  PulseConfig base;
  OptimizeOptions opts;
  std::array<double, 4> origin{};
  OptimizeResult* out;
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 4> best_u{};
  bool stop = false;

  PulseConfig config(const gsl_vector* u) const {
    PulseConfig c = base;
    c.amp1 = origin[0] + kScale[0] * gsl_vector_get(u, 0);
    c.amp2 = origin[1] + kScale[1] * gsl_vector_get(u, 1);
    c.wd1 = origin[2] + kScale[2] * gsl_vector_get(u, 2);
    c.wd2 = origin[3] + kScale[3] * gsl_vector_get(u, 3);
    return c;
  }

  double evaluate(const gsl_vector* u) {
    if (stop) return std::numeric_limits<double>::max();
    const PulseConfig c = config(u);
    double value;
    GateMetrics m;
    try {
      c.validate(model->spec());
      m = evaluate_pulse(*model, basis, c, theta, opts.propagation, false).metrics;
      value = m.infidelity();
    } catch (const ValidationError&) {
      value = 1.0;
      m.avg_fidelity = 0.0;
      m.leakage = 1.0;
    }
    ++out->evaluations;
    if (value < best) {
      best = value;
      for (int i = 0; i < 4; ++i) best_u[i] = gsl_vector_get(u, i);
      out->best = c;
      out->metrics = m;
    }
    TraceRow row{out->evaluations, best, out->metrics.leakage, out->best.amp1, out->best.amp2,
                 out->best.wd1, out->best.wd2};
    out->trace.push_back(row);
    if (out->evaluations >= opts.max_evaluations) {
      stop = true;
      out->budget_exhausted = best > opts.target_infidelity;
    }
    if (best <= opts.target_infidelity) stop = true;
    return value;
  }
};

double gsl_f(const gsl_vector* u, void* p) { return static_cast<Problem*>(p)->evaluate(u); }

// Forward differences with a relative step on the physical parameter.
void gsl_fdf(const gsl_vector* u, void* p, double* f, gsl_vector* g) {
  auto* pr = static_cast<Problem*>(p);
  *f = pr->evaluate(u);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> v(gsl_vector_alloc(4), gsl_vector_free);
  for (int i = 0; i < 4; ++i) {
    gsl_vector_memcpy(v.get(), u);
    const double phys = pr->origin[i] + kScale[i] * gsl_vector_get(u, i);
    const double step = pr->opts.fd_step * std::max(std::abs(phys), 1e-12) / kScale[i];
    gsl_vector_set(v.get(), i, gsl_vector_get(u, i) + step);
    gsl_vector_set(g, i, (pr->evaluate(v.get()) - *f) / step);
  }
}

void gsl_df(const gsl_vector* u, void* p, gsl_vector* g) {
  double f;
  gsl_fdf(u, p, &f, g);
}

}  // namespace

OptimizeResult optimize_pulse(const DeviceModel& model, double theta, const PulseConfig& initial,
                              const OptimizeOptions& opts) {
  if (opts.max_evaluations < 1) throw ValidationError("optimize_pulse: max_evaluations must be >= 1");
  if (!(opts.fd_step > 0.0)) throw ValidationError("optimize_pulse: fd_step must be > 0");
  initial.validate(model.spec());
  OptimizeResult out;
  out.best = initial;
  const DeviceSpec& s = model.spec();
  Problem pr{&model, dressed_basis(model, s.phi_dc1, s.phi_dc2), theta, initial, opts,
             {initial.amp1, initial.amp2, initial.wd1, initial.wd2}, &out};

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> u(gsl_vector_calloc(4), gsl_vector_free);
  pr.evaluate(u.get());
  out.initial_metrics = out.metrics;
  if (pr.stop) return out;

  gsl_set_error_handler_off();
  // Each pass restarts from the best point so far; a pass that ends without
  // improving it ends the search.
  auto restart_point = [&] {
    for (int i = 0; i < 4; ++i) gsl_vector_set(u.get(), i, pr.best_u[i]);
  };
  if (opts.method == OptimizerKind::QuasiNewton) {
    gsl_multimin_function_fdf fn{&gsl_f, &gsl_df, &gsl_fdf, 4, &pr};
    std::unique_ptr<gsl_multimin_fdfminimizer, decltype(&gsl_multimin_fdfminimizer_free)> mz(
        gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, 4), gsl_multimin_fdfminimizer_free);
    while (!pr.stop) {
      const double before = pr.best;
      restart_point();
      gsl_multimin_fdfminimizer_set(mz.get(), &fn, u.get(), 1.0, 0.1);
      bool converged = false;
      while (!pr.stop) {
        if (gsl_multimin_fdfminimizer_iterate(mz.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_gradient(mz->gradient, 1e-7) == GSL_SUCCESS) {
          converged = true;
          break;
        }
      }
      if (converged || !(pr.best < before)) break;
    }
  } else {
    gsl_multimin_function fn{&gsl_f, 4, &pr};
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> steps(gsl_vector_alloc(4), gsl_vector_free);
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> mz(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4), gsl_multimin_fminimizer_free);
    double step = 1.0;
    while (!pr.stop) {
      const double before = pr.best;
      restart_point();
      gsl_vector_set_all(steps.get(), step);
      gsl_multimin_fminimizer_set(mz.get(), &fn, u.get(), steps.get());
      while (!pr.stop) {
        if (gsl_multimin_fminimizer_iterate(mz.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(mz.get()), 1e-4) == GSL_SUCCESS) break;
      }
      if (!(pr.best < before)) break;
      step *= 0.5;
    }
  }
  return out;
}

DetuningTracking detuning_tracking(const DeviceSpec& spec, const PulseConfig& pulse, const PulseSeed& seed) {
  const auto w = averaged_qubit_frequencies(spec, pulse.amp1, pulse.amp2);
  DetuningTracking d;
  d.delta = {std::abs(w[0] - w[1]) - pulse.wd1, std::abs(w[2] - w[1]) - pulse.wd2};
  d.theory = seed.theory.delta;
  d.scale = std::max(std::abs(d.theory), seed.j);
  for (double x : d.delta) d.error = std::max(d.error, std::abs(x - d.theory) / d.scale);
  return d;
}

ZZScan zz_scan(const DeviceSpec& spec, double lo, double hi, int points) {
  if (!(hi > lo) || points < 2) throw ValidationError("zz_scan: need hi > lo and at least 2 points");
  if (lo < 0.0 || hi >= 0.5) throw ValidationError("zz_scan: bias range must lie in [0, 0.5)");
  ZZScan scan;
  const DeviceModel model(spec);
  auto zeta = [&](double phi, int pair) { return zz_coupling(model, phi, phi, pair); };
  for (int i = 0; i < points; ++i) {
    const double phi = lo + (hi - lo) * i / (points - 1);
    const ZZResult a = zeta(phi, 1), b = zeta(phi, 2);
    scan.points.push_back({phi, a.zeta, b.zeta, a.ambiguous || b.ambiguous});
  }
  for (int pair = 1; pair <= 2; ++pair) {
    auto& zeros = pair == 1 ? scan.zeros12 : scan.zeros23;
    for (int i = 0; i + 1 < points; ++i) {
      const ZZPoint& p = scan.points[i];
      const ZZPoint& q = scan.points[i + 1];
      const double za = pair == 1 ? p.zeta12 : p.zeta23;
      const double zb = pair == 1 ? q.zeta12 : q.zeta23;
      if (p.ambiguous || q.ambiguous || za == 0.0 || std::signbit(za) == std::signbit(zb)) continue;
      boost::uintmax_t iters = 100;
      const auto r = boost::math::tools::toms748_solve([&](double phi) { return zeta(phi, pair).zeta; },
                                                       p.phi, q.phi, za, zb,
                                                       boost::math::tools::eps_tolerance<double>(40), iters);
      zeros.push_back(0.5 * (r.first + r.second));
    }
  }
  return scan;
}

}  // namespace fst::device
