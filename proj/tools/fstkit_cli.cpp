// Batch front-end: every subcommand writes result.json plus its CSV/JSON
// artifacts into the output directory.
//
// Exit codes: 0 ok, 1 malformed config, 2 validation failure, 3 numerical
// tolerance failure.

#include "fstkit/serialization.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <thread>

namespace fs = std::filesystem;
using namespace fst;
using io::json;

namespace {

struct Artifacts {
  json input = json::object();
  json result = json::object();
  std::map<std::string, std::string> files;  // name -> contents
  bool tolerance_failed = false;
  std::string tolerance_message;
};

// Writes into a sibling temp directory, then renames it into place.
void commit_outputs(const fs::path& out, const Artifacts& a) {
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  fs::create_directories(parent);
  std::mt19937_64 rng(std::random_device{}());
  const fs::path tmp = parent / (out.filename().string() + ".tmp-" + std::to_string(rng() % 1000000007));
  fs::create_directories(tmp);
  for (const auto& [name, text] : a.files) io::write_text_file((tmp / name).string(), text);
  if (fs::exists(out)) fs::remove_all(out);
  fs::rename(tmp, out);
}

double clamp_theta(double theta) {
  const double lo = 1e-6;
  if (theta < lo || theta > kPi) {
    const double c = std::clamp(theta, lo, kPi);
    std::cerr << "warning: theta " << theta << " clamped to " << c << "\n";
    return c;
  }
  return theta;
}

int worker_count() {
  if (const char* env = std::getenv("FSTKIT_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs task(i) for i in [0, n) on a pool; results are stored by index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// "a..b" or "a,b,c" with integer entries.
std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> out;
  try {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
      const int a = std::stoi(text.substr(0, dots)), b = std::stoi(text.substr(dots + 2));
      for (int n = a; n <= b; ++n) out.push_back(n);
    } else {
      std::stringstream ss(text);
      for (std::string tok; std::getline(ss, tok, ',');) out.push_back(std::stoi(tok));
    }
  } catch (const std::exception&) {
    throw io::ConfigError("cannot parse integer range '" + text + "'");
  }
  if (out.empty()) throw io::ConfigError("empty range '" + text + "'");
  return out;
}

// "a..b" (with `points` uniform samples) or "a,b,c"; entries are angles.
std::vector<double> parse_angle_range(const std::string& text, int points) {
  std::vector<double> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const double a = io::parse_angle(text.substr(0, dots)), b = io::parse_angle(text.substr(dots + 2));
    if (points < 2) throw io::ConfigError("--theta-points must be >= 2 for a range");
    for (int i = 0; i < points; ++i) out.push_back(a + (b - a) * i / (points - 1));
  } else {
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) out.push_back(io::parse_angle(tok));
  }
  if (out.empty()) throw io::ConfigError("empty range '" + text + "'");
  return out;
}

void apply_tolerance_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw io::ConfigError("--tol expects name=value, got '" + kv + "'");
  const std::string name = kv.substr(0, eq);
  double value;
  try {
    value = std::stod(kv.substr(eq + 1));
  } catch (const std::exception&) {
    throw io::ConfigError("--tol " + name + ": value is not a number");
  }
  Tolerances& t = tolerances();
  static const std::map<std::string, double Tolerances::*> fields{
      {"mirror_symmetry", &Tolerances::mirror_symmetry},
      {"eigenvalue", &Tolerances::eigenvalue},
      {"gap_pattern", &Tolerances::gap_pattern},
      {"unitarity_single", &Tolerances::unitarity_single},
      {"fst_structure", &Tolerances::fst_structure},
      {"middle_phase", &Tolerances::middle_phase},
      {"unitarity_full", &Tolerances::unitarity_full},
      {"lift_vs_dense", &Tolerances::lift_vs_dense},
      {"mapping", &Tolerances::mapping},
      {"decomposition", &Tolerances::decomposition},
      {"generator_commutator", &Tolerances::generator_commutator},
      {"state_norm", &Tolerances::state_norm},
      {"method_agreement", &Tolerances::method_agreement},
      {"parity_definite", &Tolerances::parity_definite},
      {"correlator", &Tolerances::correlator},
      {"propagator_unitarity", &Tolerances::propagator_unitarity},
      {"propagator_convergence", &Tolerances::propagator_convergence},
      {"dispersive_ratio_warning", &Tolerances::dispersive_ratio_warning},
      {"zz_overlap", &Tolerances::zz_overlap}};
  static const std::map<std::string, int SizeLimits::*> limits{
      {"dense_max_sites", &SizeLimits::dense_max_sites},
      {"lift_max_sites", &SizeLimits::lift_max_sites},
      {"state_max_sites", &SizeLimits::state_max_sites},
      {"generator_max_sites", &SizeLimits::generator_max_sites}};
  if (auto it = fields.find(name); it != fields.end()) {
    t.*(it->second) = value;
  } else if (auto jt = limits.find(name); jt != limits.end()) {
    t.limits.*(jt->second) = static_cast<int>(value);
  } else {
    throw io::ConfigError("--tol: unknown tolerance '" + name + "'");
  }
}

// --jmax in rad/s, or --jmax-hz in cycles per second.
void add_jmax(CLI::App* app, double& rad) {
  auto* a = app->add_option("--jmax", rad, "maximal coupling (rad/s)");
  app->add_option_function<double>("--jmax-hz", [&rad](double hz) { rad = kTwoPi * hz; },
                                   "maximal coupling (Hz)")
      ->excludes(a);
}

// Chain inputs shared by several subcommands.
struct ChainArgs {
  std::string config;
  int n = 0;
  std::string theta = "pi";
  double tau = 0.0;
  double j_max = 0.0;

  void add(CLI::App* app) {
    app->add_option("--config", config, "chain JSON {n_sites, theta, tau | j_max}");
    app->add_option("--n", n, "number of sites");
    app->add_option("--theta", theta, "rotation angle, e.g. 0.5pi");
    app->add_option("--tau", tau, "transfer time (s)");
    add_jmax(app, j_max);
  }

  chain::ChainSpec spec(json& echo) const {
    chain::ChainSpec s;
    if (!config.empty()) {
      s = io::chain_spec_from_json(io::read_json_file(config));
    } else {
      if (n <= 0) throw io::ConfigError("--n is required (or --config)");
      s.n_sites = n;
      s.theta = io::parse_angle(theta);
      if (tau > 0.0) s.tau = tau;
      if (j_max > 0.0) s.j_max = j_max;
      if (!s.tau && !s.j_max) s.j_max = 1.0;
    }
    s.theta = clamp_theta(s.theta);
    echo["n_sites"] = s.n_sites;
    echo["theta"] = s.theta;
    if (s.tau) echo["tau"] = *s.tau;
    if (s.j_max) echo["j_max"] = *s.j_max;
    return s;
  }
};

fermion::StateVector load_state(const std::string& path, const std::string& excite, int n_sites) {
  if (!path.empty()) return io::state_from_json(io::read_json_file(path));
  std::vector<int> sites;
  if (!excite.empty()) sites = parse_int_range(excite);
  return fermion::StateVector::basis(n_sites, fermion::OccupationSubset(sites));
}

json spectrum_json(const chain::SpectrumReport& r) {
  return {{"eigenvalues", std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size())},
          {"mirror_parity", r.mirror_parity},
          {"min_gap", r.min_gap},
          {"max_gap_pattern_error", r.max_gap_pattern_error},
          {"phase", r.phase},
          {"ok", r.ok()},
          {"failure", r.failure}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional state transfer toolkit"};
  app.require_subcommand(1);
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::vector<std::string> tol_overrides;
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for sampling modes");
  app.add_option("--tol", tol_overrides, "tolerance override name=value (repeatable)");
  app.set_version_flag("--version", kVersion);

  Artifacts art;
  std::function<void()> run;

  // synthesize
  ChainArgs syn_args;
  auto* syn = app.add_subcommand("synthesize", "couplings and detunings for an FST chain");
  syn_args.add(syn);
  syn->callback([&] {
    run = [&] {
      const auto spec = syn_args.spec(art.input);
      const auto p = chain::synthesize(spec);
      const auto range = chain::detuning_range(p);
      art.result = {{"params", io::to_json(p)},
                    {"max_coupling", p.max_coupling()},
                    {"detuning_range", {{"direct", range.direct}, {"formula", range.formula}, {"agrees", range.agrees}}}};
      art.files["chain.json"] = io::to_json(p).dump(2) + "\n";
    };
  });

  // spectrum
  ChainArgs spec_args;
  auto* spc = app.add_subcommand("spectrum", "check the single-excitation spectrum conditions");
  spec_args.add(spc);
  spc->callback([&] {
    run = [&] {
      const auto p = chain::synthesize(spec_args.spec(art.input));
      const auto r = chain::spectrum_check(p);
      art.result = spectrum_json(r);
      if (!r.ok()) {
        art.tolerance_failed = true;
        art.tolerance_message = r.failure;
      }
    };
  });

  // evolve
  ChainArgs ev_args;
  std::string ev_state, ev_excite, ev_method = "lift";
  double ev_time = 1.0;
  auto* ev = app.add_subcommand("evolve", "evolve a chain state");
  ev_args.add(ev);
  ev->add_option("--state", ev_state, "state JSON ([re, im] pairs)");
  ev->add_option("--excite", ev_excite, "excited sites, e.g. 1 or 1,3");
  ev->add_option("--time", ev_time, "evolution time in units of tau");
  ev->add_option("--method", ev_method, "lift or dense")->check(CLI::IsMember({"lift", "dense"}));
  ev->callback([&] {
    run = [&] {
      const auto p = chain::synthesize(ev_args.spec(art.input));
      const auto psi = load_state(ev_state, ev_excite, p.n_sites);
      art.input["time_over_tau"] = ev_time;
      art.input["method"] = ev_method;
      const auto out = fermion::evolve_state(psi, p, ev_time * p.tau, ev_method == "lift"
                                                                          ? fermion::EvolveMethod::Lift
                                                                          : fermion::EvolveMethod::Dense);
      art.result = {{"t", ev_time * p.tau}, {"populations", out.populations()}, {"norm", out.norm()}};
      art.files["state.json"] = io::state_to_json(out).dump() + "\n";
    };
  });

  // verify-mapping
  ChainArgs vm_args;
  auto* vm = app.add_subcommand("verify-mapping", "compare the chain evolution with K_N");
  vm_args.add(vm);
  vm->callback([&] {
    run = [&] {
      const auto r = gates::verify_mapping(chain::synthesize(vm_args.spec(art.input)));
      art.result = {{"phi", r.phi}, {"distance", r.distance}, {"worst_row", r.worst_row},
                    {"worst_col", r.worst_col}, {"ok", r.ok}};
      if (!r.ok) {
        art.tolerance_failed = true;
        art.tolerance_message = "mapping distance " + io::format_double(r.distance);
      }
    };
  });

  // decompose
  int dc_n = 0;
  std::string dc_theta = "pi", dc_conv = "half";
  double dc_jmax = 1.0;
  auto* dc = app.add_subcommand("decompose", "compile K_N into iSWAP/FSWAP layers");
  dc->add_option("--n", dc_n, "number of sites")->required();
  dc->add_option("--theta", dc_theta, "rotation angle");
  add_jmax(dc, dc_jmax);
  dc->add_option("--convention", dc_conv, "half or full")->check(CLI::IsMember({"half", "full"}));
  dc->callback([&] {
    run = [&] {
      const double theta = clamp_theta(io::parse_angle(dc_theta));
      art.input = {{"n_sites", dc_n}, {"theta", theta}, {"j_max", dc_jmax}, {"convention", dc_conv}};
      gates::DecompositionOptions o;
      o.convention = dc_conv == "half" ? gates::AngleConvention::HalfAngle : gates::AngleConvention::FullAngle;
      const auto c = gates::compile_decomposition(dc_n, theta, dc_jmax, o);
      art.result = {{"gate_count", c.gate_count()},
                    {"iswap_count", c.count(gates::GateKind::ISwapTheta)},
                    {"fswap_count", c.count(gates::GateKind::FSwap)},
                    {"depth", c.layers.size()},
                    {"duration", c.total_duration()},
                    {"verified", dc_n <= o.verify_max_sites}};
      art.files["circuit.json"] = io::to_json(c).dump(2) + "\n";
    };
  });

  // speed-sweep
  std::string sw_n = "5..40", sw_theta = "0.05pi..pi";
  int sw_points = 20;
  double sw_jmax = 1.0;
  auto* sw = app.add_subcommand("speed-sweep", "FST time versus decomposed circuit time");
  sw->add_option("--n", sw_n, "site range, e.g. 3..40");
  sw->add_option("--theta", sw_theta, "angle range, e.g. 0.05pi..pi, or a list");
  sw->add_option("--theta-points", sw_points, "samples for an angle range");
  add_jmax(sw, sw_jmax);
  sw->callback([&] {
    run = [&] {
      const auto ns = parse_int_range(sw_n);
      auto thetas = parse_angle_range(sw_theta, sw_points);
      for (double& t : thetas) t = clamp_theta(t);
      art.input = {{"n", ns}, {"theta", thetas}, {"j_max", sw_jmax}};
      std::vector<io::SpeedRow> rows(ns.size() * thetas.size());
      parallel_for(rows.size(), [&](std::size_t i) {
        const int n = ns[i / thetas.size()];
        const double th = thetas[i % thetas.size()];
        rows[i] = {n, th, gates::speed_gain(n, th, sw_jmax)};
      });
      double min_ratio = std::numeric_limits<double>::infinity();
      for (const auto& r : rows) min_ratio = std::min(min_ratio, r.gain.ratio);
      art.result = {{"rows", rows.size()}, {"min_ratio", min_ratio}};
      art.files["speed.csv"] = io::speed_csv(rows);
    };
  });

  // parity
  int pa_n = 0;
  std::string pa_state, pa_excite, pa_paulis;
  std::uint64_t pa_shots = 0;
  double pa_jmax = 1.0;
  auto* pa = app.add_subcommand("parity", "ancilla parity or correlator measurement");
  pa->add_option("--n", pa_n, "register size (with --excite)");
  pa->add_option("--state", pa_state, "register state JSON");
  pa->add_option("--excite", pa_excite, "excited register sites");
  pa->add_option("--paulis", pa_paulis, "measure a Pauli string such as XZY instead of Z parity");
  pa->add_option("--shots", pa_shots, "sample the left ancilla this many times");
  add_jmax(pa, pa_jmax);
  pa->callback([&] {
    run = [&] {
      if (pa_state.empty() && pa_n <= 0) throw io::ConfigError("--n or --state is required");
      const auto psi = load_state(pa_state, pa_excite, pa_n);
      art.input = {{"n_sites", psi.n_sites}, {"state", io::state_to_json(psi)}, {"j_max", pa_jmax},
                   {"shots", pa_shots}, {"seed", seed}};
      protocols::ParityOptions o;
      o.j_max = pa_jmax;
      if (!pa_paulis.empty()) {
        const auto ps = protocols::parse_paulis(pa_paulis);
        art.input["paulis"] = pa_paulis;
        const double c = protocols::correlator_measure(psi, ps, o);
        art.result = {{"correlator", c}, {"direct", protocols::pauli_expectation(psi, ps)}};
        if (pa_shots > 0) {
          // The left ancilla reads 1 with probability (1 + c)/2.
          const auto ones = protocols::sample_shots(std::clamp(0.5 * (1.0 + c), 0.0, 1.0), pa_shots, seed);
          art.result["shots_one"] = ones;
          art.result["estimate"] = 2.0 * double(ones) / double(pa_shots) - 1.0;
        }
        return;
      }
      const auto r = protocols::parity_measure(psi, o);
      art.result = {{"p_left_one", r.left_ancilla_one_probability},
                    {"parity", protocols::to_string(r.inferred_parity)},
                    {"definite", r.definite},
                    {"transfer_phase", r.transfer_phase},
                    {"nominal_duration", r.nominal_duration},
                    {"fst_duration", r.fst_duration}};
      if (pa_shots > 0) {
        const auto ones = protocols::sample_shots(r.left_ancilla_one_probability, pa_shots, seed);
        art.result["shots_one"] = ones;
        art.result["shots_zero"] = pa_shots - ones;
      }
    };
  });

  // scenario
  std::string sc_file;
  auto* sc = app.add_subcommand("scenario", "timed chain dynamics with flips and readouts");
  sc->add_option("file", sc_file, "scenario JSON")->required();
  sc->callback([&] {
    run = [&] {
      auto s = io::scenario_from_json(io::read_json_file(sc_file));
      s.theta = clamp_theta(s.theta);
      art.input = io::to_json(s);
      const auto r = protocols::run_scenario(s);
      art.result = {{"transfer_phase", r.transfer_phase},
                    {"rows", r.series.size()},
                    {"final_populations", r.final_state.populations()}};
      json meas = json::array();
      for (const auto& m : r.measurements) meas.push_back({{"t", m.t}, {"populations", m.populations}});
      art.result["measurements"] = meas;
      art.files["populations.csv"] = io::populations_csv(r.series, s.n_sites);
    };
  });

  // device-optimize
  std::string do_device, do_pulse, do_method = "bfgs", do_theta = "pi";
  int do_budget = 200, do_sub = 1, do_check_sub = 64;
  bool do_skip_check = false;
  auto* dop = app.add_subcommand("device-optimize", "optimize the flux pulse for K_3(theta)");
  dop->add_option("--device", do_device, "device JSON (GHz); defaults to the reference set");
  dop->add_option("--pulse", do_pulse, "initial pulse JSON; defaults to the theory seed");
  dop->add_option("--theta", do_theta, "target angle");
  dop->add_option("--method", do_method, "bfgs or nelder-mead")->check(CLI::IsMember({"bfgs", "nelder-mead"}));
  dop->add_option("--budget", do_budget, "objective evaluations");
  dop->add_option("--substeps", do_sub, "substeps per envelope sample while optimizing");
  dop->add_option("--check-substeps", do_check_sub, "substeps for the reported result (halving check)");
  dop->add_flag("--skip-check", do_skip_check, "skip the fine-step convergence check");
  dop->callback([&] {
    run = [&] {
      const auto spec = do_device.empty() ? device::DeviceSpec::reference()
                                          : io::device_spec_from_json(io::read_json_file(do_device));
      spec.validate();
      for (const auto& w : spec.warnings()) std::cerr << "warning: " << w << "\n";
      const double theta = clamp_theta(io::parse_angle(do_theta));
      const auto seed_pulse = device::theory_seed(spec, theta);
      const auto initial =
          do_pulse.empty() ? seed_pulse.pulse : io::pulse_from_json(io::read_json_file(do_pulse), seed_pulse.pulse);
      art.input = {{"device", io::to_json(spec)}, {"theta", theta}, {"initial", io::to_json(initial)},
                   {"method", do_method}, {"budget", do_budget}, {"substeps", do_sub},
                   {"check_substeps", do_check_sub}};
      device::OptimizeOptions o;
      o.method = do_method == "bfgs" ? device::OptimizerKind::QuasiNewton : device::OptimizerKind::NelderMead;
      o.max_evaluations = do_budget;
      o.propagation.substeps_per_sample = do_sub;
      const device::DeviceModel model(spec);
      const auto r = device::optimize_pulse(model, theta, initial, o);
      const auto track = device::detuning_tracking(spec, r.best, seed_pulse);
      art.result = {{"theory", {{"j", seed_pulse.j}, {"delta", seed_pulse.theory.delta},
                                {"tau", seed_pulse.theory.tau}}},
                    {"initial_metrics", io::to_json(r.initial_metrics)},
                    {"coarse_metrics", io::to_json(r.metrics)},
                    {"pulse", io::to_json(r.best)},
                    {"evaluations", r.evaluations},
                    {"budget_exhausted", r.budget_exhausted},
                    {"drive_detuning", {{"delta1", track.delta[0]},
                                        {"delta2", track.delta[1]},
                                        {"theory", track.theory},
                                        {"relative_error", track.error}}}};
      if (!do_skip_check) {
        const auto basis = dressed_basis(model, spec.phi_dc1, spec.phi_dc2);
        const auto e = device::evaluate_pulse(model, basis, r.best, theta,
                                              {do_check_sub, device::SplitScheme::Fourth}, true);
        art.result["metrics"] = io::to_json(e.metrics);
        art.result["halving_difference"] = e.halving_difference;
        art.result["unitarity_error"] = e.unitarity_error;
        art.result["converged"] = e.converged;
        if (!e.converged) {
          art.tolerance_failed = true;
          art.tolerance_message = "propagator halving difference " + io::format_double(e.halving_difference);
        }
      }
      art.files["trace.csv"] = io::trace_csv(r.trace);
      art.files["pulse.json"] = io::to_json(r.best).dump(2) + "\n";
    };
  });

  // device-zz-scan
  std::string zz_device;
  double zz_lo = 0.0, zz_hi = 0.45;
  int zz_points = 46;
  auto* zz = app.add_subcommand("device-zz-scan", "ZZ coupling versus coupler bias");
  zz->add_option("--device", zz_device, "device JSON (GHz)");
  zz->add_option("--lo", zz_lo, "lowest bias (flux quanta)");
  zz->add_option("--hi", zz_hi, "highest bias (flux quanta)");
  zz->add_option("--points", zz_points, "grid points");
  zz->callback([&] {
    run = [&] {
      const auto spec = zz_device.empty() ? device::DeviceSpec::reference()
                                          : io::device_spec_from_json(io::read_json_file(zz_device));
      spec.validate();
      art.input = {{"device", io::to_json(spec)}, {"lo", zz_lo}, {"hi", zz_hi}, {"points", zz_points}};
      const auto s = device::zz_scan(spec, zz_lo, zz_hi, zz_points);
      art.result = {{"zeros12", s.zeros12}, {"zeros23", s.zeros23}};
      art.files["zz.csv"] = io::zz_csv(s);
    };
  });

  const auto t0 = std::chrono::steady_clock::now();
  try {
    app.parse(argc, argv);
    for (const auto& kv : tol_overrides) apply_tolerance_override(kv);
    run();
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const io::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ToleranceError& e) {
    std::cerr << "tolerance error: " << e.what() << "\n";
    return 3;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json res = {{"command", app.get_subcommands().front()->get_name()},
              {"version", kVersion},
              {"input", art.input},
              {"result", art.result},
              {"status", art.tolerance_failed ? "tolerance_failure" : "ok"},
              {"wall_time_s", wall}};
  art.files["result.json"] = res.dump(2) + "\n";
  try {
    commit_outputs(out_dir, art);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 1;
  }
  if (art.tolerance_failed) {
    std::cerr << "tolerance error: " << art.tolerance_message << "\n";
    return 3;
  }
  return 0;
}
