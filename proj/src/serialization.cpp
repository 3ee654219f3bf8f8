#include "fstkit/serialization.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace fst::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_angle(const std::string& text) {
  static const std::regex re(R"(^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(\*?\s*pi)?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re) || (!m[1].matched && !m[2].matched))
    throw ConfigError("cannot parse angle '" + text + "'");
  const double v = m[1].matched ? std::stod(m[1].str()) : 1.0;
  return m[2].matched ? v * kPi : v;
}

double parse_angle(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigError("missing field '" + field + "'");
  const json& v = j.at(field);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_angle(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError("field '" + field + "': " + e.what());
    }
  }
  throw ConfigError("field '" + field + "' must be a number or an angle string");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

namespace {

template <class T>
T field(const json& j, const std::string& name) {
  if (!j.contains(name)) throw ConfigError("missing field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + name + "' has the wrong type");
  }
}

template <class T>
T field_or(const json& j, const std::string& name, T fallback) {
  return j.contains(name) ? field<T>(j, name) : fallback;
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
}

}  // namespace

json to_json(const chain::ChainParams& p) {
  return {{"n_sites", p.n_sites}, {"theta", p.theta}, {"tau", p.tau},
          {"couplings", p.couplings}, {"detunings", p.detunings}};
}

chain::ChainSpec chain_spec_from_json(const json& j) {
  require_object(j, "chain");
  chain::ChainSpec s;
  s.n_sites = field<int>(j, "n_sites");
  s.theta = parse_angle(j, "theta");
  if (j.contains("tau")) s.tau = field<double>(j, "tau");
  if (j.contains("j_max")) s.j_max = field<double>(j, "j_max");
  return s;
}

json to_json(const gates::Circuit& c) {
  json layers = json::array();
  for (const auto& layer : c.layers) {
    json l = json::array();
    for (const auto& op : layer) {
      json targets = op.arity() == 2 ? json{op.targets[0], op.targets[1]} : json{op.targets[0]};
      l.push_back({{"kind", gates::to_string(op.kind)}, {"targets", targets}, {"angle", op.angle},
                   {"duration", op.duration}});
    }
    layers.push_back(l);
  }
  return {{"n_sites", c.n_sites},
          {"convention", c.convention == gates::AngleConvention::HalfAngle ? "half" : "full"},
          {"duration", c.total_duration()},
          {"gate_count", c.gate_count()},
          {"layers", layers}};
}

gates::Circuit circuit_from_json(const json& j) {
  require_object(j, "circuit");
  gates::Circuit c;
  c.n_sites = field<int>(j, "n_sites");
  const std::string conv = field_or<std::string>(j, "convention", "half");
  if (conv != "half" && conv != "full") throw ConfigError("field 'convention' must be 'half' or 'full'");
  c.convention = conv == "half" ? gates::AngleConvention::HalfAngle : gates::AngleConvention::FullAngle;
  const json& layers = j.contains("layers") ? j.at("layers") : json::array();
  if (!layers.is_array()) throw ConfigError("field 'layers' must be an array");
  for (const auto& l : layers) {
    if (!l.is_array()) throw ConfigError("each layer must be an array");
    std::vector<gates::GateOp> ops;
    for (const auto& g : l) {
      gates::GateOp op;
      try {
        op.kind = gates::gate_kind_from_string(field<std::string>(g, "kind"));
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("field 'kind': ") + e.what());
      }
      const auto t = field<std::vector<int>>(g, "targets");
      if (static_cast<int>(t.size()) != op.arity()) throw ConfigError("field 'targets' has the wrong length");
      op.targets = {t[0], t.size() > 1 ? t[1] : 0};
      op.angle = g.contains("angle") ? parse_angle(g, "angle") : 0.0;
      op.duration = field_or<double>(g, "duration", 0.0);
      ops.push_back(op);
    }
    c.layers.push_back(std::move(ops));
  }
  return c;
}

json state_to_json(const fermion::StateVector& s) {
  json a = json::array();
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i)
    a.push_back({s.amplitudes(i).real(), s.amplitudes(i).imag()});
  return a;
}

fermion::StateVector state_from_json(const json& j) {
  const json& a = j.is_object() ? j.at("amplitudes") : j;
  if (!a.is_array() || a.empty()) throw ConfigError("state: expected a non-empty array of [re, im] pairs");
  const std::size_t dim = a.size();
  if ((dim & (dim - 1)) != 0) throw ConfigError("state: length must be a power of two");
  fermion::StateVector s;
  s.n_sites = std::countr_zero(dim);
  s.amplitudes.resize(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const json& p = a[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ConfigError("state: entry " + std::to_string(i) + " is not an [re, im] pair");
    s.amplitudes(static_cast<Eigen::Index>(i)) = {p[0].get<double>(), p[1].get<double>()};
  }
  return s;
}

json to_json(const protocols::Scenario& s) {
  json events = json::array();
  for (const auto& e : s.events) {
    json ev{{"t", e.t}, {"kind", protocols::to_string(e.kind)}};
    if (e.kind == protocols::EventKind::XFlip) ev["site"] = e.site;
    if (e.kind == protocols::EventKind::Continue) ev["duration"] = e.duration;
    events.push_back(ev);
  }
  return {{"n_sites", s.n_sites}, {"theta", s.theta}, {"tau", s.tau},
          {"excitations", s.excitations.sites()}, {"events", events},
          {"samples_per_tau", s.samples_per_tau}};
}

protocols::Scenario scenario_from_json(const json& j) {
  require_object(j, "scenario");
  protocols::Scenario s;
  s.n_sites = field<int>(j, "n_sites");
  s.theta = parse_angle(j, "theta");
  s.tau = field_or<double>(j, "tau", 1.0);
  s.samples_per_tau = field_or<int>(j, "samples_per_tau", 100);
  try {
    s.excitations = fermion::OccupationSubset(field<std::vector<int>>(j, "excitations"));
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("field 'excitations': ") + e.what());
  }
  if (j.contains("events")) {
    if (!j.at("events").is_array()) throw ConfigError("field 'events' must be an array");
    for (const auto& ev : j.at("events")) {
      protocols::ScenarioEvent e;
      e.t = field<double>(ev, "t");
      try {
        e.kind = protocols::event_kind_from_string(field<std::string>(ev, "kind"));
      } catch (const ValidationError& err) {
        throw ConfigError(std::string("field 'kind': ") + err.what());
      }
      e.site = field_or<int>(ev, "site", 0);
      e.duration = field_or<double>(ev, "duration", 0.0);
      s.events.push_back(e);
    }
  }
  return s;
}

namespace {

struct FreqField {
  const char* name;
  double device::DeviceSpec::*member;
};

constexpr FreqField kFreqFields[] = {
    {"w1", &device::DeviceSpec::w1},     {"w2", &device::DeviceSpec::w2},     {"w3", &device::DeviceSpec::w3},
    {"wc1", &device::DeviceSpec::wc1},   {"wc2", &device::DeviceSpec::wc2},   {"a1", &device::DeviceSpec::a1},
    {"a2", &device::DeviceSpec::a2},     {"a3", &device::DeviceSpec::a3},     {"ac1", &device::DeviceSpec::ac1},
    {"ac2", &device::DeviceSpec::ac2},   {"g1c1", &device::DeviceSpec::g1c1}, {"g2c1", &device::DeviceSpec::g2c1},
    {"g2c2", &device::DeviceSpec::g2c2}, {"g3c2", &device::DeviceSpec::g3c2}, {"g12", &device::DeviceSpec::g12},
    {"g23", &device::DeviceSpec::g23}};

constexpr FreqField kPlainFields[] = {{"dc1", &device::DeviceSpec::dc1},
                                      {"dc2", &device::DeviceSpec::dc2},
                                      {"phi_dc1", &device::DeviceSpec::phi_dc1},
                                      {"phi_dc2", &device::DeviceSpec::phi_dc2}};

}  // namespace

namespace {

// GHz values rounded to 12 significant digits, hiding the 2π round trip.
double to_ghz(double w) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", w / device::kTwoPiGHz);
  return std::stod(buf);
}

}  // namespace

json to_json(const device::DeviceSpec& s) {
  json j;
  for (const auto& f : kFreqFields) j[f.name] = to_ghz(s.*f.member);
  for (const auto& f : kPlainFields) j[f.name] = s.*f.member;
  j["levels"] = s.levels;
  return j;
}

device::DeviceSpec device_spec_from_json(const json& j) {
  require_object(j, "device");
  device::DeviceSpec s = device::DeviceSpec::reference();
  for (const auto& f : kFreqFields)
    if (j.contains(f.name)) s.*f.member = field<double>(j, f.name) * device::kTwoPiGHz;
  for (const auto& f : kPlainFields)
    if (j.contains(f.name)) s.*f.member = field<double>(j, f.name);
  s.levels = field_or<int>(j, "levels", s.levels);
  return s;
}

json to_json(const device::PulseConfig& c) {
  return {{"amp1", c.amp1},
          {"amp2", c.amp2},
          {"wd1", to_ghz(c.wd1)},
          {"wd2", to_ghz(c.wd2)},
          {"rise_time", c.rise_time},
          {"gate_time", c.gate_time},
          {"sample_rate", c.sample_rate}};
}

device::PulseConfig pulse_from_json(const json& j, const device::PulseConfig& defaults) {
  require_object(j, "pulse");
  device::PulseConfig c = defaults;
  c.amp1 = field_or<double>(j, "amp1", c.amp1);
  c.amp2 = field_or<double>(j, "amp2", c.amp2);
  if (j.contains("wd1")) c.wd1 = field<double>(j, "wd1") * device::kTwoPiGHz;
  if (j.contains("wd2")) c.wd2 = field<double>(j, "wd2") * device::kTwoPiGHz;
  c.rise_time = field_or<double>(j, "rise_time", c.rise_time);
  c.gate_time = field_or<double>(j, "gate_time", c.gate_time);
  c.sample_rate = field_or<double>(j, "sample_rate", c.sample_rate);
  return c;
}

json to_json(const device::GateMetrics& m) {
  return {{"avg_fidelity", m.avg_fidelity},
          {"infidelity", m.infidelity()},
          {"leakage", m.leakage},
          {"z_corrections", m.z_corrections}};
}

std::string populations_csv(const std::vector<protocols::PopulationRow>& rows, int n_sites) {
  std::string out = "t";
  for (int n = 1; n <= n_sites; ++n) out += ",p_" + std::to_string(n);
  out += "\n";
  for (const auto& r : rows) {
    out += format_double(r.t);
    for (double p : r.populations) out += "," + format_double(p);
    out += "\n";
  }
  return out;
}

std::string speed_csv(const std::vector<SpeedRow>& rows) {
  std::string out = "N,parity,theta,t_fst,t_decomp,ratio,small_angle_asymptote,sqrt3_floor\n";
  for (const auto& r : rows) {
    const bool even = r.n_sites % 2 == 0;
    const double asym = even ? gates::even_small_angle_asymptote(r.n_sites) : 2.0;
    out += std::to_string(r.n_sites) + "," + (even ? "even" : "odd") + "," + format_double(r.theta) + "," +
           format_double(r.gain.t_fst) + "," + format_double(r.gain.t_decomp) + "," +
           format_double(r.gain.ratio) + "," + format_double(asym) + "," + format_double(std::sqrt(3.0)) +
           "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<device::TraceRow>& rows) {
  std::string out = "eval,infidelity,leakage,phiA1,phiA2,wd1,wd2\n";
  for (const auto& r : rows)
    out += std::to_string(r.eval) + "," + format_double(r.infidelity) + "," + format_double(r.leakage) + "," +
           format_double(r.amp1) + "," + format_double(r.amp2) + "," + format_double(r.wd1 / device::kTwoPiGHz) +
           "," + format_double(r.wd2 / device::kTwoPiGHz) + "\n";
  return out;
}

std::string zz_csv(const device::ZZScan& scan) {
  std::string out = "phi,zeta12,zeta23,ambiguous\n";
  for (const auto& p : scan.points)
    out += format_double(p.phi) + "," + format_double(p.zeta12 / device::kTwoPiGHz) + "," +
           format_double(p.zeta23 / device::kTwoPiGHz) + "," + (p.ambiguous ? "1" : "0") + "\n";
  return out;
}

}  // namespace fst::io
