#pragma once

// JSON and CSV formats for configs and results.
//
// Angles may be given as numbers (radians) or strings such as "0.5pi".
// Device frequencies are stored in GHz (cycles) and converted to rad/s.

#include "fstkit/chain_synthesis.hpp"
#include "fstkit/device_optimize.hpp"
#include "fstkit/gate_algebra.hpp"
#include "fstkit/protocols.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fst::io {

using nlohmann::json;

// Malformed or incomplete config input; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double x);  // %.17g
double parse_angle(const std::string& text);
double parse_angle(const json& j, const std::string& field);

// Reads a JSON file; parse errors report line and column.
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

json to_json(const chain::ChainParams& p);
chain::ChainSpec chain_spec_from_json(const json& j);

json to_json(const gates::Circuit& c);
gates::Circuit circuit_from_json(const json& j);

json state_to_json(const fermion::StateVector& s);
fermion::StateVector state_from_json(const json& j);

json to_json(const protocols::Scenario& s);
protocols::Scenario scenario_from_json(const json& j);

json to_json(const device::DeviceSpec& s);
// Missing fields keep the reference values.
device::DeviceSpec device_spec_from_json(const json& j);
json to_json(const device::PulseConfig& c);
device::PulseConfig pulse_from_json(const json& j, const device::PulseConfig& defaults = {});
json to_json(const device::GateMetrics& m);

std::string populations_csv(const std::vector<protocols::PopulationRow>& rows, int n_sites);

struct SpeedRow {
  int n_sites = 0;
  double theta = 0.0;
  gates::SpeedGain gain;
};
std::string speed_csv(const std::vector<SpeedRow>& rows);

std::string trace_csv(const std::vector<device::TraceRow>& rows);
std::string zz_csv(const device::ZZScan& scan);

}  // namespace fst::io
