#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpg/errors.hpp"
#include "qpg/lab.hpp"

namespace qpg {

// Experiment-specific sweep parameters shared by the CLI subcommands.
struct ExperimentConfig {
  int hg_order = 0;
  Readout readout = Readout::modulus_squared;
  double lambda_min = 855e-9;   // m, wavelength scan
  double lambda_max = 872e-9;   // m
  double lambda_step = 1e-9;    // m
  double bandwidth_min = 2e-9;  // m, bandwidth scan
  double bandwidth_max = 7e-9;  // m
  double bandwidth_step = 0.25e-9;
  // The sweep ends at the 16 pJ full-conversion anchor so the reported SNR refers
  // to the peak-conversion operating point.
  double energy_min = 0;        // J, efficiency sweep
  double energy_max = 16e-12;   // J
  double energy_step = 1e-12;   // J

  std::vector<double> bandwidths() const {
    std::vector<double> out;
    for (double b = bandwidth_min; b <= bandwidth_max + 0.5 * bandwidth_step; b += bandwidth_step)
      out.push_back(b);
    return out;
  }
  std::vector<double> energies() const {
    std::vector<double> out;
    for (double e = energy_min; e <= energy_max + 0.5 * energy_step; e += energy_step)
      out.push_back(e);
    return out;
  }
};

struct ScenarioConfig {
  Scenario scenario;
  ExperimentConfig experiment;
  std::uint64_t hash = 0;  // FNV-1a of the canonical serialized form

  std::string hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
  }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// A physical quantity is written as "<number> <unit>"; the unit must match the
// dimension expected by the field. Plain numbers are accepted only for
// dimensionless fields.
inline double parse_quantity(const nlohmann::json& v, const std::string& field,
                             const std::string& dimension) {
  if (v.is_number()) {
    if (dimension == "dimensionless") return v.get<double>();
    throw config_error(field + ": expected a string with an explicit unit (" + dimension + ")");
  }
  if (!v.is_string()) throw config_error(field + ": expected a quantity string");
  std::istringstream is(v.get<std::string>());
  double x = 0;
  std::string unit;
  if (!(is >> x)) throw config_error(field + ": cannot parse numeric value");
  is >> unit;

  struct Entry {
    const char* unit;
    const char* dimension;
    double scale;
  };
  static const Entry table[] = {
      {"m", "length", 1.0},        {"mm", "length", 1e-3},
      {"um", "length", 1e-6},      {"nm", "length", 1e-9},
      {"pm", "length", 1e-12},     {"s", "time", 1.0},
      {"ms", "time", 1e-3},        {"us", "time", 1e-6},
      {"ns", "time", 1e-9},        {"ps", "time", 1e-12},
      {"fs", "time", 1e-15},       {"J", "energy", 1.0},
      {"nJ", "energy", 1e-9},      {"pJ", "energy", 1e-12},
      {"fJ", "energy", 1e-15},     {"Hz", "rate", 1.0},
      {"kHz", "rate", 1e3},        {"MHz", "rate", 1e6},
      {"GHz", "rate", 1e9},        {"rad/sqrt(J)", "coupling-rate", 1.0},
      {"rad/sqrt(pJ)", "coupling-rate", 1e6},
      {"s/m", "inverse-velocity", 1.0},
      {"ps/mm", "inverse-velocity", 1e-9},
      {"fs/mm", "inverse-velocity", 1e-12},
      {"s^2/m", "gvd", 1.0},       {"fs^2/mm", "gvd", 1e-27},
      {"1/m", "inverse-length", 1.0},
      {"rad/s", "angular-frequency", 1.0},
  };
  for (const Entry& e : table)
    if (unit == e.unit) {
      if (dimension != e.dimension)
        throw config_error(field + ": unit '" + unit + "' does not measure " + dimension);
      return x * e.scale;
    }
  throw config_error(field + ": unknown unit '" + unit + "'");
}

inline void require_keys(const nlohmann::json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw config_error(where + ": unknown key '" + it.key() + "'");
  }
}

inline BandDispersion parse_band(const nlohmann::json& j, const std::string& where) {
  require_keys(j, where, {"reference_frequency", "beta0", "inverse_group_velocity", "gvd"});
  BandDispersion b;
  if (!j.contains("reference_frequency") || !j.contains("inverse_group_velocity"))
    throw config_error(where + ": reference_frequency and inverse_group_velocity are required");
  b.reference_frequency =
      parse_quantity(j.at("reference_frequency"), where + ".reference_frequency",
                     "angular-frequency");
  if (j.contains("beta0")) b.beta0 = parse_quantity(j.at("beta0"), where + ".beta0",
                                                    "inverse-length");
  b.inverse_group_velocity = parse_quantity(j.at("inverse_group_velocity"),
                                            where + ".inverse_group_velocity",
                                            "inverse-velocity");
  if (j.contains("gvd")) b.gvd = parse_quantity(j.at("gvd"), where + ".gvd", "gvd");
  return b;
}

inline DispersionModel parse_dispersion(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "default-calibrated") return calibrate_default_model();
    throw config_error("dispersion: unknown preset '" + j.get<std::string>() + "'");
  }
  require_keys(j, "dispersion",
               {"poling_period", "waveguide_length", "input_band", "output_band", "pump_band"});
  for (const char* k : {"poling_period", "waveguide_length", "input_band", "output_band",
                        "pump_band"})
    if (!j.contains(k)) throw config_error(std::string("dispersion: missing key '") + k + "'");
  DispersionModel m;
  m.poling_period = parse_quantity(j.at("poling_period"), "dispersion.poling_period", "length");
  m.waveguide_length =
      parse_quantity(j.at("waveguide_length"), "dispersion.waveguide_length", "length");
  m.input_band = parse_band(j.at("input_band"), "dispersion.input_band");
  m.output_band = parse_band(j.at("output_band"), "dispersion.output_band");
  m.pump_band = parse_band(j.at("pump_band"), "dispersion.pump_band");
  return m;
}

inline PulseSpec parse_pulse(const nlohmann::json& j, const std::string& where,
                             PulseSpec base) {
  if (j.contains("central_wavelength"))
    base.central_wavelength =
        parse_quantity(j.at("central_wavelength"), where + ".central_wavelength", "length");
  if (j.contains("fwhm_bandwidth"))
    base.fwhm_bandwidth =
        parse_quantity(j.at("fwhm_bandwidth"), where + ".fwhm_bandwidth", "length");
  if (j.contains("hg_order")) base.hg_order = j.at("hg_order").get<int>();
  return base;
}

}  // namespace detail

inline ScenarioConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: top level must be an object");
  detail::require_keys(j, "config",
                       {"dispersion", "probe", "pump", "shaper", "noise", "engine", "experiment"});

  ScenarioConfig cfg;
  cfg.hash = detail::fnv1a(j.dump());
  Scenario& s = cfg.scenario;

  if (j.contains("dispersion")) s.model = detail::parse_dispersion(j.at("dispersion"));

  if (j.contains("probe")) {
    const auto& p = j.at("probe");
    detail::require_keys(p, "probe",
                         {"central_wavelength", "fwhm_bandwidth", "hg_order",
                          "mean_photon_number", "repetition_rate", "integration_time"});
    s.probe.pulse = detail::parse_pulse(p, "probe", s.probe.pulse);
    if (p.contains("mean_photon_number"))
      s.probe.mean_photon_number =
          detail::parse_quantity(p.at("mean_photon_number"), "probe.mean_photon_number",
                                 "dimensionless");
    if (p.contains("repetition_rate"))
      s.probe.repetition_rate =
          detail::parse_quantity(p.at("repetition_rate"), "probe.repetition_rate", "rate");
    if (p.contains("integration_time"))
      s.probe.integration_time =
          detail::parse_quantity(p.at("integration_time"), "probe.integration_time", "time");
  }

  if (j.contains("pump")) {
    detail::require_keys(j.at("pump"), "pump",
                         {"central_wavelength", "fwhm_bandwidth", "hg_order"});
    s.pump_pulse = detail::parse_pulse(j.at("pump"), "pump", s.pump_pulse);
  }

  if (j.contains("shaper")) {
    const auto& h = j.at("shaper");
    detail::require_keys(h, "shaper", {"resolution_fwhm", "amplitude_floor"});
    if (h.contains("resolution_fwhm"))
      s.shaper.resolution_fwhm =
          detail::parse_quantity(h.at("resolution_fwhm"), "shaper.resolution_fwhm", "length");
    if (h.contains("amplitude_floor"))
      s.shaper.amplitude_floor =
          detail::parse_quantity(h.at("amplitude_floor"), "shaper.amplitude_floor",
                                 "dimensionless");
  }

  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    detail::require_keys(n, "noise",
                         {"dark_count_rate", "spectrometer_background", "rng_seed"});
    if (n.contains("dark_count_rate"))
      s.noise.dark_count_rate =
          detail::parse_quantity(n.at("dark_count_rate"), "noise.dark_count_rate", "rate");
    if (n.contains("spectrometer_background"))
      s.noise.spectrometer_background =
          detail::parse_quantity(n.at("spectrometer_background"),
                                 "noise.spectrometer_background", "dimensionless");
    if (n.contains("rng_seed")) s.noise.rng_seed = n.at("rng_seed").get<std::uint64_t>();
  }

  if (j.contains("engine")) {
    const auto& e = j.at("engine");
    detail::require_keys(e, "engine",
                         {"in_points", "out_points", "pump_points", "n_slices",
                          "theta_low_gain", "c_theta", "in_span_factor",
                          "out_span_sinc_factor", "scan_pump_duration"});
    if (e.contains("in_points")) s.engine.in_points = e.at("in_points").get<int>();
    if (e.contains("out_points")) s.engine.out_points = e.at("out_points").get<int>();
    if (e.contains("pump_points")) s.engine.pump_points = e.at("pump_points").get<int>();
    if (e.contains("n_slices")) s.engine.n_slices = e.at("n_slices").get<int>();
    if (e.contains("theta_low_gain"))
      s.engine.theta_low_gain =
          detail::parse_quantity(e.at("theta_low_gain"), "engine.theta_low_gain",
                                 "dimensionless");
    if (e.contains("c_theta"))
      s.engine.c_theta = detail::parse_quantity(e.at("c_theta"), "engine.c_theta",
                                                "coupling-rate");
    if (e.contains("in_span_factor"))
      s.engine.in_span_factor =
          detail::parse_quantity(e.at("in_span_factor"), "engine.in_span_factor",
                                 "dimensionless");
    if (e.contains("out_span_sinc_factor"))
      s.engine.out_span_sinc_factor =
          detail::parse_quantity(e.at("out_span_sinc_factor"), "engine.out_span_sinc_factor",
                                 "dimensionless");
    if (e.contains("scan_pump_duration"))
      s.engine.scan_pump_duration =
          detail::parse_quantity(e.at("scan_pump_duration"), "engine.scan_pump_duration",
                                 "time");
  }

  if (j.contains("experiment")) {
    const auto& x = j.at("experiment");
    detail::require_keys(x, "experiment",
                         {"hg_order", "readout", "lambda_min", "lambda_max", "lambda_step",
                          "bandwidth_min", "bandwidth_max", "bandwidth_step", "energy_min",
                          "energy_max", "energy_step"});
    ExperimentConfig& ex = cfg.experiment;
    if (x.contains("hg_order")) ex.hg_order = x.at("hg_order").get<int>();
    if (x.contains("readout")) {
      const std::string r = x.at("readout").get<std::string>();
      if (r == "modulus")
        ex.readout = Readout::modulus;
      else if (r == "modulus_squared")
        ex.readout = Readout::modulus_squared;
      else
        throw config_error("experiment.readout: expected 'modulus' or 'modulus_squared'");
    }
    auto len = [&](const char* k, double& dst) {
      if (x.contains(k))
        dst = detail::parse_quantity(x.at(k), std::string("experiment.") + k, "length");
    };
    len("lambda_min", ex.lambda_min);
    len("lambda_max", ex.lambda_max);
    len("lambda_step", ex.lambda_step);
    len("bandwidth_min", ex.bandwidth_min);
    len("bandwidth_max", ex.bandwidth_max);
    len("bandwidth_step", ex.bandwidth_step);
    auto en = [&](const char* k, double& dst) {
      if (x.contains(k))
        dst = detail::parse_quantity(x.at(k), std::string("experiment.") + k, "energy");
    };
    en("energy_min", ex.energy_min);
    en("energy_max", ex.energy_max);
    en("energy_step", ex.energy_step);
  }

  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

// Structural sanity checks beyond parse-time unit validation; throws config_error
// naming the offending field.
inline void validate_config(const ScenarioConfig& cfg) {
  const Scenario& s = cfg.scenario;
  if (!(s.model.poling_period > 0)) throw config_error("dispersion.poling_period must be positive");
  if (!(s.model.waveguide_length > 0))
    throw config_error("dispersion.waveguide_length must be positive");
  try {
    s.probe.validate();
    s.probe.pulse.validate();
    s.pump_pulse.validate();
    s.shaper.validate();
    s.noise.validate();
  } catch (const std::exception& e) {
    throw config_error(e.what());
  }
  if (s.engine.in_points < 32 || s.engine.out_points < 32 || s.engine.pump_points < 32)
    throw config_error("engine grid sizes must be at least 32 points");
  if (s.engine.n_slices < 32) throw config_error("engine.n_slices must be at least 32");
  if (!(s.engine.c_theta > 0)) throw config_error("engine.c_theta must be positive");
  const ExperimentConfig& x = cfg.experiment;
  if (x.hg_order < 0 || x.hg_order > 10)
    throw config_error("experiment.hg_order must lie in [0, 10]");
  if (!(x.lambda_step > 0) || !(x.bandwidth_step > 0) || !(x.energy_step > 0))
    throw config_error("experiment step sizes must be positive");
  if (x.lambda_max < x.lambda_min) throw config_error("experiment.lambda_max < lambda_min");
  if (x.bandwidth_max < x.bandwidth_min)
    throw config_error("experiment.bandwidth_max < bandwidth_min");
  if (x.energy_max < x.energy_min) throw config_error("experiment.energy_max < energy_min");
}

}  // namespace qpg
