#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpg/conversion.hpp"
#include "qpg/dispersion.hpp"
#include "qpg/errors.hpp"
#include "qpg/fit.hpp"
#include "qpg/pulse.hpp"
#include "qpg/schmidt.hpp"
#include "qpg/shaper.hpp"
#include "qpg/units.hpp"

namespace qpg {

struct ProbeConfig {
  PulseSpec pulse{1535e-9, 12e-9, 0, {}};
  double mean_photon_number = 0.15;
  double repetition_rate = 80e6;  // 1/s
  double integration_time = 0;    // s, required input for counting experiments

  void validate() const {
    pulse.validate();
    if (mean_photon_number < 0) throw std::domain_error("mean_photon_number must be >= 0");
    if (!(repetition_rate > 0)) throw std::domain_error("repetition_rate must be positive");
  }
};

struct NoiseConfig {
  // Default dark rate calibrated so the peak-conversion SNR of the efficiency
  // experiment comes out at 8.8 (0.877 x 0.15 x 80 MHz / 8.8) — an input, not a
  // prediction.
  double dark_count_rate = 1.19591e6;  // 1/s
  double spectrometer_background = 0;  // counts per spectral bin
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (dark_count_rate < 0 || spectrometer_background < 0)
      throw std::domain_error("noise rates must be non-negative");
  }
};

struct EngineSettings {
  int in_points = 512;
  int out_points = 512;
  int pump_points = 2048;
  int n_slices = 64;
  double theta_low_gain = 0.1;        // rad, coupling used for tomography scans
  // Calibrated so theta(16 pJ) = asin(sqrt(0.877)): the paper's peak conversion
  // anchors the coupling-per-energy scale; it is an input, not a prediction.
  double c_theta = 3.031158e5;  // rad per sqrt(J); 0.3031 rad/sqrt(pJ)
  double in_span_factor = 10.0;       // input grid span, x probe FWHM
  double out_span_sinc_factor = 12.0;  // output grid span, x phase-matching FWHM
  double scan_pump_duration = 150e-15;  // s, pump duration used in wavelength scans
};

// A complete experiment description: device, probe, pump operating point, shaper,
// detection noise and numerical engine settings.
struct Scenario {
  DispersionModel model = calibrate_default_model();
  ProbeConfig probe;
  PulseSpec pump_pulse{865.6e-9, 4.0e-9, 0, {}};
  ShaperSettings shaper;
  NoiseConfig noise;
  EngineSettings engine;
};

enum class Readout { modulus, modulus_squared };

struct ScanResult {
  std::vector<double> abscissa;
  std::vector<double> intensities;
  std::vector<Eigen::ArrayXd> spectra;  // |converted|^2 per scan point
  FrequencyGrid spectrum_grid;
  Readout readout = Readout::modulus_squared;
  std::string abscissa_label;
  std::string normalization;
};

namespace detail {

// FWHM of the sinc^2 phase-matching spectrum in output angular frequency.
inline double phasematching_fwhm(const DispersionModel& m) {
  const double walkoff = std::abs(m.output_band.inverse_group_velocity -
                                  m.input_band.inverse_group_velocity);
  if (!(walkoff > 0)) throw calibration_error("model has no output walk-off");
  return 4.0 * sinc_half_power_point / (m.waveguide_length * walkoff);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic per-(seed, point, stream) Poisson draw.
inline long poisson_draw(double mean, std::uint64_t seed, std::uint64_t point,
                         std::uint64_t stream) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(point ^ splitmix64(stream))));
  std::poisson_distribution<long> dist(mean);
  return mean > 0 ? dist(rng) : 0;
}

}  // namespace detail

inline FrequencyGrid make_input_grid(const Scenario& s) {
  const double w0 = s.probe.pulse.center_omega();
  return {w0, s.engine.in_span_factor * s.probe.pulse.fwhm_omega(), s.engine.in_points};
}

inline FrequencyGrid make_output_grid(const Scenario& s) {
  const double w0 = s.probe.pulse.center_omega() + s.pump_pulse.center_omega();
  const double span = s.engine.out_span_sinc_factor * detail::phasematching_fwhm(s.model);
  return {w0, span, s.engine.out_points};
}

inline FrequencyGrid make_pump_grid(const Scenario& s, const FrequencyGrid& in_grid,
                                    const FrequencyGrid& out_grid) {
  const double center = out_grid.center() - in_grid.center();
  const double detune_margin = 6e13;  // rad/s, accommodates the wavelength scan range
  const double span = in_grid.span() + out_grid.span() + detune_margin;
  return {center, span, s.engine.pump_points};
}

inline SpectralAmplitude make_probe_amplitude(const Scenario& s, const FrequencyGrid& in_grid) {
  return make_hermite_gaussian(s.probe.pulse, in_grid);
}

inline TransferConfig make_transfer_config(const Scenario& s, SpectralAmplitude pump,
                                           const FrequencyGrid& in_grid,
                                           const FrequencyGrid& out_grid, double coupling) {
  TransferConfig cfg;
  cfg.pump = std::move(pump);
  cfg.model = s.model;
  cfg.coupling = coupling;
  cfg.n_slices = s.engine.n_slices;
  cfg.in_grid = in_grid;
  cfg.out_grid = out_grid;
  return cfg;
}

// ---------------------------------------------------------------------------
// Wavelength scan (TFS-mode tomography)
// ---------------------------------------------------------------------------

inline ScanResult scan_pump_wavelength(const Scenario& s, int hg_order,
                                       Readout readout = Readout::modulus_squared,
                                       double lambda_min = 855e-9, double lambda_max = 872e-9,
                                       double step = 1e-9) {
  s.probe.validate();
  const FrequencyGrid in_grid = make_input_grid(s);
  const FrequencyGrid out_grid = make_output_grid(s);
  const FrequencyGrid pump_grid = make_pump_grid(s, in_grid, out_grid);
  const SpectralAmplitude probe = make_probe_amplitude(s, in_grid);

  // The coupling constant is fixed across the scan (constant pump pulse energy):
  // kappa is set once at the design point and reused for every shaped pump.
  const PulseSpec ref_spec{s.pump_pulse.central_wavelength,
                           duration_to_bandwidth(s.pump_pulse.central_wavelength,
                                                 s.engine.scan_pump_duration),
                           0,
                           {}};
  const ShapedPump ref_pump = shape_pump(ref_spec, s.shaper, pump_grid);
  TransferConfig ref_cfg =
      make_transfer_config(s, ref_pump.amplitude, in_grid, out_grid, s.engine.theta_low_gain);
  const double kappa = propagate(ref_cfg).kappa;

  ScanResult res;
  res.readout = readout;
  res.abscissa_label = "pump central wavelength [m]";
  res.spectrum_grid = out_grid;
  for (double lp = lambda_min; lp <= lambda_max + 0.5 * step; lp += step) {
    PulseSpec spec{lp, duration_to_bandwidth(lp, s.engine.scan_pump_duration), hg_order, {}};
    const ShapedPump pump = shape_pump(spec, s.shaper, pump_grid);
    TransferConfig cfg = make_transfer_config(s, pump.amplitude, in_grid, out_grid, 0.0);
    const Eigen::MatrixXcd kernel = detail::weighted_pump_kernel(cfg);
    const ChannelPair ch =
        apply(detail::propagate_fixed_kappa(cfg, kernel, kappa, cfg.n_slices), probe);
    const double power = ch.converted.power();
    res.abscissa.push_back(lp);
    res.intensities.push_back(readout == Readout::modulus ? std::sqrt(power) : power);
    res.spectra.push_back(ch.converted.values.array().abs2());
  }
  return res;
}

// ---------------------------------------------------------------------------
// Bandwidth scan
// ---------------------------------------------------------------------------

inline ScanResult scan_pump_bandwidth(const Scenario& s, int hg_order,
                                      const std::vector<double>& bandwidths,
                                      Readout readout = Readout::modulus_squared) {
  s.probe.validate();
  const FrequencyGrid in_grid = make_input_grid(s);
  const FrequencyGrid out_grid = make_output_grid(s);
  const FrequencyGrid pump_grid = make_pump_grid(s, in_grid, out_grid);
  const SpectralAmplitude probe = make_probe_amplitude(s, in_grid);

  ScanResult res;
  res.readout = readout;
  res.abscissa_label = "pump FWHM bandwidth [m]";
  res.normalization = "per pump pulse energy after shaping";
  res.spectrum_grid = out_grid;

  // Fixed pump energy across the scan: kappa from the nominal pump at theta_low_gain.
  const ShapedPump ref_pump = shape_pump(s.pump_pulse, s.shaper, pump_grid);
  TransferConfig ref_cfg =
      make_transfer_config(s, ref_pump.amplitude, in_grid, out_grid, s.engine.theta_low_gain);
  const double kappa = propagate(ref_cfg).kappa;

  for (double bw : bandwidths) {
    PulseSpec spec{s.pump_pulse.central_wavelength, bw, hg_order, {}};
    const ShapedPump pump = shape_pump(spec, s.shaper, pump_grid);
    TransferConfig cfg = make_transfer_config(s, pump.amplitude, in_grid, out_grid, 0.0);
    const Eigen::MatrixXcd kernel = detail::weighted_pump_kernel(cfg);
    const ChannelPair ch =
        apply(detail::propagate_fixed_kappa(cfg, kernel, kappa, cfg.n_slices), probe);
    const double power = ch.converted.power();
    res.abscissa.push_back(bw);
    res.intensities.push_back(readout == Readout::modulus ? std::sqrt(power) : power);
    res.spectra.push_back(ch.converted.values.array().abs2());
  }
  return res;
}

// ---------------------------------------------------------------------------
// Mode-selectivity benchmark (depletion measurement)
// ---------------------------------------------------------------------------

struct SelectivityBenchmark {
  SpectralAmplitude spectrum_matched;  // converted amplitude, Gaussian pump
  SpectralAmplitude spectrum_orthogonal;
  double i_matched = 0;
  double i_orthogonal = 0;
  double background = 0;
  double depletion = 0;
};

inline SelectivityBenchmark selectivity_benchmark(const Scenario& s) {
  const FrequencyGrid in_grid = make_input_grid(s);
  const FrequencyGrid out_grid = make_output_grid(s);
  const FrequencyGrid pump_grid = make_pump_grid(s, in_grid, out_grid);
  const SpectralAmplitude probe = make_probe_amplitude(s, in_grid);

  PulseSpec matched_spec = s.pump_pulse;
  matched_spec.hg_order = 0;
  PulseSpec orth_spec = s.pump_pulse;
  orth_spec.hg_order = 1;

  const ShapedPump pump0 = shape_pump(matched_spec, s.shaper, pump_grid);
  const ShapedPump pump1 = shape_pump(orth_spec, s.shaper, pump_grid);

  // Matched pump driven to full conversion; the orthogonal pump runs at the same
  // pump energy, i.e. the same coupling constant.
  TransferConfig cfg0 =
      make_transfer_config(s, pump0.amplitude, in_grid, out_grid, std::numbers::pi / 2);
  const GreenPair g0 = propagate(cfg0);
  TransferConfig cfg1 = make_transfer_config(s, pump1.amplitude, in_grid, out_grid, 0.0);
  const Eigen::MatrixXcd kernel1 = detail::weighted_pump_kernel(cfg1);
  const GreenPair g1 = detail::propagate_fixed_kappa(cfg1, kernel1, g0.kappa, cfg1.n_slices);

  SelectivityBenchmark b;
  b.spectrum_matched = apply(g0, probe).converted;
  b.spectrum_orthogonal = apply(g1, probe).converted;

  // Integration window: converted center +/- 3x the matched FWHM.
  const double f = fwhm(b.spectrum_matched).value;
  const double c = centroid(b.spectrum_matched);
  const double dw = out_grid.spacing();
  double sig0 = 0, sig1 = 0;
  long nbins = 0;
  for (int i = 0; i < out_grid.n_points(); ++i) {
    if (std::abs(out_grid[i] - c) > 3.0 * f) continue;
    sig0 += std::norm(b.spectrum_matched.values[i]) * dw;
    sig1 += std::norm(b.spectrum_orthogonal.values[i]) * dw;
    ++nbins;
  }
  b.background = s.noise.spectrometer_background * static_cast<double>(nbins);
  b.i_matched = sig0 + b.background;
  b.i_orthogonal = sig1 + b.background;
  b.depletion = depletion_selectivity(b.i_matched, b.i_orthogonal, b.background);
  return b;
}

// ---------------------------------------------------------------------------
// Efficiency experiment with photon-counting noise
// ---------------------------------------------------------------------------

struct EfficiencyExperiment {
  std::vector<double> energies;       // J
  std::vector<double> efficiencies;   // noiseless model efficiency per energy
  std::vector<long> raw_counts;
  std::vector<long> background_counts;
  std::vector<double> corrected;      // raw - background
  std::vector<double> normalized;     // corrected / (<n> rep T)
  SinSquaredFit fit;
  double snr = std::numeric_limits<double>::infinity();  // at maximum conversion
};

// Noiseless part: one propagation per energy (matched first-Schmidt-mode probe).
inline std::vector<double> efficiency_model(const Scenario& s,
                                            const std::vector<double>& energies) {
  const FrequencyGrid in_grid = make_input_grid(s);
  const FrequencyGrid out_grid = make_output_grid(s);
  const FrequencyGrid pump_grid = make_pump_grid(s, in_grid, out_grid);
  const ShapedPump pump = shape_pump(s.pump_pulse, s.shaper, pump_grid);
  const TransferConfig base = make_transfer_config(s, pump.amplitude, in_grid, out_grid, 0.0);
  std::vector<double> eff;
  for (const auto& pt : conversion_efficiency_curve(base, energies, s.engine.c_theta))
    eff.push_back(pt.efficiency);
  return eff;
}

// Counting + fit given precomputed model efficiencies (reusable across seeds).
inline EfficiencyExperiment simulate_counts(const Scenario& s,
                                            const std::vector<double>& energies,
                                            const std::vector<double>& efficiencies) {
  s.probe.validate();
  s.noise.validate();
  if (!(s.probe.integration_time > 0))
    throw config_error("efficiency experiment requires a positive integration_time");

  EfficiencyExperiment ex;
  ex.energies = energies;
  ex.efficiencies = efficiencies;
  const double flux = s.probe.mean_photon_number * s.probe.repetition_rate;
  const double t = s.probe.integration_time;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const double signal_rate = efficiencies[i] * flux;
    const long raw =
        detail::poisson_draw((signal_rate + s.noise.dark_count_rate) * t, s.noise.rng_seed, i, 1);
    const long bg = detail::poisson_draw(s.noise.dark_count_rate * t, s.noise.rng_seed, i, 2);
    ex.raw_counts.push_back(raw);
    ex.background_counts.push_back(bg);
    ex.corrected.push_back(static_cast<double>(raw - bg));
    ex.normalized.push_back(static_cast<double>(raw - bg) / (flux * t));
  }
  ex.fit = fit_sin_squared(ex.energies, ex.normalized);

  std::size_t imax = 0;
  for (std::size_t i = 1; i < ex.corrected.size(); ++i)
    if (ex.corrected[i] > ex.corrected[imax]) imax = i;
  if (ex.background_counts[imax] > 0)
    ex.snr = ex.corrected[imax] / static_cast<double>(ex.background_counts[imax]);
  return ex;
}

inline EfficiencyExperiment efficiency_experiment(const Scenario& s,
                                                  const std::vector<double>& energies) {
  return simulate_counts(s, energies, efficiency_model(s, energies));
}

// ---------------------------------------------------------------------------
// Mode reconstruction and bandwidth compression
// ---------------------------------------------------------------------------

struct ModeReconstruction {
  std::vector<double> probe_frame_offset;  // rad/s relative to the probe center
  std::vector<double> magnitude;           // |overlap| samples
};

// Reinterprets a wavelength scan as |overlap| samples of the selected mode versus
// pump detuning mapped into the probe frame.
inline ModeReconstruction reconstruct_selected_mode(const ScanResult& scan,
                                                    const Scenario& s) {
  ModeReconstruction rec;
  const double in_center = s.probe.pulse.center_omega();
  const double out_center = in_center + s.pump_pulse.center_omega();
  for (std::size_t i = 0; i < scan.abscissa.size(); ++i) {
    const double wp = wavelength_to_angular_frequency(scan.abscissa[i]);
    rec.probe_frame_offset.push_back((out_center - wp) - in_center);
    const double v = scan.intensities[i];
    rec.magnitude.push_back(scan.readout == Readout::modulus ? v : std::sqrt(std::max(v, 0.0)));
  }
  return rec;
}

struct CompressionReport {
  double probe_fwhm_nu = 0;              // Hz
  double converted_fwhm_nu = 0;          // Hz
  double factor = 0;                     // probe / converted bandwidth
  double converted_center_wavelength = 0;  // m
  double converted_fwhm_wavelength = 0;   // m
};

inline CompressionReport bandwidth_compression_report(const Scenario& s) {
  const FrequencyGrid in_grid = make_input_grid(s);
  const FrequencyGrid out_grid = make_output_grid(s);
  const FrequencyGrid pump_grid = make_pump_grid(s, in_grid, out_grid);
  const SpectralAmplitude probe = make_probe_amplitude(s, in_grid);
  const ShapedPump pump = shape_pump(s.pump_pulse, s.shaper, pump_grid);
  TransferConfig cfg = make_transfer_config(s, pump.amplitude, in_grid, out_grid,
                                            s.engine.theta_low_gain);
  // Shape-only observables: the exact coupling magnitude is irrelevant at low gain.
  cfg.exact_theta = false;
  const ChannelPair ch = apply(propagate(cfg), probe);

  CompressionReport r;
  r.probe_fwhm_nu = fwhm(probe).value / (2.0 * std::numbers::pi);
  r.converted_fwhm_nu = fwhm(ch.converted).value / (2.0 * std::numbers::pi);
  r.factor = r.probe_fwhm_nu / r.converted_fwhm_nu;
  r.converted_center_wavelength = angular_frequency_to_wavelength(centroid(ch.converted));
  r.converted_fwhm_wavelength = fwhm_wavelength(ch.converted);
  return r;
}

}  // namespace qpg
