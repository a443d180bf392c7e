#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "qpg/errors.hpp"
#include "qpg/units.hpp"

namespace qpg {

// Second-order Taylor model of the propagation constant of one spectral band.
struct BandDispersion {
  double reference_frequency = 0;   // rad/s
  double beta0 = 0;                 // 1/m
  double inverse_group_velocity = 0;  // s/m
  double gvd = 0;                   // s^2/m
};

inline double beta(const BandDispersion& band, double omega) {
  const double d = omega - band.reference_frequency;
  return band.beta0 + band.inverse_group_velocity * d + 0.5 * band.gvd * d * d;
}

struct DispersionModel {
  BandDispersion input_band;
  BandDispersion pump_band;
  BandDispersion output_band;
  double poling_period = 0;    // m
  double waveguide_length = 0;  // m
};

// Quasi-phase-matched momentum mismatch. Energy conservation fixes w_p = w_out - w_in.
inline double qpm_mismatch(const DispersionModel& model, double omega_in, double omega_out) {
  if (!(omega_out > omega_in))
    throw std::domain_error("qpm_mismatch: omega_out must exceed omega_in");
  return beta(model.output_band, omega_out) - beta(model.input_band, omega_in) -
         beta(model.pump_band, omega_out - omega_in) -
         2.0 * std::numbers::pi / model.poling_period;
}

namespace detail {

// sin(x)/x with a series branch near zero.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace detail

// Phase-matching amplitude of the waveguide: sinc(db L/2) exp(i db L/2).
inline std::complex<double> phasematching_amplitude(const DispersionModel& model, double omega_in,
                                                    double omega_out) {
  const double x = 0.5 * qpm_mismatch(model, omega_in, omega_out) * model.waveguide_length;
  return detail::sinc(x) * std::complex<double>(std::cos(x), std::sin(x));
}

struct WalkOffReport {
  double input_pump = 0;    // s, over the waveguide length
  double input_output = 0;  // s
  double pump_output = 0;   // s
  bool matched = false;
};

// Input/pump group-velocity matching check: walk-off below 10% of the pulse duration.
inline WalkOffReport is_gv_matched(const DispersionModel& model, double pulse_duration) {
  if (!(pulse_duration > 0)) throw std::domain_error("pulse_duration must be positive");
  const double L = model.waveguide_length;
  WalkOffReport r;
  r.input_pump = std::abs(model.input_band.inverse_group_velocity -
                          model.pump_band.inverse_group_velocity) * L;
  r.input_output = std::abs(model.input_band.inverse_group_velocity -
                            model.output_band.inverse_group_velocity) * L;
  r.pump_output = std::abs(model.pump_band.inverse_group_velocity -
                           model.output_band.inverse_group_velocity) * L;
  r.matched = r.input_pump < 0.1 * pulse_duration;
  return r;
}

struct CalibrationTargets {
  double input_wavelength = 1535e-9;       // m
  double pump_wavelength = 865.6e-9;       // m
  double output_fwhm_wavelength = 0.14e-9;  // m, FWHM of the sinc^2 output spectrum
  double poling_period = 4.4e-6;           // m
  double group_index = 2.2;                // common input/pump group index
  double output_walkoff = 0.4e-9;          // s/m, 1/v_out - 1/v_in (0.4 ps/mm)
};

// Half-power half-width of sinc^2 in its dimensionless argument.
inline constexpr double sinc_half_power_point = 1.39155737825151;

// Builds the default device model: exact input/pump group-velocity match, the design
// point phase-matched, and the waveguide length chosen so the sinc phase-matching
// spectrum has the target FWHM given the configured output walk-off.
inline DispersionModel calibrate_default_model(const CalibrationTargets& t = {}) {
  if (!(t.output_walkoff > 0))
    throw calibration_error("calibrate_default_model: output walk-off must be positive");
  if (!(t.output_fwhm_wavelength > 0))
    throw calibration_error("calibrate_default_model: target output FWHM must be positive");
  if (!(t.poling_period > 0))
    throw calibration_error("calibrate_default_model: poling period must be positive");

  const double w_in = wavelength_to_angular_frequency(t.input_wavelength);
  const double w_p = wavelength_to_angular_frequency(t.pump_wavelength);
  const double w_out = w_in + w_p;
  const double lambda_out = sum_frequency_wavelength(t.input_wavelength, t.pump_wavelength);

  // FWHM of sinc^2(D (w - w0) L / 2) is 2 * 1.3916 * 2 / (L D).
  const double target_domega =
      bandwidth_to_angular_frequency(lambda_out, t.output_fwhm_wavelength);
  const double length = 4.0 * sinc_half_power_point / (target_domega * t.output_walkoff);

  const double u = t.group_index / speed_of_light;  // common inverse group velocity
  const double grating = 2.0 * std::numbers::pi / t.poling_period;

  DispersionModel m;
  m.poling_period = t.poling_period;
  m.waveguide_length = length;
  m.input_band = {w_in, 0.0, u, 0.0};
  m.pump_band = {w_p, 0.0, u, 0.0};
  // beta0 offset chosen so the design point is exactly phase-matched.
  m.output_band = {w_out, grating, u + t.output_walkoff, 0.0};
  return m;
}

}  // namespace qpg
