#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpg {

inline constexpr double speed_of_light = 299'792'458.0;  // m/s

// Time-bandwidth product of a transform-limited Gaussian pulse (FWHM * FWHM).
inline constexpr double gaussian_tbp = 0.441;

// 2*sqrt(ln 2): converts a Gaussian 1/e amplitude width sigma (of exp(-x^2/2s^2))
// to the FWHM of the squared modulus.
inline const double fwhm_per_sigma = 2.0 * std::sqrt(std::numbers::ln2);

inline double wavelength_to_angular_frequency(double lambda) {
  if (!(lambda > 0)) throw std::domain_error("wavelength must be positive");
  return 2.0 * std::numbers::pi * speed_of_light / lambda;
}

inline double angular_frequency_to_wavelength(double omega) {
  if (!(omega > 0)) throw std::domain_error("angular frequency must be positive");
  return 2.0 * std::numbers::pi * speed_of_light / omega;
}

// Wavelength of the sum-frequency field: 1/lambda_out = 1/lambda_in + 1/lambda_p.
inline double sum_frequency_wavelength(double lambda_in, double lambda_p) {
  if (!(lambda_in > 0) || !(lambda_p > 0)) throw std::domain_error("wavelengths must be positive");
  return 1.0 / (1.0 / lambda_in + 1.0 / lambda_p);
}

// FWHM bandwidth in wavelength units -> FWHM in angular frequency at the same center.
inline double bandwidth_to_angular_frequency(double central_wavelength, double fwhm_bandwidth) {
  if (!(central_wavelength > 0) || !(fwhm_bandwidth > 0))
    throw std::domain_error("wavelength quantities must be positive");
  return 2.0 * std::numbers::pi * speed_of_light * fwhm_bandwidth /
         (central_wavelength * central_wavelength);
}

inline double angular_frequency_to_bandwidth(double central_wavelength, double fwhm_omega) {
  if (!(central_wavelength > 0) || !(fwhm_omega > 0))
    throw std::domain_error("inputs must be positive");
  return fwhm_omega * central_wavelength * central_wavelength /
         (2.0 * std::numbers::pi * speed_of_light);
}

// Transform-limited Gaussian duration (FWHM) for a given spectral FWHM in wavelength units.
inline double bandwidth_to_duration(double central_wavelength, double fwhm_bandwidth) {
  if (!(central_wavelength > 0) || !(fwhm_bandwidth > 0))
    throw std::domain_error("inputs must be positive");
  double dnu = speed_of_light * fwhm_bandwidth / (central_wavelength * central_wavelength);
  return gaussian_tbp / dnu;
}

// Inverse of bandwidth_to_duration.
inline double duration_to_bandwidth(double central_wavelength, double fwhm_duration) {
  if (!(central_wavelength > 0) || !(fwhm_duration > 0))
    throw std::domain_error("inputs must be positive");
  double dnu = gaussian_tbp / fwhm_duration;
  return dnu * central_wavelength * central_wavelength / speed_of_light;
}

}  // namespace qpg
