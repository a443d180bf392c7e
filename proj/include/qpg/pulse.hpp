#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qpg/errors.hpp"
#include "qpg/grid.hpp"
#include "qpg/units.hpp"

namespace qpg {

// Pulse description in laboratory units: center and FWHM bandwidth in wavelength,
// Hermite-Gaussian order, and an optional polynomial spectral phase about the center
// (coefficients in rad, rad*s, rad*s^2, ...).
struct PulseSpec {
  double central_wavelength = 0;  // m
  double fwhm_bandwidth = 0;      // m (wavelength units)
  int hg_order = 0;
  std::vector<double> spectral_phase;

  static constexpr int max_hg_order = 10;

  double center_omega() const { return wavelength_to_angular_frequency(central_wavelength); }
  double fwhm_omega() const {
    return bandwidth_to_angular_frequency(central_wavelength, fwhm_bandwidth);
  }
  // 1/e amplitude width of the order-0 envelope exp(-x^2 / 2 sigma^2).
  double sigma_omega() const { return fwhm_omega() / fwhm_per_sigma; }
  double duration() const { return bandwidth_to_duration(central_wavelength, fwhm_bandwidth); }

  void validate() const {
    if (!(central_wavelength > 0)) throw std::domain_error("central_wavelength must be positive");
    if (!(fwhm_bandwidth > 0)) throw std::domain_error("fwhm_bandwidth must be positive");
    if (hg_order < 0 || hg_order > max_hg_order)
      throw std::domain_error("hg_order outside supported range [0, 10]");
  }
};

// Complex spectral amplitude on a frequency grid. Factory-constructed amplitudes are
// L2-normalized in angular frequency: sum |v|^2 * dw = 1. Channel outputs of the
// conversion engine reuse the type unnormalized; power() gives their squared norm.
struct SpectralAmplitude {
  FrequencyGrid grid;
  Eigen::VectorXcd values;

  double power() const { return values.squaredNorm() * grid.spacing(); }

  SpectralAmplitude& normalize() {
    double p = power();
    if (p > 0) values /= std::sqrt(p);
    return *this;
  }
};

namespace detail {

// Physicists' Hermite polynomial by recurrence (std::hermite is avoided inside
// vectorized loops only for the complex phase path; values here are real).
inline double hermite(int n, double x) { return std::hermite(static_cast<unsigned>(n), x); }

inline double polynomial_phase(const std::vector<double>& coeffs, double x) {
  double acc = 0, p = 1;
  for (double c : coeffs) {
    acc += c * p;
    p *= x;
  }
  return acc;
}

// Analytic L2 norm^2 of H_n(x) exp(-x^2/2): integral H_n^2 e^{-x^2} = 2^n n! sqrt(pi).
inline double hg_norm_squared(int n) {
  double v = std::sqrt(std::numbers::pi);
  for (int k = 1; k <= n; ++k) v *= 2.0 * k;
  return v;
}

}  // namespace detail

// Hermite-Gaussian spectral amplitude HG_n((w - w0)/sigma) with the requested
// polynomial spectral phase, L2-normalized on the grid. sigma is chosen so that the
// order-0 intensity profile has the requested FWHM.
inline SpectralAmplitude make_hermite_gaussian(const PulseSpec& spec, const FrequencyGrid& grid) {
  spec.validate();
  const double w0 = spec.center_omega();
  const double sigma = spec.sigma_omega();
  const int n = spec.hg_order;

  SpectralAmplitude out{grid, Eigen::VectorXcd(grid.n_points())};
  double grid_norm2 = 0;
  for (int i = 0; i < grid.n_points(); ++i) {
    const double d = grid[i] - w0;
    const double x = d / sigma;
    const double env = detail::hermite(n, x) * std::exp(-0.5 * x * x);
    const double phi = detail::polynomial_phase(spec.spectral_phase, d);
    out.values[i] = env * std::complex<double>(std::cos(phi), std::sin(phi));
    grid_norm2 += env * env;
  }
  grid_norm2 *= grid.spacing();

  // Truncation check against the analytic envelope norm.
  const double exact = sigma * detail::hg_norm_squared(n);
  if (std::abs(1.0 - grid_norm2 / exact) > 1e-6)
    throw coverage_error("grid too narrow for requested Hermite-Gaussian (truncated norm)");

  out.values /= std::sqrt(grid_norm2);
  return out;
}

// Discrete overlap integral sum a * conj(b) * dw.
inline std::complex<double> overlap(const SpectralAmplitude& a, const SpectralAmplitude& b) {
  if (!(a.grid == b.grid)) throw grid_mismatch_error("overlap: amplitudes on different grids");
  return (b.values.adjoint() * a.values)(0) * a.grid.spacing();
}

struct FwhmResult {
  double value = 0;     // rad/s
  bool ambiguous = false;  // more than two half-maximum crossings; outermost used
};

// FWHM of |a|^2 with linear interpolation between bracketing samples.
inline FwhmResult fwhm(const SpectralAmplitude& a) {
  const Eigen::ArrayXd p = a.values.array().abs2();
  int imax = 0;
  const double pmax = p.maxCoeff(&imax);
  if (!(pmax > 0)) throw std::domain_error("fwhm: amplitude is identically zero");
  const double half = pmax / 2.0;

  int crossings = 0;
  double left = 0, right = 0;
  bool have_left = false, have_right = false;
  for (int i = 0; i + 1 < p.size(); ++i) {
    const double d0 = p[i] - half, d1 = p[i + 1] - half;
    if (d0 == 0 && d1 == 0) continue;
    if ((d0 < 0) == (d1 < 0)) continue;  // no sign change in this cell
    const double t = d0 / (d0 - d1);
    const double w = a.grid[i] + t * a.grid.spacing();
    ++crossings;
    if (!have_left) {
      left = w;  // first crossing = outermost left
      have_left = true;
    }
    right = w;  // last crossing = outermost right
    have_right = true;
  }
  if (!have_left || !have_right || right <= left)
    throw std::domain_error("fwhm: half-maximum level not bracketed by the grid");
  return FwhmResult{right - left, crossings > 2};
}

// FWHM of |a|^2 expressed in wavelength units at the spectrum's peak.
inline double fwhm_wavelength(const SpectralAmplitude& a) {
  int imax = 0;
  a.values.array().abs2().maxCoeff(&imax);
  const double lambda_c = angular_frequency_to_wavelength(a.grid[imax]);
  return angular_frequency_to_bandwidth(lambda_c, fwhm(a).value);
}

// Intensity-weighted spectral centroid.
inline double centroid(const SpectralAmplitude& a) {
  const Eigen::ArrayXd p = a.values.array().abs2();
  const double tot = p.sum();
  if (!(tot > 0)) throw std::domain_error("centroid: amplitude is identically zero");
  return (p * a.grid.samples()).sum() / tot;
}

}  // namespace qpg
