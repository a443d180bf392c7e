#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qpg/errors.hpp"
#include "qpg/pulse.hpp"
#include "qpg/units.hpp"

namespace qpg {

// Programmable pump shaper with finite spectral resolution. The blur acts coherently
// on the complex amplitude, which is what degrades mode orthogonality.
struct ShaperSettings {
  double resolution_fwhm = 0;  // m, wavelength units; 0 = ideal shaper
  double amplitude_floor = 0;  // in [0, 1], clip of the dynamic range

  void validate() const {
    if (resolution_fwhm < 0) throw std::domain_error("resolution_fwhm must be non-negative");
    if (amplitude_floor < 0 || amplitude_floor > 1)
      throw std::domain_error("amplitude_floor must lie in [0, 1]");
  }
};

struct ShapedPump {
  SpectralAmplitude amplitude;
  // Fraction of the ideal pulse energy surviving shaping (before renormalization);
  // the bandwidth-scan normalization convention reports intensities per this energy.
  double energy_factor = 1;
};

inline ShapedPump shape_pump(const PulseSpec& target, const ShaperSettings& settings,
                             const FrequencyGrid& grid) {
  settings.validate();
  SpectralAmplitude ideal = make_hermite_gaussian(target, grid);
  if (settings.resolution_fwhm == 0 && settings.amplitude_floor == 0)
    return {std::move(ideal), 1.0};

  SpectralAmplitude shaped = ideal;
  if (settings.resolution_fwhm > 0) {
    const double res_omega =
        bandwidth_to_angular_frequency(target.central_wavelength, settings.resolution_fwhm);
    const double sigma_k = res_omega / fwhm_per_sigma;
    const double dw = grid.spacing();
    const int half = static_cast<int>(std::ceil(5.0 * sigma_k / dw));
    Eigen::VectorXd kernel(2 * half + 1);
    for (int j = -half; j <= half; ++j)
      kernel[j + half] = std::exp(-0.5 * (j * dw) * (j * dw) / (sigma_k * sigma_k));
    kernel /= kernel.sum();

    Eigen::VectorXcd blurred = Eigen::VectorXcd::Zero(grid.n_points());
    for (int i = 0; i < grid.n_points(); ++i) {
      std::complex<double> acc = 0;
      const int j0 = std::max(-half, -i), j1 = std::min(half, grid.n_points() - 1 - i);
      for (int j = j0; j <= j1; ++j) acc += kernel[j + half] * ideal.values[i + j];
      blurred[i] = acc;
    }
    shaped.values = blurred;
  }
  if (settings.amplitude_floor > 0) {
    const double cut = settings.amplitude_floor * shaped.values.cwiseAbs().maxCoeff();
    for (int i = 0; i < shaped.values.size(); ++i)
      if (std::abs(shaped.values[i]) < cut) shaped.values[i] = 0;
  }
  const double energy_factor = shaped.power();  // ideal was unit power
  shaped.normalize();
  return {std::move(shaped), energy_factor};
}

// Projections |<HG_k | achieved>|^2 onto the ideal Hermite-Gaussian family,
// orders 0 .. target_order + 3.
inline std::vector<double> realizable_overlap(const PulseSpec& target,
                                              const SpectralAmplitude& achieved) {
  std::vector<double> out;
  for (int k = 0; k <= target.hg_order + 3; ++k) {
    PulseSpec ref = target;
    ref.hg_order = k;
    ref.spectral_phase.clear();
    const SpectralAmplitude ideal = make_hermite_gaussian(ref, achieved.grid);
    out.push_back(std::norm(overlap(ideal, achieved)));
  }
  return out;
}

}  // namespace qpg
