#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qpg/conversion.hpp"
#include "qpg/errors.hpp"
#include "qpg/pulse.hpp"

namespace qpg {

// Schmidt (singular-value) structure of a converted-channel transfer matrix:
// orthonormal input/output mode families, conversion angles theta_n = asin(s_n),
// per-mode efficiencies sin^2(theta_n) and the Schmidt number K.
struct SchmidtDecomposition {
  std::vector<SpectralAmplitude> input_modes;
  std::vector<SpectralAmplitude> output_modes;
  std::vector<double> angles;        // rad, descending
  std::vector<double> efficiencies;  // sin^2(theta_n)
  double schmidt_number = 1;

  double total_efficiency() const {
    double s = 0;
    for (double e : efficiencies) s += e;
    return s;
  }
};

inline SchmidtDecomposition schmidt_decompose(const GreenPair& green, double keep_above = 1e-9) {
  if (!green.g_c.allFinite()) throw std::invalid_argument("schmidt_decompose: non-finite g_c");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(green.g_c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();

  SchmidtDecomposition dec;
  const double si = std::sqrt(green.in_grid.spacing());
  const double so = std::sqrt(green.out_grid.spacing());
  double sum2 = 0, sum4 = 0;
  for (int n = 0; n < sv.size(); ++n) {
    double s = sv[n];
    if (s > 1.0 + 1e-6)
      throw unitarity_error("schmidt_decompose: singular value exceeds 1 beyond tolerance");
    s = std::min(s, 1.0);
    if (s < keep_above && n > 0) break;

    Eigen::VectorXcd u = svd.matrixU().col(n);  // output mode, unit vector
    Eigen::VectorXcd v = svd.matrixV().col(n);  // input mode
    // Phase convention: largest-magnitude component of the input mode real-positive.
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> ph = v[imax] / std::abs(v[imax]);
    v /= ph;
    u /= ph;

    dec.input_modes.push_back({green.in_grid, v / si});
    dec.output_modes.push_back({green.out_grid, u / so});
    dec.angles.push_back(std::asin(s));
    const double eta = s * s;
    dec.efficiencies.push_back(eta);
    sum2 += eta;
    sum4 += eta * eta;
  }
  dec.schmidt_number = (sum4 > 0) ? sum2 * sum2 / sum4 : 1.0;
  return dec;
}

// Mode-selectivity: efficiency of the first mode times its share of all conversion.
inline double selectivity(const SchmidtDecomposition& dec) {
  if (dec.efficiencies.empty()) throw std::invalid_argument("selectivity: empty decomposition");
  const double total = dec.total_efficiency();
  if (!(total > 0)) throw std::domain_error("selectivity: all efficiencies are zero");
  const double eta1 = dec.efficiencies.front();
  return eta1 * (eta1 / total);
}

inline double schmidt_number(const SchmidtDecomposition& dec) {
  if (dec.efficiencies.empty()) throw std::invalid_argument("schmidt_number: empty decomposition");
  double sum = 0, sum2 = 0;
  for (double e : dec.efficiencies) {
    sum += e;
    sum2 += e * e;
  }
  if (!(sum2 > 0)) throw std::domain_error("schmidt_number: all efficiencies are zero");
  return sum * sum / sum2;
}

// Experimentally accessible proxy: one minus the background-corrected ratio of the
// orthogonal-pump to the matched-pump converted intensity, clamped to [0, 1].
inline double depletion_selectivity(double i_matched, double i_orthogonal, double background) {
  if (!(i_matched > background))
    throw signal_too_weak_error("depletion_selectivity: matched signal at or below background");
  const double d = 1.0 - (i_orthogonal - background) / (i_matched - background);
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace qpg
