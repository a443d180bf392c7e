#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpg/errors.hpp"

namespace qpg {

struct SinSquaredFit {
  double amplitude = 0;  // a in a sin^2(c sqrt(E))
  double rate = 0;       // c, rad per sqrt(energy unit)
  double rms_residual = 0;
  int iterations = 0;
  bool converged = false;

  double operator()(double energy) const {
    const double s = std::sin(rate * std::sqrt(energy));
    return amplitude * s * s;
  }
};

// Levenberg-Marquardt fit of y = a sin^2(c sqrt(E)). Amplitude bounded to [0, 1.2].
inline SinSquaredFit fit_sin_squared(const std::vector<double>& energies,
                                     const std::vector<double>& values) {
  const int n = static_cast<int>(energies.size());
  if (n < 3 || values.size() != energies.size())
    throw fit_error("fit_sin_squared: need at least 3 matching samples");

  double a = *std::max_element(values.begin(), values.end());
  a = std::clamp(a, 1e-6, 1.2);
  // Initial rate from the first crossing of half the peak (theta = pi/4 heuristic).
  double c = 0;
  for (int i = 0; i < n; ++i) {
    if (values[i] >= 0.5 * a && energies[i] > 0) {
      c = (std::numbers::pi / 4.0) / std::sqrt(energies[i]);
      break;
    }
  }
  if (c == 0) {
    const double emax = *std::max_element(energies.begin(), energies.end());
    c = emax > 0 ? 0.5 / std::sqrt(emax) : 1.0;
  }

  auto chi2 = [&](double aa, double cc) {
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      const double s = std::sin(cc * std::sqrt(energies[i]));
      const double r = values[i] - aa * s * s;
      acc += r * r;
    }
    return acc;
  };

  double lambda = 1e-3;
  double best = chi2(a, c);
  SinSquaredFit fit;
  for (fit.iterations = 0; fit.iterations < 200; ++fit.iterations) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i) {
      const double q = std::sqrt(energies[i]);
      const double s = std::sin(c * q);
      const double da = s * s;
      const double dc = a * 2.0 * s * std::cos(c * q) * q;
      const double r = values[i] - a * da;
      jtj(0, 0) += da * da;
      jtj(0, 1) += da * dc;
      jtj(1, 1) += dc * dc;
      jtr[0] += da * r;
      jtr[1] += dc * r;
    }
    jtj(1, 0) = jtj(0, 1);

    Eigen::Matrix2d damped = jtj;
    damped(0, 0) *= (1.0 + lambda);
    damped(1, 1) *= (1.0 + lambda);
    if (std::abs(damped.determinant()) < 1e-300)
      throw fit_error("fit_sin_squared: singular normal equations");
    const Eigen::Vector2d step = damped.inverse() * jtr;

    const double a_try = std::clamp(a + step[0], 0.0, 1.2);
    const double c_try = std::max(c + step[1], 1e-12);
    const double chi_try = chi2(a_try, c_try);
    if (chi_try < best) {
      const double improvement = best - chi_try;
      a = a_try;
      c = c_try;
      best = chi_try;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (improvement < 1e-15 * (1.0 + best)) {
        fit.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) {
        fit.converged = true;  // stuck at a (local) minimum
        break;
      }
    }
  }
  if (!fit.converged && fit.iterations >= 200)
    throw fit_error("fit_sin_squared: no convergence after 200 iterations (chi2=" +
                    std::to_string(best) + ")");
  fit.amplitude = a;
  fit.rate = c;
  fit.rms_residual = std::sqrt(best / n);
  return fit;
}

}  // namespace qpg
