#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qpg/dispersion.hpp"
#include "qpg/errors.hpp"
#include "qpg/grid.hpp"
#include "qpg/pulse.hpp"

namespace qpg {

// Configuration of one propagation run. `coupling` is the dimensionless theta-scale:
// the target conversion angle of the first Schmidt mode. The pump-energy pathway
// theta = c_theta * sqrt(E) lives in the virtual-lab layer on top of this.
struct TransferConfig {
  SpectralAmplitude pump;
  DispersionModel model;
  double coupling = 0;  // rad
  int n_slices = 64;
  FrequencyGrid in_grid;
  FrequencyGrid out_grid;
  // Refine the internal coupling constant so that asin(s1(g_c)) equals `coupling`
  // exactly. Only meaningful below pi/2; beyond that the linear low-gain scaling is
  // extrapolated.
  bool exact_theta = true;
  bool check_convergence = false;

  void validate() const {
    if (n_slices < 32) throw std::invalid_argument("n_slices below convergence floor (32)");
    if (pump.values.size() != pump.grid.n_points())
      throw std::invalid_argument("pump amplitude inconsistent with its grid");
  }
};

// Converted/transmitted transfer matrices in measure-weighted convention: they act on
// vectors v * sqrt(dw), so g_t^H g_t + g_c^H g_c = I exactly.
struct GreenPair {
  Eigen::MatrixXcd g_c;  // out x in
  Eigen::MatrixXcd g_t;  // in x in
  FrequencyGrid in_grid;
  FrequencyGrid out_grid;
  double kappa = 0;  // realized coupling constant (diagnostic)
};

namespace detail {

inline std::complex<double> interp_pump(const SpectralAmplitude& pump, double w) {
  const auto& g = pump.grid;
  if (w < g.min() || w > g.max())
    throw coverage_error("pump grid does not cover requested frequency difference");
  const double t = (w - g.min()) / g.spacing();
  const int i = std::min(static_cast<int>(t), g.n_points() - 2);
  const double f = t - i;
  return (1.0 - f) * pump.values[i] + f * pump.values[i + 1];
}

// Dressed propagation phases: the grating momentum and the separable part of the pump
// dispersion phase are folded into the two channel bands, so that for gvd_p = 0 the
// residual coupling kernel is z-independent and B_out - B_in equals the QPM mismatch.
struct DressedPhases {
  Eigen::ArrayXd b_in;   // 1/m, per input grid point
  Eigen::ArrayXd b_out;  // 1/m, per output grid point
  double pump_gvd = 0;
  double mu = 0;  // out center - in center - pump reference
};

inline DressedPhases dress_phases(const DispersionModel& model, const FrequencyGrid& in_grid,
                                  const FrequencyGrid& out_grid) {
  DressedPhases d;
  const auto& pb = model.pump_band;
  const double up = pb.inverse_group_velocity;
  const double gp = pb.gvd;
  d.pump_gvd = gp;
  d.mu = out_grid.center() - in_grid.center() - pb.reference_frequency;

  d.b_in.resize(in_grid.n_points());
  for (int i = 0; i < in_grid.n_points(); ++i) {
    const double w = in_grid[i];
    const double di = w - in_grid.center();
    const double s_i = -up * di + gp * (0.5 * di * di - di * d.mu);
    d.b_in[i] = beta(model.input_band, w) + s_i;
  }
  const double s_c = pb.beta0 + up * d.mu + 0.5 * gp * d.mu * d.mu;
  const double grating = 2.0 * std::numbers::pi / model.poling_period;
  d.b_out.resize(out_grid.n_points());
  for (int o = 0; o < out_grid.n_points(); ++o) {
    const double w = out_grid[o];
    const double dd = w - out_grid.center();
    const double s_o = up * dd + gp * (0.5 * dd * dd + dd * d.mu);
    d.b_out[o] = beta(model.output_band, w) - grating - s_o - s_c;
  }
  return d;
}

// Unit-coupling kernel alpha(w_out - w_in) sqrt(dw_in dw_out).
inline Eigen::MatrixXcd weighted_pump_kernel(const TransferConfig& cfg) {
  const int ni = cfg.in_grid.n_points(), no = cfg.out_grid.n_points();
  const double meas = std::sqrt(cfg.in_grid.spacing() * cfg.out_grid.spacing());
  Eigen::MatrixXcd k(no, ni);
  for (int i = 0; i < ni; ++i)
    for (int o = 0; o < no; ++o)
      k(o, i) = meas * interp_pump(cfg.pump, cfg.out_grid[o] - cfg.in_grid[i]);
  return k;
}

// Largest singular value (and right singular vector) by power iteration on M^H M.
inline std::pair<double, Eigen::VectorXcd> top_singular(const Eigen::MatrixXcd& m,
                                                        int max_iters = 300,
                                                        double tol = 1e-13) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(m.cols());
  for (int i = 0; i < v.size(); ++i) v[i] = std::complex<double>(nd(rng), nd(rng));
  v.normalize();
  double s = 0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXcd w = m * v;
    const double sw = w.norm();
    if (sw == 0) return {0.0, v};
    v = m.adjoint() * w;
    v.normalize();
    if (std::abs(sw - s) <= tol * std::max(1.0, sw)) return {sw, v};
    s = sw;
  }
  return {s, v};
}

struct CouplingFactors {
  Eigen::MatrixXcd u;   // out x r
  Eigen::MatrixXcd v;   // in x r
  Eigen::ArrayXd s;     // r
};

// Relative cutoff 1e-6: neglected Schmidt modes of the slice kernel rotate by less
// than ~1e-6 theta over the full device, far below every accuracy target, while the
// retained rank drops by more than an order of magnitude.
inline CouplingFactors truncated_svd(const Eigen::MatrixXcd& k, double rel_cut = 1e-6) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int r = 0;
  const double cut = sv.size() ? sv[0] * rel_cut : 0.0;
  while (r < sv.size() && sv[r] > cut) ++r;
  r = std::max(r, 1);
  return {svd.matrixU().leftCols(r), svd.matrixV().leftCols(r), sv.head(r).array()};
}

}  // namespace detail

// Low-gain joint spectral amplitude f(w_out, w_in) = alpha(w_out - w_in) * Phi(w_in, w_out),
// unnormalized and without measure weights.
inline Eigen::MatrixXcd joint_spectral_amplitude(const TransferConfig& cfg) {
  cfg.validate();
  const int ni = cfg.in_grid.n_points(), no = cfg.out_grid.n_points();
  Eigen::MatrixXcd f(no, ni);
  for (int i = 0; i < ni; ++i) {
    const double wi = cfg.in_grid[i];
    for (int o = 0; o < no; ++o) {
      const double wo = cfg.out_grid[o];
      f(o, i) = detail::interp_pump(cfg.pump, wo - wi) * phasematching_amplitude(cfg.model, wi, wo);
    }
  }
  return f;
}

namespace detail {

// One full propagation at a fixed coupling constant kappa [1/m per unit kernel].
// Per slice: half dispersion phases, the exact coupling exponential of the
// slice-averaged interaction kernel, half phases again (Strang form). Averaging the
// interaction kernel over the slice (first Magnus term) multiplies each element by
// sinc((b_in - b_out) dz / 2); with that factor the low-gain limit reproduces the
// continuum sinc phase-matching amplitude exactly at any slice count, and the
// remaining slice error is a pure time-ordering (kappa^2) commutator.
inline GreenPair propagate_fixed_kappa(const TransferConfig& cfg, const Eigen::MatrixXcd& kernel,
                                       double kappa, int n_slices) {
  using cplx = std::complex<double>;
  const int ni = cfg.in_grid.n_points(), no = cfg.out_grid.n_points();
  const double L = cfg.model.waveguide_length;
  const double dz = L / n_slices;

  const DressedPhases ph = dress_phases(cfg.model, cfg.in_grid, cfg.out_grid);

  GreenPair g;
  g.in_grid = cfg.in_grid;
  g.out_grid = cfg.out_grid;
  g.kappa = kappa;
  g.g_c = Eigen::MatrixXcd::Zero(no, ni);
  g.g_t = Eigen::MatrixXcd::Identity(ni, ni);

  if (kappa == 0.0) {
    // Pure dispersion: diagonal phases over the full length.
    for (int i = 0; i < ni; ++i) g.g_t(i, i) = std::polar(1.0, ph.b_in[i] * L);
    return g;
  }

  // Suzuki five-stage composition S(p h) S(p h) S((1-4p) h) S(p h) S(p h) of the
  // Strang step: fourth-order slice convergence with a small error constant.
  const double p = 1.0 / (4.0 - std::cbrt(4.0));
  const double q = 1.0 - 4.0 * p;
  const double sub[5] = {p, p, q, p, p};

  auto phase_diag = [&](double frac) {
    std::pair<Eigen::VectorXcd, Eigen::VectorXcd> d{Eigen::VectorXcd(ni), Eigen::VectorXcd(no)};
    for (int i = 0; i < ni; ++i) d.first[i] = std::polar(1.0, frac * ph.b_in[i] * dz);
    for (int o = 0; o < no; ++o) d.second[o] = std::polar(1.0, frac * ph.b_out[o] * dz);
    return d;
  };
  const auto d_edge = phase_diag(0.5 * p);       // start/end of a slice
  const auto d_pp = phase_diag(p);               // between two p sub-steps; slice joins
  const auto d_pq = phase_diag(0.5 * (p + q));   // between a p and the q sub-step

  auto apply_phase = [&](const std::pair<Eigen::VectorXcd, Eigen::VectorXcd>& d) {
    g.g_c.array().colwise() *= d.second.array();
    g.g_t.array().colwise() *= d.first.array();
  };

  const bool static_kernel = (ph.pump_gvd == 0.0);
  CouplingFactors cf;
  if (static_kernel) cf = truncated_svd(kappa * kernel);

  const cplx iu(0.0, 1.0);
  auto apply_coupling = [&](const CouplingFactors& f, double frac) {
    const Eigen::ArrayXd cm1 = (f.s * (frac * dz)).cos() - 1.0;
    const Eigen::ArrayXd sn = (f.s * (frac * dz)).sin();
    const Eigen::MatrixXcd tu = f.u.adjoint() * g.g_c;  // r x ni
    const Eigen::MatrixXcd tv = f.v.adjoint() * g.g_t;  // r x ni
    g.g_c.noalias() +=
        f.u * (cm1.matrix().asDiagonal() * tu + iu * (sn.matrix().asDiagonal() * tv));
    g.g_t.noalias() +=
        f.v * (cm1.matrix().asDiagonal() * tv + iu * (sn.matrix().asDiagonal() * tu));
  };

  // Pump GVD leaves a non-separable phase exp(-i gvd_p do di z); re-factor at the
  // midpoint of each sub-step.
  auto z_kernel = [&](double z_mid) {
    Eigen::MatrixXcd km(no, ni);
    for (int i = 0; i < ni; ++i) {
      const double di = cfg.in_grid[i] - cfg.in_grid.center();
      for (int o = 0; o < no; ++o) {
        const double dd = cfg.out_grid[o] - cfg.out_grid.center();
        km(o, i) = kappa * kernel(o, i) * std::polar(1.0, -ph.pump_gvd * dd * di * z_mid);
      }
    }
    return truncated_svd(km);
  };

  apply_phase(d_edge);
  double z = 0;
  for (int m = 0; m < n_slices; ++m) {
    for (int k = 0; k < 5; ++k) {
      const double frac = sub[k];
      if (static_kernel)
        apply_coupling(cf, frac);
      else
        apply_coupling(z_kernel(z + 0.5 * frac * dz), frac);
      z += frac * dz;
      if (k == 1 || k == 2)
        apply_phase(d_pq);
      else if (k < 4)
        apply_phase(d_pp);
      else if (m + 1 < n_slices)
        apply_phase(d_pp);
      else
        apply_phase(d_edge);
    }
  }
  return g;
}

// First singular value of the linear-response (low-gain) map for kappa = 1. With the
// slice-averaged kernel the discrete sum telescopes to the continuum integral, so
// this is exact and slice-count independent: L * sinc((b_in - b_out) L / 2).
inline double linear_response_scale(const TransferConfig& cfg, const Eigen::MatrixXcd& kernel,
                                    int /*n_slices*/) {
  const int ni = cfg.in_grid.n_points(), no = cfg.out_grid.n_points();
  const double L = cfg.model.waveguide_length;
  const DressedPhases ph = dress_phases(cfg.model, cfg.in_grid, cfg.out_grid);

  Eigen::MatrixXcd lin(no, ni);
  for (int i = 0; i < ni; ++i)
    for (int o = 0; o < no; ++o)
      lin(o, i) = kernel(o, i) * L * sinc(0.5 * (ph.b_in[i] - ph.b_out[o]) * L);
  return top_singular(lin).first;
}

}  // namespace detail

// Full slice-ordered propagation to the configured coupling strength.
inline GreenPair propagate(const TransferConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXcd kernel = detail::weighted_pump_kernel(cfg);
  const double theta = cfg.coupling;

  auto run = [&](int n_slices) -> GreenPair {
    if (theta == 0.0) return detail::propagate_fixed_kappa(cfg, kernel, 0.0, n_slices);
    const double s_lin = detail::linear_response_scale(cfg, kernel, n_slices);
    if (s_lin <= 0) throw calibration_error("propagate: zero pump, cannot reach requested coupling");
    double kappa = theta / s_lin;
    GreenPair g = detail::propagate_fixed_kappa(cfg, kernel, kappa, n_slices);
    if (cfg.exact_theta && theta > 0 && theta <= 1.55) {
      // Secant refinement of kappa so that asin(s1(g_c)) hits theta exactly.
      constexpr double tol = 1e-5;  // rad; sin^2 theta then accurate to ~1e-5
      double k0 = kappa, t0 = std::asin(std::min(1.0, detail::top_singular(g.g_c).first));
      double k1 = k0 * (t0 > 0 ? theta / t0 : 1.0);
      for (int it = 0; it < 8 && std::abs(t0 - theta) > tol; ++it) {
        g = detail::propagate_fixed_kappa(cfg, kernel, k1, n_slices);
        const double t1 = std::asin(std::min(1.0, detail::top_singular(g.g_c).first));
        if (std::abs(t1 - theta) <= tol) return g;
        const double dk = (std::abs(t1 - t0) > 0) ? (theta - t1) * (k1 - k0) / (t1 - t0) : 0.0;
        k0 = k1;
        t0 = t1;
        k1 = k1 + dk;
        if (!(k1 > 0)) k1 = 0.5 * k0;
      }
    }
    return g;
  };

  GreenPair g = run(cfg.n_slices);
  if (cfg.check_convergence) {
    const GreenPair g2 = run(2 * cfg.n_slices);
    const double ref = std::max(g.g_c.norm(), 1e-300);
    if ((g2.g_c - g.g_c).norm() / ref > 1e-4)
      throw convergence_error("propagate: doubling n_slices changes g_c by more than 1e-4");
  }
  return g;
}

struct ChannelPair {
  SpectralAmplitude converted;    // unnormalized; power() = conversion probability
  SpectralAmplitude transmitted;  // unnormalized
};

inline ChannelPair apply(const GreenPair& green, const SpectralAmplitude& input) {
  if (!(input.grid == green.in_grid)) throw grid_mismatch_error("apply: input not on in_grid");
  const double si = std::sqrt(green.in_grid.spacing());
  const double so = std::sqrt(green.out_grid.spacing());
  const Eigen::VectorXcd v = input.values * si;
  ChannelPair out;
  out.converted = {green.out_grid, (green.g_c * v) / so};
  out.transmitted = {green.in_grid, (green.g_t * v) / si};
  return out;
}

// Hermitian unitarity defect g_t^H g_t + g_c^H g_c - I; returns its spectral norm.
inline double unitarity_residual(const GreenPair& g) {
  Eigen::MatrixXcd e = g.g_t.adjoint() * g.g_t;
  e.noalias() += g.g_c.adjoint() * g.g_c;
  e -= Eigen::MatrixXcd::Identity(e.rows(), e.cols());
  return detail::top_singular(e, 100).first;
}

struct EfficiencyPoint {
  double energy = 0;      // J
  double theta = 0;       // rad, target conversion angle c_theta sqrt(E)
  double efficiency = 0;  // dimensionless
};

// Conversion efficiency versus pump pulse energy with theta = c_theta sqrt(E).
// With a null probe the matched first Schmidt mode is used, so the curve equals
// sin^2(c_theta sqrt(E)) up to time-ordering residuals beyond pi/2.
inline std::vector<EfficiencyPoint> conversion_efficiency_curve(
    const TransferConfig& base, const std::vector<double>& energies, double c_theta,
    const SpectralAmplitude* probe = nullptr) {
  std::vector<EfficiencyPoint> out;
  out.reserve(energies.size());
  for (double e : energies) {
    if (e < 0) throw std::domain_error("pump energy must be non-negative");
    TransferConfig cfg = base;
    cfg.coupling = c_theta * std::sqrt(e);
    EfficiencyPoint pt{e, cfg.coupling, 0.0};
    if (cfg.coupling > 0) {
      const GreenPair g = propagate(cfg);
      if (probe) {
        pt.efficiency = apply(g, *probe).converted.power();
      } else {
        const double s1 = detail::top_singular(g.g_c).first;
        pt.efficiency = s1 * s1;
      }
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace qpg
