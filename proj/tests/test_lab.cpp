#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qpg/lab.hpp"

using namespace qpg;
using Catch::Approx;

namespace {

Scenario small_scenario(int n = 128) {
  Scenario s;
  s.engine.in_points = n;
  s.engine.out_points = n;
  s.engine.pump_points = 1024;
  return s;
}

// Analytic low-gain overlap oracle: the selected input mode is the pump profile
// mirrored about half the output center frequency, so the scan intensity is
// |<mirrored pump | probe>|^2.
double analytic_scan_point(const Scenario& s, const SpectralAmplitude& probe, double lambda_p,
                           int order) {
  const FrequencyGrid& g = probe.grid;
  const double out_c = s.probe.pulse.center_omega() + s.pump_pulse.center_omega();
  const PulseSpec ps{lambda_p, duration_to_bandwidth(lambda_p, s.engine.scan_pump_duration),
                     order, {}};
  const double sig = ps.sigma_omega(), c = ps.center_omega();
  std::complex<double> ov = 0;
  for (int i = 0; i < g.n_points(); ++i) {
    const double x = ((out_c - g[i]) - c) / sig;
    ov += qpg::detail::hermite(order, x) * std::exp(-0.5 * x * x) * probe.values[i];
  }
  return std::norm(ov);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

int interior_minima(const std::vector<double>& v) {
  double mx = 0;
  for (double x : v) mx = std::max(mx, x);
  int n = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] < v[i - 1] && v[i] <= v[i + 1] && v[i] < 0.1 * mx) ++n;
  return n;
}

}  // namespace

TEST_CASE("grid construction") {
  const Scenario s = small_scenario();
  const FrequencyGrid in = make_input_grid(s);
  const FrequencyGrid out = make_output_grid(s);
  const FrequencyGrid pg = make_pump_grid(s, in, out);

  CHECK(in.center() == Approx(s.probe.pulse.center_omega()).epsilon(1e-14));
  CHECK(in.span() == Approx(10.0 * s.probe.pulse.fwhm_omega()).epsilon(1e-12));
  CHECK(out.center() ==
        Approx(s.probe.pulse.center_omega() + s.pump_pulse.center_omega()).epsilon(1e-14));
  CHECK(pg.center() == Approx(out.center() - in.center()).epsilon(1e-14));
  CHECK(pg.span() > in.span() + out.span());

  SECTION("output span tracks the phase-matching bandwidth") {
    const double pm = detail::phasematching_fwhm(s.model);
    CHECK(out.span() == Approx(12.0 * pm).epsilon(1e-12));
    // 0.14 nm at 553.5 nm, the design target.
    CHECK(angular_frequency_to_bandwidth(553.5e-9, pm) == Approx(0.14e-9).epsilon(0.01));
  }
}

TEST_CASE("wavelength scan tomography") {
  const Scenario s = small_scenario();
  const FrequencyGrid in = make_input_grid(s);
  const SpectralAmplitude probe = make_probe_amplitude(s, in);

  SECTION("HG0 and HG1 traces follow the analytic overlap oracle") {
    for (int order : {0, 1}) {
      const ScanResult sc =
          scan_pump_wavelength(s, order, Readout::modulus_squared, 856e-9, 872e-9, 1e-9);
      REQUIRE(sc.abscissa.size() == 17);
      std::vector<double> oracle;
      for (double lp : sc.abscissa) oracle.push_back(analytic_scan_point(s, probe, lp, order));
      CHECK(pearson(sc.intensities, oracle) > 0.98);
      CHECK(interior_minima(sc.intensities) == order);
    }
  }

  SECTION("modulus readout is the square root of the intensity readout") {
    const ScanResult si =
        scan_pump_wavelength(s, 0, Readout::modulus_squared, 860e-9, 868e-9, 4e-9);
    const ScanResult sm = scan_pump_wavelength(s, 0, Readout::modulus, 860e-9, 868e-9, 4e-9);
    REQUIRE(si.abscissa.size() == sm.abscissa.size());
    for (std::size_t i = 0; i < si.abscissa.size(); ++i)
      CHECK(sm.intensities[i] == Approx(std::sqrt(si.intensities[i])).epsilon(1e-12));
  }

  SECTION("spectra accompany every scan point") {
    const ScanResult sc =
        scan_pump_wavelength(s, 0, Readout::modulus_squared, 860e-9, 868e-9, 4e-9);
    REQUIRE(sc.spectra.size() == sc.abscissa.size());
    for (const auto& sp : sc.spectra) CHECK(sp.size() == sc.spectrum_grid.n_points());
  }
}

TEST_CASE("mode reconstruction from a wavelength scan") {
  const Scenario s = small_scenario();
  const ScanResult sc = scan_pump_wavelength(s, 0, Readout::modulus, 860e-9, 868e-9, 2e-9);
  const ModeReconstruction rec = reconstruct_selected_mode(sc, s);
  REQUIRE(rec.magnitude.size() == sc.abscissa.size());
  const double out_c = s.probe.pulse.center_omega() + s.pump_pulse.center_omega();
  for (std::size_t i = 0; i < sc.abscissa.size(); ++i) {
    const double wp = wavelength_to_angular_frequency(sc.abscissa[i]);
    CHECK(rec.probe_frame_offset[i] ==
          Approx((out_c - wp) - s.probe.pulse.center_omega()).epsilon(1e-12));
    CHECK(rec.magnitude[i] == Approx(sc.intensities[i]).epsilon(1e-12));
  }
  // The reconstructed magnitude peaks near zero offset in the probe frame.
  std::size_t im = 0;
  for (std::size_t i = 1; i < rec.magnitude.size(); ++i)
    if (rec.magnitude[i] > rec.magnitude[im]) im = i;
  CHECK(std::abs(rec.probe_frame_offset[im]) < 2.0 * s.probe.pulse.fwhm_omega());
}

TEST_CASE("bandwidth scan") {
  const Scenario s = small_scenario();
  std::vector<double> bws;
  for (double b = 2.5e-9; b <= 5.51e-9; b += 0.5e-9) bws.push_back(b);
  const ScanResult sc = scan_pump_bandwidth(s, 2, bws);
  REQUIRE(sc.abscissa.size() == bws.size());
  std::size_t im = 0;
  for (std::size_t i = 1; i < sc.intensities.size(); ++i)
    if (sc.intensities[i] < sc.intensities[im]) im = i;
  // The HG2 conversion minimum sits at the matched pump bandwidth, 4.0 +/- 0.5 nm.
  CHECK(sc.abscissa[im] == Approx(4.0e-9).margin(0.5e-9));
  CHECK(sc.normalization == "per pump pulse energy after shaping");
}

TEST_CASE("selectivity benchmark") {
  const Scenario s = small_scenario();
  const SelectivityBenchmark b = selectivity_benchmark(s);

  SECTION("ideal shaper: strong depletion contrast") {
    CHECK(b.depletion >= 0.85);
    CHECK(b.depletion <= 1.0);
    CHECK(b.i_orthogonal < 0.1 * b.i_matched);
    CHECK(b.background == 0.0);
  }

  SECTION("spectrometer background enters both integrals") {
    Scenario sb = s;
    sb.noise.spectrometer_background = 1e-3;
    const SelectivityBenchmark bb = selectivity_benchmark(sb);
    CHECK(bb.background > 0.0);
    CHECK(bb.i_matched > b.i_matched);
    // Background-corrected figure is unchanged to first order.
    CHECK(bb.depletion == Approx(b.depletion).margin(1e-6));
  }
}

TEST_CASE("efficiency experiment") {
  Scenario s = small_scenario(96);
  const std::vector<double> energies{0.0, 4e-12, 9e-12, 16e-12};

  SECTION("noiseless model hits the sin^2 anchor") {
    const std::vector<double> eff = efficiency_model(s, energies);
    REQUIRE(eff.size() == 4);
    CHECK(eff[0] == 0.0);
    for (std::size_t i = 1; i < energies.size(); ++i) {
      const double theta = s.engine.c_theta * std::sqrt(energies[i]);
      CHECK(eff[i] == Approx(std::sin(theta) * std::sin(theta)).margin(1e-3));
    }
    CHECK(eff[3] == Approx(0.877).margin(1e-3));
  }

  SECTION("counting requires an integration time") {
    CHECK_THROWS_AS(simulate_counts(s, energies, {0.0, 0.3, 0.6, 0.877}), config_error);
  }

  SECTION("counting statistics and determinism") {
    s.probe.integration_time = 10e-3;
    const std::vector<double> eff{0.0, 0.32, 0.63, 0.877};
    const EfficiencyExperiment a = simulate_counts(s, energies, eff);
    const EfficiencyExperiment b = simulate_counts(s, energies, eff);
    CHECK(a.raw_counts == b.raw_counts);
    CHECK(a.background_counts == b.background_counts);

    Scenario s2 = s;
    s2.noise.rng_seed = 99;
    const EfficiencyExperiment c = simulate_counts(s2, energies, eff);
    CHECK(a.raw_counts != c.raw_counts);

    // Expected counts: (efficiency x flux + dark) x t within Poisson scatter.
    const double flux = s.probe.mean_photon_number * s.probe.repetition_rate;
    for (std::size_t i = 0; i < energies.size(); ++i) {
      const double mean = (eff[i] * flux + s.noise.dark_count_rate) * s.probe.integration_time;
      CHECK(std::abs(a.raw_counts[i] - mean) < 6.0 * std::sqrt(mean));
    }

    // SNR at the anchor point: signal/dark = 0.877 x 0.15 x 80 MHz / 1.19591 MHz.
    CHECK(a.snr == Approx(8.8).margin(0.4));
  }

  SECTION("per-point rng streams are independent of list position") {
    CHECK(detail::poisson_draw(100.0, 1, 5, 1) == detail::poisson_draw(100.0, 1, 5, 1));
    CHECK(detail::poisson_draw(100.0, 1, 5, 1) != detail::poisson_draw(100.0, 1, 6, 1));
    CHECK(detail::poisson_draw(100.0, 1, 5, 1) != detail::poisson_draw(100.0, 2, 5, 1));
    CHECK(detail::poisson_draw(0.0, 1, 0, 1) == 0);
  }
}

TEST_CASE("bandwidth compression report") {
  const Scenario s = small_scenario();
  const CompressionReport r = bandwidth_compression_report(s);
  CHECK(r.factor == Approx(11.0).margin(1.5));
  CHECK(r.converted_center_wavelength == Approx(553.5e-9).margin(1e-9));
  CHECK(r.converted_fwhm_wavelength == Approx(0.14e-9).epsilon(0.10));
  CHECK(r.probe_fwhm_nu == Approx(r.factor * r.converted_fwhm_nu).epsilon(1e-12));
}

TEST_CASE("config validation guards") {
  Scenario s = small_scenario();
  s.probe.mean_photon_number = -0.1;
  CHECK_THROWS_AS(s.probe.validate(), std::domain_error);
  NoiseConfig n;
  n.dark_count_rate = -1;
  CHECK_THROWS_AS(n.validate(), std::domain_error);
}
