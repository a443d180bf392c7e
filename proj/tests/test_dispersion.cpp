#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qpg/dispersion.hpp"
#include "qpg/units.hpp"

using namespace qpg;
using Catch::Approx;

TEST_CASE("taylor propagation constant") {
  const BandDispersion band{1.0e15, 1.2e7, 7.3e-9, 2.5e-25};

  CHECK(beta(band, band.reference_frequency) == Approx(band.beta0).epsilon(1e-15));

  SECTION("linear term without gvd") {
    BandDispersion lin = band;
    lin.gvd = 0;
    const double d = 3e12;
    CHECK(beta(lin, lin.reference_frequency + d) ==
          Approx(lin.beta0 + d * lin.inverse_group_velocity).epsilon(1e-14));
  }

  SECTION("central-difference slope equals the inverse group velocity") {
    const double h = 1e9;
    const double slope =
        (beta(band, band.reference_frequency + h) - beta(band, band.reference_frequency - h)) /
        (2 * h);
    CHECK(slope == Approx(band.inverse_group_velocity).epsilon(1e-6));
  }
}

TEST_CASE("qpm mismatch") {
  const DispersionModel m = calibrate_default_model();
  const double w_in = wavelength_to_angular_frequency(1535e-9);
  const double w_out = w_in + wavelength_to_angular_frequency(865.6e-9);

  SECTION("design point is phase-matched") {
    CHECK(std::abs(qpm_mismatch(m, w_in, w_out)) < 1e-6 * 2 * std::numbers::pi / m.poling_period);
  }

  SECTION("invalid frequency ordering throws") {
    CHECK_THROWS_AS(qpm_mismatch(m, w_out, w_in), std::domain_error);
  }

  SECTION("co-moving cancellation: equal group velocities make input shifts first-order flat") {
    DispersionModel eq = m;
    eq.output_band.inverse_group_velocity = eq.input_band.inverse_group_velocity;
    const double d = 1e12;
    const double db0 = qpm_mismatch(eq, w_in, w_out);
    CHECK(qpm_mismatch(eq, w_in, w_out + d) == Approx(db0).margin(1e-9));
  }

  SECTION("odd first-order response to input detuning when gvd = 0") {
    DispersionModel mm = m;  // break the gv match so the linear term is nonzero
    mm.pump_band.inverse_group_velocity += 2e-10;
    const double d = 5e11;
    const double ref = qpm_mismatch(mm, w_in, w_out);
    const double plus = qpm_mismatch(mm, w_in + d, w_out) - ref;
    const double minus = qpm_mismatch(mm, w_in - d, w_out) - ref;
    CHECK(plus == Approx(-minus).epsilon(1e-6));
  }
}

TEST_CASE("phase-matching amplitude") {
  const DispersionModel m = calibrate_default_model();
  const double w_in = wavelength_to_angular_frequency(1535e-9);
  const double w_out = w_in + wavelength_to_angular_frequency(865.6e-9);

  SECTION("unity at the design point") {
    CHECK(std::abs(phasematching_amplitude(m, w_in, w_out) - 1.0) < 1e-9);
  }

  SECTION("zero at db L/2 = pi") {
    // Detune the output so that db L/2 = pi (gv-matched: db is linear in w_out).
    const double walkoff = m.output_band.inverse_group_velocity -
                           m.input_band.inverse_group_velocity;
    const double d = 2 * std::numbers::pi / (walkoff * m.waveguide_length / 2) / 2;
    CHECK(std::abs(phasematching_amplitude(m, w_in, w_out + d)) < 1e-9);
  }

  SECTION("half power at the numeric sinc^2 = 1/2 root") {
    // Oracle: bisect sinc^2(x) = 1/2 on [1, 2].
    auto sinc2 = [](double x) { return std::pow(std::sin(x) / x, 2); };
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (sinc2(mid) > 0.5 ? lo : hi) = mid;
    }
    const double x_half = 0.5 * (lo + hi);
    CHECK(x_half == Approx(sinc_half_power_point).epsilon(1e-10));

    const double walkoff = m.output_band.inverse_group_velocity -
                           m.input_band.inverse_group_velocity;
    const double d = 2 * x_half / (walkoff * m.waveguide_length);
    CHECK(std::norm(phasematching_amplitude(m, w_in, w_out + d)) == Approx(0.5).epsilon(1e-9));
  }

  SECTION("continuity near zero mismatch") {
    const double walkoff = m.output_band.inverse_group_velocity -
                           m.input_band.inverse_group_velocity;
    const double tiny = 1e-5 / (walkoff * m.waveguide_length);  // db L/2 = 5e-6
    const auto v = phasematching_amplitude(m, w_in, w_out + tiny);
    CHECK(std::abs(v - 1.0) < 1e-5);
  }

  SECTION("Phi depends on inputs only through the mismatch") {
    // With gv-matched input/pump bands, shifting the input leaves db unchanged.
    const double d = 7e11;
    const auto a = phasematching_amplitude(m, w_in, w_out + 3e11);
    const auto b = phasematching_amplitude(m, w_in + d, w_out + 3e11);
    CHECK(std::abs(a - b) < 1e-9);
  }
}

TEST_CASE("group-velocity matching report") {
  SECTION("identical inverse group velocities") {
    const DispersionModel m = calibrate_default_model();
    const auto r = is_gv_matched(m, 287e-15);
    CHECK(r.matched);
    CHECK(r.input_pump == 0.0);
    CHECK(r.input_output > 0.0);
  }

  SECTION("100 fs/mm walk-off over 10 mm breaks matching for a 287 fs pulse") {
    DispersionModel m = calibrate_default_model();
    m.waveguide_length = 10e-3;
    m.pump_band.inverse_group_velocity = m.input_band.inverse_group_velocity + 100e-15 / 1e-3;
    const auto r = is_gv_matched(m, 287e-15);
    CHECK_FALSE(r.matched);
    CHECK(r.input_pump == Approx(1e-12).epsilon(1e-12));
  }

  CHECK_THROWS_AS(is_gv_matched(calibrate_default_model(), 0.0), std::domain_error);
}

TEST_CASE("default model calibration") {
  const DispersionModel m = calibrate_default_model();

  SECTION("structure") {
    CHECK(m.poling_period == Approx(4.4e-6));
    CHECK(m.input_band.inverse_group_velocity == m.pump_band.inverse_group_velocity);
    CHECK(m.waveguide_length > 1e-3);
    CHECK(m.waveguide_length < 0.1);
  }

  SECTION("sinc FWHM matches the 0.14 nm target analytically") {
    const double lambda_out = sum_frequency_wavelength(1535e-9, 865.6e-9);
    const double walkoff = m.output_band.inverse_group_velocity -
                           m.input_band.inverse_group_velocity;
    const double fwhm_omega = 4.0 * sinc_half_power_point / (m.waveguide_length * walkoff);
    CHECK(angular_frequency_to_bandwidth(lambda_out, fwhm_omega) ==
          Approx(0.14e-9).epsilon(1e-6));
  }

  SECTION("doubling the length halves the phase-matching bandwidth") {
    DispersionModel m2 = m;
    m2.waveguide_length *= 2;
    const double walkoff = m.output_band.inverse_group_velocity -
                           m.input_band.inverse_group_velocity;
    const double f1 = 4.0 * sinc_half_power_point / (m.waveguide_length * walkoff);
    const double f2 = 4.0 * sinc_half_power_point / (m2.waveguide_length * walkoff);
    CHECK(f2 == Approx(f1 / 2).epsilon(1e-12));
  }

  SECTION("unreachable targets throw") {
    CalibrationTargets bad;
    bad.output_walkoff = 0;
    CHECK_THROWS_AS(calibrate_default_model(bad), calibration_error);
    CalibrationTargets bad2;
    bad2.output_fwhm_wavelength = -1e-9;
    CHECK_THROWS_AS(calibrate_default_model(bad2), calibration_error);
  }
}
