#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpg/config.hpp"
#include "qpg/io.hpp"
#include "qpg/lab.hpp"

using namespace qpg;

namespace {

nlohmann::json base_summary(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["config_hash"] = cfg.hash_hex();
  return j;
}

int run(const std::string& cmd, const ScenarioConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto out = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
  const Scenario& s = cfg.scenario;
  nlohmann::json summary = base_summary(cfg);

  if (cmd == "validate-config") {
    std::printf("config ok (hash %s)\n", cfg.hash_hex().c_str());
    return 0;
  }

  if (cmd == "decompose") {
    const FrequencyGrid in_grid = make_input_grid(s);
    const FrequencyGrid out_grid = make_output_grid(s);
    const FrequencyGrid pump_grid = make_pump_grid(s, in_grid, out_grid);
    const ShapedPump pump = shape_pump(s.pump_pulse, s.shaper, pump_grid);
    TransferConfig tc = make_transfer_config(s, pump.amplitude, in_grid, out_grid,
                                             std::numbers::pi / 2);
    const GreenPair g = propagate(tc);
    const SchmidtDecomposition dec = schmidt_decompose(g, 1e-4);
    write_decomposition_csv(dec, out("decomposition.csv"), cfg.hash_hex());
    write_green_binary(g, out("green.bin"));
    summary["selectivity"] = selectivity(dec);
    summary["schmidt_number"] = dec.schmidt_number;
    summary["theta_1"] = dec.angles.empty() ? 0.0 : dec.angles[0];
    write_summary_json(summary, out("summary.json"));
    std::printf("decompose: %zu modes, selectivity %.4f\n", dec.angles.size(),
                selectivity(dec));
    return 0;
  }

  if (cmd == "scan-wavelength") {
    const ScanResult r =
        scan_pump_wavelength(s, cfg.experiment.hg_order, cfg.experiment.readout,
                             cfg.experiment.lambda_min, cfg.experiment.lambda_max,
                             cfg.experiment.lambda_step);
    write_scan_csv(r, out("scan_wavelength.csv"), cfg.hash_hex());
    write_scan_spectra_csv(r, out("scan_wavelength_spectra.csv"), cfg.hash_hex());
    summary["points"] = r.abscissa.size();
    summary["hg_order"] = cfg.experiment.hg_order;
    write_summary_json(summary, out("summary.json"));
    std::printf("scan-wavelength: %zu points written\n", r.abscissa.size());
    return 0;
  }

  if (cmd == "scan-bandwidth") {
    const ScanResult r =
        scan_pump_bandwidth(s, cfg.experiment.hg_order, cfg.experiment.bandwidths(),
                            cfg.experiment.readout);
    write_scan_csv(r, out("scan_bandwidth.csv"), cfg.hash_hex());
    write_scan_spectra_csv(r, out("scan_bandwidth_spectra.csv"), cfg.hash_hex());
    summary["points"] = r.abscissa.size();
    summary["hg_order"] = cfg.experiment.hg_order;
    write_summary_json(summary, out("summary.json"));
    std::printf("scan-bandwidth: %zu points written\n", r.abscissa.size());
    return 0;
  }

  if (cmd == "benchmark") {
    const SelectivityBenchmark b = selectivity_benchmark(s);
    summary["selectivity"] = b.depletion;
    summary["i_matched"] = b.i_matched;
    summary["i_orthogonal"] = b.i_orthogonal;
    summary["background"] = b.background;
    write_summary_json(summary, out("summary.json"));
    std::printf("benchmark: depletion selectivity %.4f\n", b.depletion);
    return 0;
  }

  if (cmd == "efficiency") {
    const EfficiencyExperiment ex = efficiency_experiment(s, cfg.experiment.energies());
    auto f = qpg::detail::open_output(out("efficiency.csv"));
    f << "# config_hash: " << cfg.hash_hex() << "\n";
    f << "# columns: energy[J],model_efficiency,raw_counts,background_counts,corrected,"
         "normalized\n";
    for (std::size_t i = 0; i < ex.energies.size(); ++i)
      f << qpg::detail::format_g9(ex.energies[i]) << ','
        << qpg::detail::format_g9(ex.efficiencies[i]) << ',' << ex.raw_counts[i] << ','
        << ex.background_counts[i] << ',' << qpg::detail::format_g9(ex.corrected[i]) << ','
        << qpg::detail::format_g9(ex.normalized[i]) << "\n";
    f.close();
    summary["fit_amplitude"] = ex.fit.amplitude;
    summary["fit_rate"] = ex.fit.rate;
    summary["fit_rms_residual"] = ex.fit.rms_residual;
    summary["snr"] = ex.snr;
    write_summary_json(summary, out("summary.json"));
    std::printf("efficiency: fit amplitude %.4f, SNR %.2f\n", ex.fit.amplitude, ex.snr);
    return 0;
  }

  if (cmd == "compression") {
    const CompressionReport r = bandwidth_compression_report(s);
    summary["compression_factor"] = r.factor;
    summary["converted_fwhm_wavelength"] = r.converted_fwhm_wavelength;
    summary["converted_center_wavelength"] = r.converted_center_wavelength;
    write_summary_json(summary, out("summary.json"));
    std::printf("compression: factor %.3f, converted FWHM %.4g nm\n", r.factor,
                r.converted_fwhm_wavelength * 1e9);
    return 0;
  }

  std::fprintf(stderr, "unknown subcommand '%s'\n", cmd.c_str());
  return 64;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum pulse gate simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  if (const char* env = std::getenv("QPG_OUT_DIR")) out_dir = env;

  const char* names[] = {"decompose",  "scan-wavelength", "scan-bandwidth", "benchmark",
                         "efficiency", "compression",     "validate-config"};
  for (const char* n : names) {
    CLI::App* sub = app.add_subcommand(n);
    sub->add_option("--config", config_path, "path to the JSON scenario config");
    sub->add_option("--out", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (config_path.empty()) {
    std::fprintf(stderr, "usage: %s <subcommand> --config PATH [--out DIR]\n", argv[0]);
    return 64;
  }

  try {
    const ScenarioConfig cfg = load_config(config_path);
    validate_config(cfg);
    return run(app.get_subcommands().front()->get_name(), cfg, out_dir);
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
