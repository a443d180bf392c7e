#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpg/config.hpp"
#include "qpg/errors.hpp"
#include "qpg/lab.hpp"
#include "qpg/schmidt.hpp"

namespace qpg {

namespace detail {

inline std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);  // binary: identical bytes on every platform
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace detail

// CSV with '#'-prefixed header rows (units, config hash), then one row per scan
// point: abscissa, intensity. 9 significant digits, deterministic.
inline void write_scan_csv(const ScanResult& result, const std::string& path,
                           const std::string& config_hash) {
  auto f = detail::open_output(path);
  f << "# config_hash: " << config_hash << "\n";
  f << "# abscissa: " << result.abscissa_label << "\n";
  f << "# readout: " << (result.readout == Readout::modulus ? "modulus" : "modulus_squared")
    << "\n";
  if (!result.normalization.empty()) f << "# normalization: " << result.normalization << "\n";
  f << "# columns: abscissa,intensity\n";
  for (std::size_t i = 0; i < result.abscissa.size(); ++i)
    f << detail::format_g9(result.abscissa[i]) << ',' << detail::format_g9(result.intensities[i])
      << "\n";
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

// Companion file: per-point converted spectra, one column per scan point.
inline void write_scan_spectra_csv(const ScanResult& result, const std::string& path,
                                   const std::string& config_hash) {
  auto f = detail::open_output(path);
  f << "# config_hash: " << config_hash << "\n";
  f << "# columns: omega[rad/s]";
  for (std::size_t i = 0; i < result.abscissa.size(); ++i)
    f << ",point" << i;
  f << "\n";
  for (int r = 0; r < result.spectrum_grid.n_points(); ++r) {
    f << detail::format_g9(result.spectrum_grid[r]);
    for (const auto& sp : result.spectra) f << ',' << detail::format_g9(sp[r]);
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

// Round-trip reader for scan CSVs (headers skipped).
inline ScanResult read_scan_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  ScanResult res;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') {
      const std::string key = "# abscissa: ";
      if (line.rfind(key, 0) == 0) res.abscissa_label = line.substr(key.size());
      continue;
    }
    std::istringstream is(line);
    double a = 0, v = 0;
    char comma = 0;
    if (!(is >> a >> comma >> v)) throw std::runtime_error("malformed row in '" + path + "'");
    res.abscissa.push_back(a);
    res.intensities.push_back(v);
  }
  return res;
}

// Mode decomposition as CSV rows (n, theta_n, eta_n), theta descending.
inline void write_decomposition_csv(const SchmidtDecomposition& dec, const std::string& path,
                                    const std::string& config_hash) {
  auto f = detail::open_output(path);
  f << "# config_hash: " << config_hash << "\n";
  f << "# columns: n,theta_n[rad],eta_n\n";
  for (std::size_t n = 0; n < dec.angles.size(); ++n)
    f << n << ',' << detail::format_g9(dec.angles[n]) << ','
      << detail::format_g9(dec.efficiencies[n]) << "\n";
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

// Green matrix export: CSV (row-major, grid metadata in the header) or raw binary
// (two doubles per element, row-major, after a small text header line).
inline void write_green_csv(const GreenPair& g, const std::string& path,
                            const std::string& config_hash) {
  auto f = detail::open_output(path);
  f << "# config_hash: " << config_hash << "\n";
  f << "# in_grid: center=" << detail::format_g9(g.in_grid.center())
    << " span=" << detail::format_g9(g.in_grid.span()) << " n=" << g.in_grid.n_points() << "\n";
  f << "# out_grid: center=" << detail::format_g9(g.out_grid.center())
    << " span=" << detail::format_g9(g.out_grid.span()) << " n=" << g.out_grid.n_points()
    << "\n";
  f << "# columns: row-major g_c, re,im pairs\n";
  for (int r = 0; r < g.g_c.rows(); ++r) {
    for (int c = 0; c < g.g_c.cols(); ++c) {
      if (c) f << ',';
      f << detail::format_g9(g.g_c(r, c).real()) << ',' << detail::format_g9(g.g_c(r, c).imag());
    }
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

inline void write_green_binary(const GreenPair& g, const std::string& path) {
  auto f = detail::open_output(path);
  f << "qpg-green " << g.g_c.rows() << ' ' << g.g_c.cols() << "\n";
  for (int r = 0; r < g.g_c.rows(); ++r)
    for (int c = 0; c < g.g_c.cols(); ++c) {
      const double re = g.g_c(r, c).real(), im = g.g_c(r, c).imag();
      f.write(reinterpret_cast<const char*>(&re), sizeof re);
      f.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

inline void write_summary_json(const nlohmann::json& summary, const std::string& path) {
  auto f = detail::open_output(path);
  f << summary.dump(2) << "\n";
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace qpg
