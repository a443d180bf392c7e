#pragma once

#include <stdexcept>
#include <string>

namespace qpg {

struct grid_mismatch_error : std::invalid_argument {
  explicit grid_mismatch_error(const std::string& what) : std::invalid_argument(what) {}
};

struct coverage_error : std::runtime_error {
  explicit coverage_error(const std::string& what) : std::runtime_error(what) {}
};

struct calibration_error : std::runtime_error {
  explicit calibration_error(const std::string& what) : std::runtime_error(what) {}
};

struct convergence_error : std::runtime_error {
  explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

struct unitarity_error : std::runtime_error {
  explicit unitarity_error(const std::string& what) : std::runtime_error(what) {}
};

struct fit_error : std::runtime_error {
  explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct signal_too_weak_error : std::runtime_error {
  explicit signal_too_weak_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpg
