#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace qpg {

// Uniform grid of angular frequencies covering [center - span/2, center + span/2].
class FrequencyGrid {
 public:
  FrequencyGrid() = default;

  FrequencyGrid(double center, double span, int n_points)
      : center_(center), span_(span), n_points_(n_points) {
    if (n_points < 2) throw std::invalid_argument("FrequencyGrid needs at least 2 points");
    if (!(span > 0)) throw std::invalid_argument("FrequencyGrid span must be positive");
    samples_ = Eigen::ArrayXd::LinSpaced(n_points, center - span / 2.0, center + span / 2.0);
  }

  double center() const { return center_; }
  double span() const { return span_; }
  int n_points() const { return n_points_; }
  double spacing() const { return span_ / (n_points_ - 1); }
  const Eigen::ArrayXd& samples() const { return samples_; }
  double operator[](int i) const { return samples_[i]; }

  double min() const { return samples_[0]; }
  double max() const { return samples_[n_points_ - 1]; }

  bool contains(double omega) const { return omega >= min() && omega <= max(); }

  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
    return a.center_ == b.center_ && a.span_ == b.span_ && a.n_points_ == b.n_points_;
  }

 private:
  double center_ = 0;
  double span_ = 0;
  int n_points_ = 0;
  Eigen::ArrayXd samples_;
};

}  // namespace qpg
