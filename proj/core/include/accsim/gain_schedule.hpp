#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace accsim {

/// Speed-indexed gain: either a constant or a piecewise-linear breakpoint
/// table over ego speed. Outside the table range the gain is held flat.
class GainSchedule {
 public:
  GainSchedule() = default;
  GainSchedule(double constant) : points_{{0.0, constant}} {}  // NOLINT: implicit by design
  explicit GainSchedule(std::vector<std::pair<double, double>> breakpoints)
      : points_(std::move(breakpoints)) {
    if (points_.empty()) {
      throw std::invalid_argument("gain schedule needs at least one breakpoint");
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (points_[i].first <= points_[i - 1].first) {
        throw std::invalid_argument("gain schedule breakpoints must have strictly increasing speeds");
      }
    }
  }

  double operator()(double speed) const {
    if (speed <= points_.front().first) return points_.front().second;
    if (speed >= points_.back().first) return points_.back().second;
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (speed <= points_[i].first) {
        const auto& [x0, y0] = points_[i - 1];
        const auto& [x1, y1] = points_[i];
        const double w = (speed - x0) / (x1 - x0);
        return y0 + w * (y1 - y0);
      }
    }
    return points_.back().second;  // unreachable
  }

  bool is_constant() const { return points_.size() == 1; }

  double min_value() const {
    double m = points_.front().second;
    for (const auto& p : points_) m = std::min(m, p.second);
    return m;
  }
  double max_value() const {
    double m = points_.front().second;
    for (const auto& p : points_) m = std::max(m, p.second);
    return m;
  }

  const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

  friend bool operator==(const GainSchedule& a, const GainSchedule& b) {
    return a.points_ == b.points_;
  }

 private:
  std::vector<std::pair<double, double>> points_{{0.0, 0.0}};
};

}  // namespace accsim
