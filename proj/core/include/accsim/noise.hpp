#pragma once

#include <cstdint>

#include "accsim/types.hpp"

namespace accsim {

/// Counter-based Gaussian stream. Draws depend only on (seed, stream_id,
/// counter), so a vehicle's noise sequence is reproducible regardless of
/// how many other vehicles are in the platoon or in which order they are
/// stepped. Each next() consumes one counter slot.
class GaussianStream {
 public:
  GaussianStream() = default;
  GaussianStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Standard-normal draw scaled by stddev.
  double next(double stddev);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Adds zero-mean Gaussian noise with the given variance when enabled;
/// passthrough (stream untouched) when disabled.
double apply_measurement_noise(double true_value, double variance,
                               bool enabled, GaussianStream& stream);

}  // namespace accsim
