#include "accsim/noise.hpp"

#include <cmath>
#include <numbers>

namespace accsim {
namespace {

// splitmix64 finalizer; good avalanche, cheap, stateless.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Map 64 random bits to (0, 1]; never returns 0 so log() is safe.
double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(mix64(seed) ^ mix64(stream_id * 0xda942042e4dd58b5ULL + 1))) {}

double GaussianStream::next(double stddev) {
  const std::uint64_t c = counter_++;
  const double u1 = to_unit_open(mix64(key_ ^ mix64(2 * c)));
  const double u2 = to_unit_open(mix64(key_ ^ mix64(2 * c + 1)));
  // Box-Muller, one output per counter slot.
  const double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
  return stddev * z;
}

double apply_measurement_noise(double true_value, double variance,
                               bool enabled, GaussianStream& stream) {
  if (!enabled || variance <= 0.0) return true_value;
  return true_value + stream.next(std::sqrt(variance));
}

}  // namespace accsim
