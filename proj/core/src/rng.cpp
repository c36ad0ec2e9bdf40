#include "substable/rng.hpp"

#include <cmath>

namespace substable {

namespace detail {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

StreamRng::StreamRng(RngSpec spec) {
  // Mix seed and stream through splitmix64 so nearby (seed, stream) pairs
  // land in unrelated engine states.
  const std::uint64_t mixed =
      detail::splitmix64(detail::splitmix64(spec.seed) ^
                         detail::splitmix64(spec.stream ^ 0xD1B54A32D192ED03ULL));
  engine_.seed(mixed);
}

double StreamRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double StreamRng::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double StreamRng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(angle);
  has_cached_normal_ = true;
  return r * std::cos(angle);
}

double StreamRng::exponential() {
  return -std::log(uniform_open());
}

}  // namespace substable
