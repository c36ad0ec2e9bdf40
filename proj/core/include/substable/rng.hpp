#pragma once

#include <cstdint>
#include <random>

namespace substable {

/// Seed plus stream index. Identical (seed, stream) pairs reproduce the
/// same draw sequence; distinct streams are independent for practical
/// purposes, which makes parallel replication deterministic.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Deterministic random source. The engine is std::mt19937_64 (bit-exact
/// per the standard); all variates are derived from raw engine words
/// rather than std::*_distribution, whose output is implementation
/// defined.
class StreamRng {
public:
  explicit StreamRng(RngSpec spec);

  std::uint64_t raw() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01();
  /// Uniform on the open interval (0, 1); safe under log().
  double uniform_open();
  /// Standard normal via Box-Muller (pairs cached).
  double normal();
  /// Exponential with rate 1.
  double exponential();

private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

namespace detail {
std::uint64_t splitmix64(std::uint64_t x);
}

}  // namespace substable
