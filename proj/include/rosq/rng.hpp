#pragma once

#include <cstdint>
#include <random>

namespace rosq {

/// Substream identifiers. Each simulation draws arrivals, services and
/// discipline choices from separate generators so that runs under different
/// disciplines share arrival and service paths.
enum class Stream : std::uint64_t {
  Arrivals = 1,
  Services = 2,
  Discipline = 3,
  Replication = 4,
  Sampler = 5,
};

/// mt19937_64 with hand-written conversions to uniforms. The standard
/// distribution adaptors are implementation-defined, so they are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0,
               std::uint64_t index = 0);
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
      : Rng(seed, static_cast<std::uint64_t>(stream), index) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open() { return 1.0 - uniform(); }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Unit-mean exponential.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

}  // namespace rosq
