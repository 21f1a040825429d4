#include "rosq/rng.hpp"

#include <cmath>

namespace rosq {

namespace {

__extension__ using u128 = unsigned __int128;

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  return std::seed_seq{lo(seed),   hi(seed),  lo(stream),
                       hi(stream), lo(index), hi(index)};
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto seq = make_seed_seq(seed, stream, index);
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  auto x = engine_();
  auto m = static_cast<u128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = engine_();
      m = static_cast<u128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::exponential() { return -std::log(uniform_open()); }

}  // namespace rosq
