#pragma once

#include <cstdint>
#include <limits>

namespace pprx {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed for an independent stream keyed by (master, run, stream).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run,
                          std::uint64_t stream) noexcept;

// SplitMix64 sequence. Streams are short (one draw per epoch) and there is one
// per agent per run, so seeding has to be free. Output is fixed bit for bit.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    const std::uint64_t out = splitmix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace pprx
