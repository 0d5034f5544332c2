#include "pprx/rng.hpp"

namespace pprx {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run,
                          std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ run) ^ (stream * 0xd6e8feb86659fd93ULL));
}

}  // namespace pprx
