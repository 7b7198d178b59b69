#pragma once

#include <cstdint>
#include <random>

namespace tracelogdet {

// SplitMix64 finalizer; used to derive independent stream seeds from a
// (master seed, counter) pair.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t counter = 0) noexcept {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + counter);
}

using Rng = std::mt19937_64;

}  // namespace tracelogdet
