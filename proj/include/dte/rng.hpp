#pragma once

#include <cstdint>
#include <random>

namespace dte {

// splitmix64 finalizer; used to derive independent seed streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-replicate seed from (master seed, stream tag, replicate index).
// Execution order never enters, so results are thread-count independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t index) {
  return mix64(mix64(master ^ mix64(tag)) ^ index);
}

using Rng = std::mt19937_64;

}  // namespace dte
