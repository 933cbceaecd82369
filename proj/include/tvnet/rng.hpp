#pragma once

#include <cstdint>
#include <random>

namespace tvnet {

using Rng = std::mt19937_64;

// Mixes (seed, a, b) into a 64-bit stream seed with the splitmix64
// finalizer. Distinct tuples give statistically independent streams.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

// Independent generator for (node, round); per-node streams make results
// independent of evaluation order.
inline Rng make_stream(std::uint64_t seed, std::uint64_t node, std::uint64_t round) {
  return Rng(stream_seed(seed, node, round));
}

}  // namespace tvnet
