#pragma once

#include <cstdint>
#include <random>

namespace jk {

// All randomness derives from a user seed plus a stream id, so independent
// consumers (data generation, holdout, solvers, embeddings) never share a
// sequence. make_stream(seed, id) mixes both through splitmix64.
enum class Stream : std::uint64_t {
  data = 1,
  holdout = 2,
  solver = 3,
  rademacher = 4,
  embedding = 5,
  literals = 6,
  noise = 7,
  oracle = 8,
};

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t substream = 0) noexcept;

/// Uniform double in [0, 1) from the top 53 bits.
double uniform01(Rng& rng) noexcept;

/// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) noexcept;

/// +1 or -1 with equal probability.
double rademacher_sign(Rng& rng) noexcept;

}  // namespace jk
