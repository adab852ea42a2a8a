#pragma once

#include <cstdint>

namespace beltrami {

/// Counter-based random numbers: every draw is a pure function of
/// (seed, counter), so parallel or reordered draws give identical values.
std::uint64_t mix64(std::uint64_t x);

/// Uniform in the open interval (0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Standard normal draw number `index` of stream `seed` (Box-Muller on two
/// uniforms at counters 2*index and 2*index+1).
double counter_normal(std::uint64_t seed, std::uint64_t index);

}  // namespace beltrami
