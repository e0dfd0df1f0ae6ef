#pragma once

#include <cstdint>
#include <random>

namespace convexmoments {

/// Engine used for every stochastic computation. mt19937_64 output is fixed by
/// the standard, so sub-streams are reproducible across platforms.
using Engine = std::mt19937_64;

/// One step of the SplitMix64 output function.
std::uint64_t splitmix64(std::uint64_t x);

/// Sub-seed for stream `index` of a master seed. Distinct indices give
/// decorrelated engines; the mapping is a pure function of its inputs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Uniform double in the open interval (0, 1).
double uniform_open(Engine& engine);

}  // namespace convexmoments
