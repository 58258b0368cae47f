#pragma once

#include "dil/types.hpp"

#include <cstdint>
#include <random>

namespace dil {

using Rng = std::mt19937_64;

/// Independent stream seed for sub-task `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform in [lo, hi); platform independent, unlike std::uniform_real_distribution.
double uniform(Rng& rng, double lo, double hi);

double normal(Rng& rng);

/// Uniform in the box [-r, r]^n around `center`.
Vec uniform_box(Rng& rng, const Vec& center, double r);

/// Uniform in the Euclidean ball of radius r around `center`.
Vec uniform_ball(Rng& rng, const Vec& center, double r);

}  // namespace dil
