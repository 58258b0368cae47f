#include "dil/random.hpp"

#include <cmath>

namespace dil {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double normal(Rng& rng) {
  // Box-Muller, one variate per call keeps the stream layout simple
  double u1 = uniform(rng, 0.0, 1.0);
  while (u1 <= 0.0) u1 = uniform(rng, 0.0, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec uniform_box(Rng& rng, const Vec& center, double r) {
  Vec p(center.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = center(i) + uniform(rng, -r, r);
  return p;
}

Vec uniform_ball(Rng& rng, const Vec& center, double r) {
  const auto n = center.size();
  for (;;) {
    Vec d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = uniform(rng, -1.0, 1.0);
    if (d.squaredNorm() <= 1.0) return center + r * d;
  }
}

}  // namespace dil
