#pragma once

// Closed forms computed independently of the library code paths.

#include <Eigen/Dense>

#include <cmath>

namespace oracle {

using V = Eigen::VectorXd;

// Heisenberg law (x, y, z)(x', y', z') = (x + x', y + y', z + z' + (x y' - y x') / 2).
inline V heis_mul(const V& a, const V& b) {
  V r(3);
  r << a(0) + b(0), a(1) + b(1), a(2) + b(2) + 0.5 * (a(0) * b(1) - a(1) * b(0));
  return r;
}
inline V heis_inv(const V& a) { return -a; }

// Great-circle distance between stereographic chart points on the unit sphere.
inline double sphere_dist(const V& p, const V& q) {
  auto amb = [](const V& x) {
    const double s = x.squaredNorm();
    Eigen::Vector3d X(2 * x(0), 2 * x(1), 1 - s);
    return Eigen::Vector3d(X / (1 + s));
  };
  const double c = std::clamp(amb(p).dot(amb(q)), -1.0, 1.0);
  return std::acos(c);
}

}  // namespace oracle
