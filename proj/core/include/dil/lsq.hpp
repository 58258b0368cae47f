#pragma once

#include "dil/types.hpp"

#include <functional>

namespace dil {

using ResidualFn = std::function<Vec(const Vec&)>;
using JacobianFn = std::function<Mat(const Vec&)>;

struct LsqOptions {
  int max_iter = 200;
  /// stop once |r| falls below this
  double tol_residual = 1e-14;
  double tol_step = 1e-15;
  double lambda0 = 1e-3;
  double fd_step = 1e-7;
};

struct LsqResult {
  Vec x;
  Vec r;
  double norm = 0.0;
  int iters = 0;
  bool converged = false;
};

/// Central differences.
Mat fd_jacobian(const ResidualFn& f, const Vec& x, double h);

/// Levenberg-Marquardt with identity damping; handles under-determined systems.
LsqResult damped_least_squares(const ResidualFn& f, Vec x0, const LsqOptions& opts = {},
                               const JacobianFn& jac = {});

}  // namespace dil
