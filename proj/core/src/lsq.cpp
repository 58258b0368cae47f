#include "dil/lsq.hpp"

#include <cmath>

namespace dil {

Mat fd_jacobian(const ResidualFn& f, const Vec& x, double h) {
  const Vec f0 = f(x);
  Mat J(f0.size(), x.size());
  Vec xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double hj = h * std::max(1.0, std::abs(x(j)));
    xp(j) = x(j) + hj;
    const Vec fp = f(xp);
    xp(j) = x(j) - hj;
    const Vec fm = f(xp);
    xp(j) = x(j);
    J.col(j) = (fp - fm) / (2 * hj);
  }
  return J;
}

LsqResult damped_least_squares(const ResidualFn& f, Vec x0, const LsqOptions& opts, const JacobianFn& jac) {
  LsqResult res;
  res.x = std::move(x0);
  res.r = f(res.x);
  res.norm = res.r.norm();
  double lambda = opts.lambda0;
  for (res.iters = 0; res.iters < opts.max_iter; ++res.iters) {
    if (res.norm < opts.tol_residual) {
      res.converged = true;
      break;
    }
    const Mat J = jac ? jac(res.x) : fd_jacobian(f, res.x, opts.fd_step);
    const Mat JtJ = J.transpose() * J;
    const Vec g = J.transpose() * res.r;
    bool accepted = false;
    for (int k = 0; k < 40 && !accepted; ++k) {
      Mat A = JtJ;
      A.diagonal().array() += lambda;
      const Vec dx = A.ldlt().solve(-g);
      const Vec xt = res.x + dx;
      const Vec rt = f(xt);
      const double nt = rt.norm();
      if (std::isfinite(nt) && nt < res.norm) {
        const bool tiny = dx.norm() <= opts.tol_step * (1.0 + res.x.norm());
        res.x = xt;
        res.r = rt;
        res.norm = nt;
        lambda = std::max(lambda / 3.0, 1e-15);
        accepted = true;
        if (tiny) {
          res.converged = res.norm < opts.tol_residual;
          return res;
        }
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) break;
  }
  res.converged = res.norm < opts.tol_residual;
  return res;
}

}  // namespace dil
