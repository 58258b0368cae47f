#include "dil/errors.hpp"
#include "dil/spaces.hpp"

#include <cmath>
#include <limits>

namespace dil {

RiemannianExpSpace::RiemannianExpSpace(std::string name, int dim, TensorFn g, double chart_radius, OdeConfig cfg)
    : name_(std::move(name)), n_(dim), g_(std::move(g)), chart_radius_(chart_radius), cfg_(cfg) {
  // spot-check symmetry and positivity at the chart origin
  const Mat g0 = g_(Vec::Zero(n_));
  if (g0.rows() != n_ || g0.cols() != n_ || (g0 - g0.transpose()).norm() > 1e-12 ||
      Eigen::LLT<Mat>(g0).info() != Eigen::Success)
    throw ConstructionError("riemannian: metric tensor is not symmetric positive-definite at the origin");
}

RiemannianExpSpace::RiemannianExpSpace(std::string name, int dim, TensorFn g, double chart_radius)
    : RiemannianExpSpace(std::move(name), dim, std::move(g), chart_radius, OdeConfig{}) {}

std::shared_ptr<RiemannianExpSpace> RiemannianExpSpace::flat(int n) {
  return std::make_shared<RiemannianExpSpace>("riemannian:flat:" + std::to_string(n), n,
                                              [n](const Vec&) -> Mat { return Mat::Identity(n, n); },
                                              std::numeric_limits<double>::infinity());
}

std::shared_ptr<RiemannianExpSpace> RiemannianExpSpace::sphere() {
  return std::make_shared<RiemannianExpSpace>(
      "riemannian:sphere", 2,
      [](const Vec& p) -> Mat {
        const double lam = 2.0 / (1.0 + p.squaredNorm());
        return lam * lam * Mat::Identity(2, 2);
      },
      1.5);
}

std::vector<Mat> RiemannianExpSpace::christoffel(const Vec& x) const {
  const double h = cfg_.fd_step;
  std::vector<Mat> dg(n_);
  for (int l = 0; l < n_; ++l) {
    Vec e = Vec::Zero(n_);
    e(l) = h;
    dg[l] = (g_(x + e) - g_(x - e)) / (2 * h);
  }
  const Mat ginv = g_(x).inverse();
  std::vector<Mat> G(n_, Mat::Zero(n_, n_));
  for (int k = 0; k < n_; ++k)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        double s = 0.0;
        for (int l = 0; l < n_; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        G[k](i, j) = 0.5 * s;
      }
  return G;
}

double RiemannianExpSpace::vnorm(const Vec& x, const Vec& v) const { return std::sqrt(v.dot(g_(x) * v)); }

Vec RiemannianExpSpace::exp(const Vec& x, const Vec& v) const {
  const int steps = std::max(1, static_cast<int>(std::ceil(cfg_.steps_per_unit * vnorm(x, v))));
  const double h = 1.0 / steps;
  auto accel = [&](const Vec& p, const Vec& w) {
    const auto G = christoffel(p);
    Vec a(n_);
    for (int k = 0; k < n_; ++k) a(k) = -w.dot(G[k] * w);
    return a;
  };
  Vec p = x, w = v;
  for (int s = 0; s < steps; ++s) {
    const Vec k1p = w, k1w = accel(p, w);
    const Vec k2p = w + 0.5 * h * k1w, k2w = accel(p + 0.5 * h * k1p, k2p);
    const Vec k3p = w + 0.5 * h * k2w, k3w = accel(p + 0.5 * h * k2p, k3p);
    const Vec k4p = w + h * k3w, k4w = accel(p + h * k3p, k4p);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
  }
  return p;
}

Vec RiemannianExpSpace::log(const Vec& x, const Vec& y) const {
  if (x == y) return Vec::Zero(n_);
  Vec v = y - x;
  Vec F = exp(x, v) - y;
  double r = F.norm();
  for (int it = 0; it < cfg_.newton_iters && r > cfg_.newton_tol; ++it) {
    const double h = 1e-7 * std::max(1.0, v.norm());
    Mat J(n_, n_);
    for (int j = 0; j < n_; ++j) {
      Vec e = Vec::Zero(n_);
      e(j) = h;
      J.col(j) = (exp(x, v + e) - exp(x, v - e)) / (2 * h);
    }
    const Vec dv = J.fullPivLu().solve(-F);
    double alpha = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, alpha *= 0.5) {
      const Vec vt = v + alpha * dv;
      const Vec Ft = exp(x, vt) - y;
      if (Ft.norm() < r) {
        v = vt;
        F = Ft;
        r = Ft.norm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (r > 1e-10) throw NoLog("riemannian: shooting did not converge", r);
  return v;
}

double RiemannianExpSpace::dist(const Vec& x, const Vec& y) const {
  if (x == y) return 0.0;
  return vnorm(x, log(x, y));
}

Vec RiemannianExpSpace::dil(const Vec& x, double eps, const Vec& y) const {
  if (x == y) return y;
  const Vec v = log(x, y);
  // shooting is only trusted inside the chart
  if (eps * vnorm(x, v) > chart_radius_) throw OutOfDomain("riemannian: dilation leaves the chart radius");
  return exp(x, eps * v);
}

Vec riemann_exp(const RiemannianExpSpace& R, const Vec& x, const Vec& v) { return R.exp(x, v); }

Vec riemann_log(const RiemannianExpSpace& R, const Vec& x, const Vec& y) { return R.log(x, y); }

Vec riemann_dilate(const RiemannianExpSpace& R, const Vec& x, double eps, const Vec& y) {
  return R.dil(x, eps, y);
}

}  // namespace dil
