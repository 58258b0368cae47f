#include "dil/length_cc.hpp"

#include "dil/errors.hpp"
#include "dil/format.hpp"
#include "dil/lsq.hpp"
#include "dil/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dil {

LengthSample rescaled_length(const DilationStructure& S, const Vec& x, double eps, const PolylineCurve& c) {
  c.validate();
  const double r = S.domain_radius(x);
  PolylineCurve d = c;
  for (auto& p : d.samples) {
    if (std::isfinite(r) && S.dist(x, p) > r) throw OutOfDomain("rescaled_length: curve leaves U(x)");
    p = S.dil(x, eps, p);
  }
  return {eps, variation_length(d, S.dist_fn()) / eps};
}

HorizontalEndpoint integrate_horizontal(const CarnotGroup& G, const HorizontalControlCurve& hc) {
  HorizontalEndpoint r;
  const int n = hc.cells();
  Vec p = hc.base;
  r.trajectory.push_back(p);
  for (const auto& u : hc.controls) {
    if (u.size() != G.horizontal_dim()) throw MalformedInput("integrate_horizontal: control dimension mismatch");
    if (!u.allFinite()) throw MalformedInput("integrate_horizontal: control is not finite");
    p = G.multiply(p, G.from_horizontal(u / n));
    r.length += u.norm() / n;
    r.trajectory.push_back(p);
  }
  r.endpoint = p;
  return r;
}

namespace {

struct ControlProblem {
  const CarnotGroup& G;
  Vec target;
  int n;
  int m;

  Vec endpoint(const Vec& z) const {
    Vec p = Vec::Zero(G.dim());
    for (int k = 0; k < n; ++k) p = G.multiply(p, G.from_horizontal(z.segment(k * m, m) / n));
    return p;
  }
  double length(const Vec& z) const {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += z.segment(k * m, m).norm() / n;
    return s;
  }
};

// Penalty continuation then a min-norm Newton projection onto the endpoint constraint.
Vec solve_penalised(const ControlProblem& P, Vec z, double& mu, const CcOptions& opts,
                    std::vector<CcTraceRow>& trace) {
  const double sn = std::sqrt(static_cast<double>(P.n));
  LsqOptions lo;
  lo.max_iter = 100;
  lo.tol_residual = 0.0;
  lo.tol_step = 1e-14;
  auto err = [&](const Vec& w) { return (P.endpoint(w) - P.target).norm(); };
  for (int it = 0; it <= opts.max_doublings; ++it) {
    const double smu = std::sqrt(mu);
    ResidualFn f = [&](const Vec& w) {
      Vec r(w.size() + P.G.dim());
      r.head(w.size()) = w / sn;
      r.tail(P.G.dim()) = smu * (P.endpoint(w) - P.target);
      return r;
    };
    z = damped_least_squares(f, z, lo).x;
    const double e = err(z);
    trace.push_back({P.n, it, mu, P.length(z), e});
    if (e < opts.endpoint_tol * 0.1) break;
    mu *= 2.0;
  }
  ResidualFn g = [&](const Vec& w) { return Vec(P.endpoint(w) - P.target); };
  for (int it = 0; it < 20 && err(z) >= opts.endpoint_tol * 0.01; ++it) {
    const Mat J = fd_jacobian(g, z, 1e-7);
    z -= J.completeOrthogonalDecomposition().solve(g(z));
  }
  trace.push_back({P.n, -1, mu, P.length(z), err(z)});
  return z;
}

}  // namespace

CcResult cc_distance(const CarnotGroup& G, const Vec& x, const Vec& y, const CcOptions& opts) {
  if (opts.cells.empty()) throw MalformedInput("cc_distance: empty cell schedule");
  CcResult res;
  const Vec target = G.multiply(G.invert(x), y);
  const int m = G.horizontal_dim();
  res.witness.base = x;
  if (target.norm() == 0.0) {
    res.witness.controls.assign(opts.cells.front(), Vec::Zero(m));
    res.converged = true;
    return res;
  }
  const double scale = std::max(G.gauge_norm(target), 1e-3);
  int n = opts.cells.front();
  Vec best;
  double best_len = std::numeric_limits<double>::infinity(), best_err = best_len, best_mu = opts.mu0;
  for (int s = 0; s < std::max(1, opts.multistarts); ++s) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
    ControlProblem P{G, target, n, m};
    Vec z(n * m);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < m; ++i) z(k * m + i) = target(i) + scale * normal(rng);
    double mu = opts.mu0;
    z = solve_penalised(P, z, mu, opts, res.trace);
    const double e = (P.endpoint(z) - target).norm();
    const double len = P.length(z);
    const bool feas = e < opts.endpoint_tol, best_feas = best_err < opts.endpoint_tol;
    if ((feas && (!best_feas || len < best_len)) || (!feas && !best_feas && e < best_err)) {
      best = z;
      best_len = len;
      best_err = e;
      best_mu = mu;
    }
  }
  for (std::size_t lvl = 1; lvl < opts.cells.size(); ++lvl) {
    const int n2 = opts.cells[lvl];
    if (n2 % n != 0) throw MalformedInput("cc_distance: cell counts must refine each other");
    const int f = n2 / n;
    // duplicated controls sit on a saddle of the finer problem; nudge them off it
    Rng rng(derive_seed(opts.seed, 1000 + lvl));
    Vec z(n2 * m);
    for (int k = 0; k < n2; ++k) z.segment(k * m, m) = best.segment((k / f) * m, m);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += 1e-2 * scale * normal(rng);
    n = n2;
    ControlProblem P{G, target, n, m};
    best_mu = opts.mu0;
    best = solve_penalised(P, z, best_mu, opts, res.trace);
    best_len = P.length(best);
    best_err = (P.endpoint(best) - target).norm();
  }
  res.value = best_len;
  res.endpoint_error = best_err;
  res.converged = best_err < opts.endpoint_tol;
  if (!res.converged) res.failure = "optimizer stagnation: endpoint error " + fmt_double(best_err);
  for (int k = 0; k < n; ++k) res.witness.controls.push_back(best.segment(k * m, m));
  return res;
}

nlohmann::json to_json(const CcResult& r) {
  nlohmann::json ctrl = nlohmann::json::array();
  for (const auto& u : r.witness.controls) ctrl.push_back(vec_to_json(u));
  nlohmann::json j{{"value", r.value},
                   {"endpoint_error", r.endpoint_error},
                   {"converged", r.converged},
                   {"witness", {{"base", vec_to_json(r.witness.base)}, {"controls", ctrl}}}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

std::string trace_csv(const CcResult& r) {
  std::ostringstream os;
  os << "cells,iteration,penalty,length,endpoint_error\n";
  for (const auto& t : r.trace)
    os << t.cells << ',' << t.iteration << ',' << fmt_double(t.penalty) << ',' << fmt_double(t.length) << ','
       << fmt_double(t.endpoint_error) << '\n';
  return os.str();
}

LengthRepresentationReport length_representation_check(const DilationStructure& S, const PolylineCurve& c,
                                                        const LimitOptions& opts) {
  c.validate();
  LengthRepresentationReport r;
  r.variation = variation_length(c, S.dist_fn());
  const CurveFn f = [&](double t) { return c.at(t); };
  const auto tgrid = default_eps_grid();
  for (std::size_t i = 0; i + 1 < c.knots.size(); ++i) {
    const double h = c.knots[i + 1] - c.knots[i];
    const double tm = c.knots[i] + h / 2;
    std::vector<double> grid;
    for (int k = 0; k < 10; ++k) grid.push_back(h / 4 * std::ldexp(1.0, -k));
    const auto scan = derivative_and_rnp_scan(S, f, {tm}, grid, opts);
    if (!scan.samples.front().derivable) {
      r.applicable = false;
      r.reason = "curve is not derivable at t=" + fmt_double(tm);
      return r;
    }
    const Vec ct = c.at(tm);
    r.integral += h * tangent_distance_value(S, ct, ct, scan.samples.front().velocity, tgrid, opts);
  }
  r.applicable = true;
  r.gap = std::abs(r.variation - r.integral) / std::max(r.variation, 1e-300);
  return r;
}

TemperedReport tempered_check(const DistFn& d, const DilationStructure& background, const Vec& x,
                              const std::vector<Vec>& sample, const std::vector<double>& grid,
                              const LimitOptions& opts) {
  TemperedReport rep;
  struct Pair { Vec u, v; double dx; };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      const double dx = tangent_distance_value(background, x, sample[i], sample[j], grid, opts);
      if (dx > 0.0) pairs.push_back({sample[i], sample[j], dx});
    }
  if (pairs.empty()) throw MalformedInput("tempered_check: no pair of distinct sample points");
  rep.c_low = std::numeric_limits<double>::infinity();
  for (double e : grid) {
    TemperedRow row{e, std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& p : pairs) {
      const double q = d(background.dil(x, e, p.u), background.dil(x, e, p.v)) / e / p.dx;
      row.min_ratio = std::min(row.min_ratio, q);
      row.max_ratio = std::max(row.max_ratio, q);
    }
    rep.c_low = std::min(rep.c_low, row.min_ratio);
    rep.C_high = std::max(rep.C_high, row.max_ratio);
    rep.rows.push_back(row);
  }
  const double emin = *std::min_element(grid.begin(), grid.end());
  std::vector<double> le, lmin, lmax;
  for (const auto& row : rep.rows)
    if (row.eps <= 10.0 * emin && row.min_ratio > 0) {
      le.push_back(std::log(row.eps));
      lmin.push_back(std::log(row.min_ratio));
      lmax.push_back(std::log(row.max_ratio));
    }
  if (le.size() >= 2) {
    rep.slope_min = fit_line(le, lmin).slope;
    rep.slope_max = fit_line(le, lmax).slope;
  }
  std::vector<TemperedRow> sorted = rep.rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.eps < b.eps; });
  for (std::size_t i = 0; i < std::min<std::size_t>(2, sorted.size()); ++i)
    rep.phi = std::max(rep.phi, sorted[i].max_ratio);
  rep.pass = std::isfinite(rep.C_high) && rep.c_low > 0 && le.size() >= 2 && std::abs(rep.slope_min) < 0.1 &&
             std::abs(rep.slope_max) < 0.1;
  return rep;
}

nlohmann::json to_json(const TemperedReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) rows.push_back({{"eps", row.eps}, {"min", row.min_ratio}, {"max", row.max_ratio}});
  return {{"c_low", r.c_low}, {"C_high", r.C_high}, {"slope_min", r.slope_min}, {"slope_max", r.slope_max},
          {"phi", r.phi},     {"pass", r.pass},     {"rows", rows}};
}

namespace {

// Each cell gets a midpoint pushed off the chord by amp * (cell chord length) in the first two coordinates.
PolylineCurve zigzag(const PolylineCurve& c, double amp) {
  PolylineCurve z;
  for (std::size_t i = 0; i + 1 < c.knots.size(); ++i) {
    z.knots.push_back(c.knots[i]);
    z.samples.push_back(c.samples[i]);
    const Vec a = c.samples[i], b = c.samples[i + 1];
    Vec mid = 0.5 * (a + b);
    if (a.size() >= 2) {
      Vec nrm = Vec::Zero(a.size());
      nrm(0) = -(b(1) - a(1));
      nrm(1) = b(0) - a(0);
      mid += amp * (i % 2 == 0 ? 1.0 : -1.0) * nrm;
    }
    z.knots.push_back(0.5 * (c.knots[i] + c.knots[i + 1]));
    z.samples.push_back(mid);
  }
  z.knots.push_back(c.knots.back());
  z.samples.push_back(c.samples.back());
  return z;
}

}  // namespace

GammaReport gamma_diagnostic(const DilationStructure& S, const Vec& x, const std::vector<PolylineCurve>& curves,
                             const std::vector<double>& eps, const std::vector<double>& grid, double slack,
                             const LimitOptions& opts) {
  if (eps.size() < 2) throw MalformedInput("gamma_diagnostic: need at least two eps values");
  GammaReport rep;
  rep.pass = true;
  const auto d = S.dist_fn();
  for (const auto& c : curves) {
    GammaCurveReport cr;
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i)
      cr.limit += tangent_distance_value(S, x, c.samples[i], c.samples[i + 1], grid, opts);
    double tail_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eps.size(); ++k) {
      const double e = eps[k];
      const auto ls = rescaled_length(S, x, e, c);
      cr.eps.push_back(e);
      cr.values.push_back(ls.value);
      // parameterisation gauge: unit speed, then affine rescale onto [0, 1]
      PolylineCurve dc = c;
      for (auto& p : dc.samples) p = S.dil(x, e, p);
      const double ld = variation_length(dc, d);
      if (ld > 0) {
        PolylineCurve u = reparameterize_unit_speed(dc, d);
        double lip = 0.0;
        for (std::size_t i = 0; i + 1 < u.knots.size(); ++i) {
          const double dt = (u.knots[i + 1] - u.knots[i]) / ld;
          if (dt > 0) lip = std::max(lip, d(u.samples[i], u.samples[i + 1]) / dt);
        }
        cr.lip_ok = cr.lip_ok && lip <= 2.0 * ld * (1 + 1e-12);
      }
      if (k + 2 >= eps.size()) tail_min = std::min(tail_min, rescaled_length(S, x, e, zigzag(c, e)).value);
    }
    cr.recovery_gap = std::abs(cr.values.back() - cr.limit);
    cr.liminf_slack = std::max(0.0, cr.limit - tail_min);
    bool up = true, down = true, flat = true;
    for (std::size_t k = 0; k + 1 < cr.values.size(); ++k) {
      const double diff = cr.values[k + 1] - cr.values[k];
      const double tol = 1e-12 * (1.0 + std::abs(cr.values[k]));
      cr.max_step = std::max(cr.max_step, std::abs(diff));
      if (diff < -tol) up = false;
      if (diff > tol) down = false;
      if (std::abs(diff) > tol) flat = false;
    }
    cr.trend = flat ? 0 : up ? 1 : down ? -1 : 2;
    const double first_gap = std::abs(cr.values.front() - cr.limit);
    const bool recovers = cr.recovery_gap <= slack || (cr.trend != 2 && cr.recovery_gap <= first_gap);
    rep.pass = rep.pass && cr.liminf_slack <= slack && recovers && cr.lip_ok;
    rep.curves.push_back(std::move(cr));
  }
  return rep;
}

nlohmann::json to_json(const GammaReport& r) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : r.curves)
    cs.push_back({{"eps", c.eps},
                  {"values", c.values},
                  {"limit", c.limit},
                  {"recovery_gap", c.recovery_gap},
                  {"liminf_slack", c.liminf_slack},
                  {"trend", c.trend},
                  {"lip_ok", c.lip_ok}});
  return {{"curves", cs}, {"pass", r.pass}};
}

}  // namespace dil
