#include "dil/coherent.hpp"

#include "dil/errors.hpp"
#include "dil/format.hpp"
#include "dil/lsq.hpp"
#include "dil/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dil {

CoherentProjection::CoherentProjection(CarnotGroup G) : G_(std::move(G)) {
  if (G_.step() > 2) throw Unsupported("coherent projection: only step 1 and 2 groups are supported");
  background_ = std::make_shared<Euclidean>(G_.dim());
  induced_ = std::make_shared<CarnotSpace>(G_, "induced");
}

Vec CoherentProjection::q(const Vec& x, double eps, const Vec& u) const {
  if (G_.step() == 1) return u;
  Vec a = G_.multiply(G_.invert(x), u);
  a.tail(G_.dim() - G_.horizontal_dim()) *= eps;
  return G_.multiply(x, a);
}

Vec CoherentProjection::q_limit(const Vec& x, const Vec& u) const {
  return G_.multiply(x, G_.horizontal(G_.multiply(G_.invert(x), u)));
}

Vec CoherentProjection::theta(const Vec& x, double eps, const Vec& u, const Vec& v) const {
  const Vec y = dil(x, eps, u);
  return bar_dil(x, 1.0 / eps, q(y, 1.0 / eps, dil(x, eps, v)));
}

ConvergenceReport CoherentProjection::theta_limit(const Vec& x, const Vec& u, const Vec& v,
                                                  const std::vector<double>& grid, const LimitOptions& opts) const {
  return extract_limit([&](double e) { return theta(x, e, u, v); }, grid, opts);
}

double CoherenceResiduals::max() const {
  return std::max({q_identity, q_fixes_base, semigroup, commutation, induced_commutation, theta_split});
}

CoherenceResiduals coherence_residuals(const CoherentProjection& P, const Vec& x, double eps, double mu,
                                       const Vec& u, const Vec& v) {
  CoherenceResiduals r;
  r.q_identity = (P.q(x, 1.0, u) - u).norm();
  r.q_fixes_base = (P.q(x, eps, x) - x).norm();
  r.semigroup = (P.q(x, eps, P.q(x, mu, u)) - P.q(x, eps * mu, u)).norm();
  r.commutation = (P.q(x, eps, P.bar_dil(x, mu, u)) - P.bar_dil(x, mu, P.q(x, eps, u))).norm();
  r.induced_commutation = (P.dil(x, eps, P.bar_dil(x, mu, u)) - P.bar_dil(x, mu, P.dil(x, eps, u))).norm();
  const Vec rhs = approx_sum(*P.background(), x, eps, P.q(x, eps, u), approx_difference(*P.induced(), x, eps, u, v));
  r.theta_split = (P.theta(x, eps, u, v) - rhs).norm();
  return r;
}

LimitRelationReport limit_relations(const CoherentProjection& P, const Vec& x, const Vec& u, const Vec& v,
                                    const std::vector<double>& grid, const LimitOptions& opts) {
  LimitRelationReport r;
  bool ok = true;
  auto take = [&](const ConvergenceReport& c) {
    ok = ok && c.cauchy_ok;
    return c.limit;
  };
  auto Qx = [&](const Vec& w) { return take(extract_limit([&](double e) { return P.q(x, e, w); }, grid, opts)); };
  const Vec qu = Qx(u), qv = Qx(v);
  r.idempotence = (Qx(qu) - qu).norm();
  const Vec delta = take(limit_difference(*P.induced(), x, u, v, grid, opts));
  const Vec th = take(P.theta_limit(x, u, v, grid, opts));
  r.reconstruction = (delta - take(limit_difference(*P.background(), x, qu, th, grid, opts))).norm();
  r.projection_morphism = (Qx(delta) - take(limit_difference(*P.background(), x, qu, qv, grid, opts))).norm();
  r.cauchy_ok = ok;
  return r;
}

std::vector<Vec> psi_word(const CoherentProjection& P, const WordProgram& prog) {
  if (!(prog.eps > 0.0 && prog.eps <= 1.0)) throw MalformedInput("psi_word: eps must lie in (0, 1]");
  if (!prog.weights.empty() && prog.weights.size() < prog.letters.size())
    throw MalformedInput("psi_word: fewer weights than letters");
  const Vec& x = prog.x;
  const double e = prog.eps;
  std::vector<Vec> traj{x};
  for (std::size_t k = 0; k < prog.letters.size(); ++k) {
    const Vec& q = prog.letters[k];
    const Vec& psi = traj.back();
    const double r = P.bar_dist(P.bar_dil(x, e, q), P.bar_dil(x, e, psi)) / e;
    if (r > prog.rho) {
      std::ostringstream os;
      os << "psi_word: letter " << k + 1 << " lies outside the nesting radius (" << r << " > " << prog.rho << ")";
      throw NestingError(os.str(), static_cast<int>(k + 1));
    }
    const Vec y = P.dil(x, e, psi);
    const Vec z = P.dil(x, e, q);
    const Vec w = prog.weights.empty() ? P.q_limit(y, z) : P.q(y, prog.weights[k], z);
    traj.push_back(P.dil(x, 1.0 / e, w));
  }
  return traj;
}

double fit_nesting_radius(const CoherentProjection& P, const Vec& x, double eps, int N, double domain,
                          std::uint64_t seed, int words) {
  const int n = P.group().dim();
  auto resc = [&](const Vec& a, const Vec& b) { return P.bar_dist(P.bar_dil(x, eps, a), P.bar_dil(x, eps, b)) / eps; };
  auto fits = [&](double rho) {
    Rng rng(seed);
    for (int w = 0; w < words; ++w) {
      WordProgram prog{x, eps, {}, {}, std::numeric_limits<double>::infinity()};
      Vec psi = x;
      for (int k = 0; k < N; ++k) {
        Vec d(n);
        for (int i = 0; i < n; ++i) d(i) = normal(rng);
        Vec q = psi + rho * d / std::max(d.norm(), 1e-300);
        if (resc(q, x) > domain) return false;
        prog.letters.push_back(q);
        psi = psi_word(P, prog).back();
        if (resc(psi, x) > domain) return false;
      }
    }
    return true;
  };
  double lo = 0.0, hi = domain;
  if (fits(hi)) return hi;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

namespace {

bool is_heisenberg_like(const CarnotGroup& G) {
  return G.dims() == std::vector<int>{2, 1} && G.brackets().size() == 1;
}

Vec moves_product(const CarnotGroup& G, const Vec& h, int N) {
  const int m = G.horizontal_dim();
  Vec p = Vec::Zero(G.dim());
  for (int k = 0; k < N; ++k) p = G.multiply(p, G.from_horizontal(h.segment(k * m, m)));
  return p;
}

}  // namespace

ChowSolution chow_connect(const CoherentProjection& P, const Vec& x, const Vec& z, double eps,
                          const ChowOptions& opts) {
  const CarnotGroup& G = P.group();
  const int m = G.horizontal_dim();
  const int N = opts.N;
  if (N < 1) throw MalformedInput("chow_connect: N must be positive");
  ChowSolution sol;
  const Vec T = G.multiply(G.invert(x), z);
  Vec h = Vec::Zero(N * m);
  const Vec p = T.head(m);
  if (G.step() == 1) {
    h.head(m) = p;
  } else if (is_heisenberg_like(G) && N >= 4) {
    // one planar move, then a closed equilateral triangle of signed area c
    const auto& b = G.brackets().front();
    const double c0 = b.c * (b.i < b.j ? 1.0 : -1.0);
    const double c = G.multiply(G.invert(G.from_horizontal(p)), T)(2);
    h.head(m) = p;
    if (c != 0.0) {
      const double s = std::sqrt(4.0 * std::abs(c) / (std::sqrt(3.0) * std::abs(c0)));
      const double sg = (c / c0) > 0 ? 1.0 : -1.0;
      Vec a(2), bb(2);
      a << s, 0.0;
      bb << -0.5 * s, sg * std::sqrt(3.0) / 2.0 * s;
      h.segment(m, m) = a;
      h.segment(2 * m, m) = bb;
      h.segment(3 * m, m) = -a - bb;
    }
  } else {
    Rng rng(opts.seed);
    h.head(m) = p;
    const double sc = std::sqrt(std::max(G.gauge_norm(T), 1e-6));
    for (int i = m; i < N * m; ++i) h(i) = sc * normal(rng);
  }
  if ((moves_product(G, h, N) - T).norm() > 1e-13) {
    LsqOptions lo;
    lo.tol_residual = 1e-14;
    h = damped_least_squares([&](const Vec& w) { return Vec(moves_product(G, w, N) - T); }, h, lo).x;
  }
  WordProgram prog{x, eps, {}, {}, opts.rho};
  Vec psi = x;
  for (int k = 0; k < N; ++k) {
    const Vec hk = h.segment(k * m, m);
    if (hk.norm() > 0) ++sol.N_used;
    psi = G.multiply(psi, G.from_horizontal(hk));
    sol.letters.push_back(psi);
  }
  prog.letters = sol.letters;
  try {
    sol.trajectory = psi_word(P, prog);
  } catch (const NestingError& e) {
    sol.failure = e.what();
    return sol;
  }
  sol.endpoint_error = (sol.trajectory.back() - z).norm();
  for (std::size_t k = 0; k + 1 < sol.trajectory.size(); ++k)
    sol.segment_lengths.push_back(P.bar_dist(sol.trajectory[k], sol.trajectory[k + 1]));
  sol.eta = P.bar_dist(x, z);
  if (sol.eta > 0)
    sol.f_ratio = *std::max_element(sol.segment_lengths.begin(), sol.segment_lengths.end()) / std::sqrt(sol.eta);
  sol.ok = sol.endpoint_error < opts.tol;
  if (!sol.ok) sol.failure = "solver stagnation: endpoint error " + fmt_double(sol.endpoint_error);
  return sol;
}

FConstantReport estimate_f_constant(const CoherentProjection& P, const Vec& x, double gauge_radius,
                                    const std::vector<std::pair<double, double>>& decades, int targets,
                                    std::uint64_t seed, const ChowOptions& opts) {
  const CarnotGroup& G = P.group();
  const int n = G.dim();
  FConstantReport rep;
  auto eta_of = [&](const Vec& t) { return P.bar_dist(x, G.multiply(x, t)); };
  for (std::size_t di = 0; di < decades.size(); ++di) {
    const auto [lo, hi] = decades[di];
    FDecade D{lo, hi, 0.0, 0, 0.0, true};
    Rng rng(derive_seed(seed, di));
    Vec best_t;
    auto admissible = [&](const Vec& t) {
      const double e = eta_of(t);
      return e >= lo && e <= hi && G.gauge_norm(t) <= gauge_radius;
    };
    auto ratio = [&](const Vec& t) {
      const auto s = chow_connect(P, x, G.multiply(x, t), 1.0, opts);
      D.max_error = std::max(D.max_error, s.endpoint_error);
      D.all_ok = D.all_ok && s.ok;
      return s.f_ratio;
    };
    for (int attempt = 0; D.targets < targets && attempt < 50 * targets; ++attempt) {
      const Vec t0 = uniform_box(rng, Vec::Zero(n), 1.0);
      const double want = lo * std::pow(hi / lo, uniform(rng, 0.0, 1.0));
      double a = -40.0, b = 40.0;  // log lambda
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        (eta_of(G.dilate(std::exp(mid), t0)) < want ? a : b) = mid;
      }
      const Vec t = G.dilate(std::exp(0.5 * (a + b)), t0);
      if (!admissible(t)) continue;
      ++D.targets;
      const double r = ratio(t);
      if (r > D.C) {
        D.C = r;
        best_t = t;
      }
    }
    if (best_t.size()) {
      // compass search for the sup inside the decade
      double step = 0.25 * best_t.norm();
      for (int evals = 0; evals < 400 && step > 1e-4 * best_t.norm();) {
        bool improved = false;
        for (int i = 0; i < n && !improved; ++i)
          for (double sg : {1.0, -1.0}) {
            Vec t = best_t;
            t(i) += sg * step;
            if (!admissible(t)) continue;
            ++evals;
            const double r = ratio(t);
            if (r > D.C) {
              D.C = r;
              best_t = t;
              improved = true;
              break;
            }
          }
        if (!improved) step *= 0.5;
      }
    }
    rep.decades.push_back(D);
  }
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (const auto& d : rep.decades) {
    cmin = std::min(cmin, d.C);
    cmax = std::max(cmax, d.C);
  }
  rep.spread = cmin > 0 ? cmax / cmin - 1.0 : std::numeric_limits<double>::infinity();
  rep.stable = rep.decades.size() >= 2 && rep.spread <= 0.2;
  return rep;
}

ShortCurveReport short_curve_and_condB(const CoherentProjection& P, const ChowSolution& sol,
                                       const std::vector<double>& a_values) {
  ShortCurveReport rep;
  rep.a_values = a_values;
  for (std::size_t k = 0; k < sol.trajectory.size(); ++k) {
    rep.curve.knots.push_back(static_cast<double>(k));
    rep.curve.samples.push_back(sol.trajectory[k]);
  }
  for (std::size_t k = 0; k < sol.letters.size(); ++k) {
    const Vec& y = sol.trajectory[k];
    const Vec target = P.q_limit(y, sol.letters[k]);
    std::vector<double> row;
    for (double a : a_values) {
      const double chord = P.bar_dist(y, P.bar_dil(y, a, target));
      if (chord <= 0.0) {
        row.push_back(1.0);
        continue;
      }
      double len = 0.0;
      Vec prev = y;
      for (int j = 1; j <= 32; ++j) {
        const Vec cur = P.bar_dil(y, a * j / 32.0, target);
        len += P.bar_dist(prev, cur);
        prev = cur;
      }
      row.push_back(len / chord);
      rep.max_deviation = std::max(rep.max_deviation, std::abs(len / chord - 1.0));
    }
    rep.ratios.push_back(std::move(row));
  }
  rep.pass = rep.max_deviation <= 1e-6;
  return rep;
}

ConditionAReport condition_A(const CoherentProjection& P, const Vec& x, const std::vector<Vec>& sample,
                             const std::vector<double>& grid) {
  ConditionAReport rep;
  bool finite = true;
  for (double e : grid) {
    double L = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i)
      for (std::size_t j = i + 1; j < sample.size(); ++j) {
        const double d = P.bar_dist(sample[i], sample[j]);
        if (d <= 0) continue;
        L = std::max(L, P.bar_dist(P.dil(x, e, sample[i]), P.dil(x, e, sample[j])) / e / d);
      }
    finite = finite && std::isfinite(L);
    rep.eps.push_back(e);
    rep.L.push_back(L);
    rep.L_max = std::max(rep.L_max, L);
  }
  const double emin = *std::min_element(grid.begin(), grid.end());
  std::vector<double> le, ll;
  for (std::size_t k = 0; k < rep.eps.size(); ++k)
    if (rep.eps[k] <= 10 * emin && rep.L[k] > 0) {
      le.push_back(std::log(rep.eps[k]));
      ll.push_back(std::log(rep.L[k]));
    }
  rep.pass = finite && le.size() >= 2 && std::abs(fit_line(le, ll).slope) < 0.1;
  return rep;
}

RingTangentOps::RingTangentOps(const CoherentProjection& P, Vec x, std::vector<double> grid, LimitOptions opts)
    : P_(P), x_(x), model_(P.induced(), std::move(x), std::move(grid), std::move(opts)) {}

Vec RingTangentOps::ring_dil(const Vec& u, double mu, const Vec& v) const {
  return model_.sum(u, P_.induced()->dil(x_, mu, model_.difference(u, v)));
}

Vec RingTangentOps::ring_q(const Vec& u, double mu, const Vec& v) const {
  return model_.sum(u, P_.q(x_, mu, model_.difference(u, v)));
}

namespace {

struct RingLength {
  double value = 0;
  bool ok = true;
  std::string reason;
};

RingLength ring_length(const RingTangentOps& R, const CoherentProjection& P, const std::vector<Vec>& knots,
                       const std::vector<double>& outer) {
  RingLength out;
  const Vec& x = R.model().base();
  const auto& S = *P.induced();
  const double h = 1.0 / static_cast<double>(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Vec& ci = knots[i];
    const auto D = extract_limit(
        [&](double e) { return S.dil(x, 1.0 / (h * e), R.model().difference(ci, R.ring_dil(ci, e, knots[i + 1]))); },
        outer);
    if (!D.cauchy_ok) {
      out.ok = false;
      out.reason = "curve is not derivable on cell " + std::to_string(i);
      return out;
    }
    if ((P.q_limit(x, D.limit) - D.limit).norm() > 1e-6 * (1.0 + D.limit.norm())) {
      out.ok = false;
      out.reason = "curve is not horizontal on cell " + std::to_string(i);
      return out;
    }
    out.value += h * tangent_distance_value(*P.background(), x, x, D.limit, default_eps_grid());
  }
  return out;
}

}  // namespace

RingLengthReport ring_length_check(const RingTangentOps& R, const CoherentProjection& P, const std::vector<Vec>& knots,
                            double mu, const std::vector<double>& outer) {
  RingLengthReport rep;
  if (knots.size() < 2) throw MalformedInput("ring_length_check: need at least two knots");
  const auto lr = ring_length(R, P, knots, outer);
  if (!lr.ok) {
    rep.reason = lr.reason;
    return rep;
  }
  rep.applicable = true;
  rep.l_ring = lr.value;
  const Vec& x = R.model().base();
  const auto grid = default_eps_grid();
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    Vec prev = P.q_limit(x, knots[i]);
    for (int j = 1; j <= 8; ++j) {
      const Vec cur = P.q_limit(x, R.ring_dil(knots[i], j / 8.0, knots[i + 1]));
      rep.l_bar += tangent_distance_value(*P.background(), x, prev, cur, grid);
      prev = cur;
    }
  }
  rep.gap = std::abs(rep.l_ring - rep.l_bar);
  std::vector<Vec> dk;
  for (const auto& k : knots) dk.push_back(P.induced()->dil(x, mu, k));
  const auto ld = ring_length(R, P, dk, outer);
  rep.homogeneity = ld.ok ? std::abs(ld.value - mu * rep.l_ring) : std::numeric_limits<double>::infinity();
  return rep;
}

double commutator_vertical(const RingTangentOps& R, const Vec& a, const Vec& b) {
  const auto& M = R.model();
  const Vec ab = M.sum(a, b);
  const Vec c = M.sum(M.sum(ab, M.inverse(a)), M.inverse(b));
  const auto* cs = dynamic_cast<const CarnotSpace*>(&M.structure());
  const CarnotGroup& G = cs->group();
  const Vec y = G.multiply(G.invert(M.base()), c);
  return y.tail(G.dim() - G.horizontal_dim()).norm();
}

nlohmann::json to_json(const WordProgram& w) {
  nlohmann::json letters = nlohmann::json::array();
  for (const auto& l : w.letters) letters.push_back(vec_to_json(l));
  return {{"x", vec_to_json(w.x)},
          {"eps", w.eps},
          {"weights", w.weights},
          {"letters", letters},
          {"rho", std::isfinite(w.rho) ? nlohmann::json(w.rho) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const ChowSolution& s) {
  nlohmann::json letters = nlohmann::json::array(), traj = nlohmann::json::array();
  for (const auto& l : s.letters) letters.push_back(vec_to_json(l));
  for (const auto& t : s.trajectory) traj.push_back(vec_to_json(t));
  nlohmann::json j{{"letters", letters},     {"trajectory", traj}, {"endpoint_error", s.endpoint_error},
                   {"segment_lengths", s.segment_lengths}, {"N_used", s.N_used}, {"eta", s.eta},
                   {"f_ratio", s.f_ratio},   {"ok", s.ok}};
  if (!s.failure.empty()) j["failure"] = s.failure;
  return j;
}

std::string to_csv(const PolylineCurve& c) {
  std::ostringstream os;
  os << "t";
  const auto d = c.samples.empty() ? 0 : c.samples.front().size();
  for (Eigen::Index i = 0; i < d; ++i) os << ",x" << i;
  os << '\n';
  for (std::size_t k = 0; k < c.knots.size(); ++k) {
    os << fmt_double(c.knots[k]);
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << fmt_double(c.samples[k](i));
    os << '\n';
  }
  return os.str();
}

}  // namespace dil
