#include "dil/dilation.hpp"

#include "dil/errors.hpp"
#include "dil/format.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dil {

DistFn DilationStructure::dist_fn() const {
  return [this](const Vec& a, const Vec& b) { return dist(a, b); };
}

FunctionalStructure::FunctionalStructure(std::string name, int dim, DistFn d, DilFn dil)
    : name_(std::move(name)), dim_(dim), d_(std::move(d)), dil_(std::move(dil)) {}

namespace {

void require_domain(const DilationStructure& S, const Vec& x, const Vec& p, const char* op,
                    const char* which) {
  const double r = S.domain_radius(x);
  if (std::isfinite(r) && S.dist(x, p) > r)
    throw OutOfDomain(std::string(op) + ": " + which + " lies outside U(x)");
}

double coord_gap(const Vec& a, const Vec& b) { return (a - b).norm(); }

}  // namespace

Vec approx_difference(const DilationStructure& S, const Vec& x, double eps, const Vec& u, const Vec& v) {
  require_domain(S, x, u, "approx_difference", "u");
  require_domain(S, x, v, "approx_difference", "v");
  const Vec w = S.dil(x, eps, u);
  return S.dil(w, 1.0 / eps, S.dil(x, eps, v));
}

Vec approx_sum(const DilationStructure& S, const Vec& x, double eps, const Vec& u, const Vec& v) {
  require_domain(S, x, u, "approx_sum", "u");
  const Vec w = S.dil(x, eps, u);
  return S.dil(x, 1.0 / eps, S.dil(w, eps, v));
}

Vec approx_inverse(const DilationStructure& S, const Vec& x, double eps, const Vec& u) {
  return approx_difference(S, x, eps, u, x);
}

ConvergenceReport limit_difference(const DilationStructure& S, const Vec& x, const Vec& u, const Vec& v,
                                   const std::vector<double>& grid, const LimitOptions& opts) {
  return extract_limit([&](double e) { return approx_difference(S, x, e, u, v); }, grid, opts);
}

ConvergenceReport limit_sum(const DilationStructure& S, const Vec& x, const Vec& u, const Vec& v,
                            const std::vector<double>& grid, const LimitOptions& opts) {
  return extract_limit([&](double e) { return approx_sum(S, x, e, u, v); }, grid, opts);
}

ConvergenceReport limit_inverse(const DilationStructure& S, const Vec& x, const Vec& u,
                                const std::vector<double>& grid, const LimitOptions& opts) {
  return extract_limit([&](double e) { return approx_inverse(S, x, e, u); }, grid, opts);
}

double ApproxIdentityResiduals::max() const { return std::max({a, b, c, d, e, f, g}); }

ApproxIdentityResiduals approx_identity_residuals(const DilationStructure& S, const Vec& x, double eps,
                                                  const Vec& u, const Vec& v, const Vec& w) {
  ApproxIdentityResiduals r;
  const Vec xu = S.dil(x, eps, u);
  const Vec inv = approx_inverse(S, x, eps, u);
  r.a = coord_gap(approx_difference(S, x, eps, u, approx_sum(S, x, eps, u, v)), v);
  r.b = coord_gap(approx_sum(S, x, eps, u, approx_difference(S, x, eps, u, v)), v);
  r.c = coord_gap(approx_difference(S, x, eps, u, v), approx_sum(S, xu, eps, inv, v));
  r.d = coord_gap(approx_inverse(S, xu, eps, inv), u);
  r.e = coord_gap(approx_sum(S, x, eps, u, approx_sum(S, xu, eps, v, w)),
                  approx_sum(S, x, eps, approx_sum(S, x, eps, u, v), w));
  r.f = coord_gap(inv, approx_difference(S, x, eps, u, x));
  r.g = coord_gap(approx_sum(S, x, eps, x, u), u);
  return r;
}

TangentDistanceReport tangent_distance(const DilationStructure& S, const Vec& x, const Vec& u,
                                       const Vec& v, const std::vector<double>& grid,
                                       const LimitOptions& opts) {
  TangentDistanceReport r;
  r.conv = extract_limit_scalar(
      [&](double e) { return S.dist(S.dil(x, e, u), S.dil(x, e, v)) / e; }, grid, opts);
  r.value = r.conv.scalar();
  for (double mu : {0.5, 0.25}) {
    const Vec um = S.dil(x, mu, u);
    const Vec vm = S.dil(x, mu, v);
    const double dm = tangent_distance_value(S, x, um, vm, grid, opts) / mu;
    r.cone_residual = std::max(r.cone_residual, std::abs(r.value - dm));
  }
  const double first = r.conv.values.empty() ? 0.0 : r.conv.values.front()(0);
  r.degenerate = S.dist(u, v) > 1e-12 && (r.value <= 1e-6 * first || r.value <= 1e-300);
  return r;
}

double tangent_distance_value(const DilationStructure& S, const Vec& x, const Vec& u, const Vec& v,
                              const std::vector<double>& grid, const LimitOptions& opts) {
  return extract_limit_scalar(
             [&](double e) { return S.dist(S.dil(x, e, u), S.dil(x, e, v)) / e; }, grid, opts)
      .scalar();
}

TangentSpaceModel::TangentSpaceModel(StructurePtr S, Vec x, std::vector<double> grid, LimitOptions opts)
    : S_(std::move(S)), x_(std::move(x)), grid_(std::move(grid)), opts_(std::move(opts)) {}

Vec TangentSpaceModel::checked(const ConvergenceReport& r, const char* what) const {
  if (!r.cauchy_ok) throw Error(std::string("tangent model: ") + what + " limit is not Cauchy");
  return r.limit;
}

Vec TangentSpaceModel::sum(const Vec& u, const Vec& v) const {
  return checked(limit_sum(*S_, x_, u, v, grid_, opts_), "sum");
}

Vec TangentSpaceModel::difference(const Vec& u, const Vec& v) const {
  return checked(limit_difference(*S_, x_, u, v, grid_, opts_), "difference");
}

Vec TangentSpaceModel::inverse(const Vec& u) const {
  return checked(limit_inverse(*S_, x_, u, grid_, opts_), "inverse");
}

Vec TangentSpaceModel::dilate(double mu, const Vec& u) const { return S_->dil(x_, mu, u); }

double TangentSpaceModel::distance(const Vec& u, const Vec& v) const {
  auto r = extract_limit_scalar(
      [&](double e) { return S_->dist(S_->dil(x_, e, u), S_->dil(x_, e, v)) / e; }, grid_, opts_);
  if (!r.cauchy_ok) throw Error("tangent model: distance limit is not Cauchy");
  return r.scalar();
}

TangentModelResult build_tangent_model(StructurePtr S, const Vec& x, const std::vector<Vec>& sample,
                                       const std::vector<double>& grid, double tol,
                                       const LimitOptions& opts) {
  TangentModelResult res;
  auto model = std::make_shared<TangentSpaceModel>(S, x, grid, opts);
  auto& d = res.diag;
  const std::size_t n = sample.size();
  if (n < 3) throw MalformedInput("tangent model needs at least 3 sample points");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& u = sample[i];
    const Vec& v = sample[(i + 1) % n];
    const Vec& w = sample[(i + 2) % n];
    try {
      const Vec uv = model->sum(u, v);
      d.associativity = std::max(d.associativity, (model->sum(uv, w) - model->sum(u, model->sum(v, w))).norm());
      d.neutral = std::max({d.neutral, (model->sum(x, u) - u).norm(), (model->sum(u, x) - u).norm()});
      d.inverse = std::max(d.inverse, (model->sum(u, model->inverse(u)) - x).norm());
      d.left_translation = std::max(
          d.left_translation, std::abs(model->distance(model->sum(w, u), model->sum(w, v)) - model->distance(u, v)));
      const double mu = 0.5;
      d.morphism = std::max(
          d.morphism, (model->dilate(mu, uv) - model->sum(model->dilate(mu, u), model->dilate(mu, v))).norm());
    } catch (const std::exception& e) {
      d.ok = false;
      d.failure = std::string("construction failed: ") + e.what();
      d.offending = {u, v, w};
      return res;
    }
  }
  d.ok = d.associativity <= tol && d.neutral <= tol && d.inverse <= tol && d.left_translation <= tol &&
         d.morphism <= tol;
  if (!d.ok) {
    std::ostringstream os;
    os << "tangent group residuals exceed " << tol;
    d.failure = os.str();
    return res;
  }
  res.model = model;
  return res;
}

bool AxiomReport::passed(const std::string& axiom) const {
  bool any = false;
  for (const auto& c : checks)
    if (c.axiom == axiom) {
      any = true;
      if (!c.pass) return false;
    }
  return any;
}

bool AxiomReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.pass; });
}

std::vector<double> axiom_eps_grid() { return dyadic_grid(2, 26); }

AxiomReport verify_axioms(const DilationStructure& S, const std::vector<Vec>& points,
                          const std::vector<double>& grid, const LimitOptions& opts) {
  AxiomReport rep;
  const std::size_t n = points.size();
  if (n < 3) throw MalformedInput("verify_axioms needs at least 3 sample points");
  const double tol = S.exactness_tol();
  double amax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int pi = static_cast<int>(i);
    const Vec& x = points[i];
    const Vec& u = points[(i + 1) % n];
    const Vec& v = points[(i + 2) % n];
    const double scale = 1.0 + std::max({x.norm(), u.norm(), v.norm()});

    {  // A1
      double r = (S.dil(x, 1.0, u) - u).norm();
      for (double e : {0.5, 0.1, 2.0}) r = std::max(r, (S.dil(x, e, x) - x).norm());
      rep.checks.push_back({"A1", pi, r <= tol * scale, r, ""});
    }
    {  // A2, pairs whose compositions leave the domain are skipped
      double r = 0.0;
      int used = 0;
      for (auto [e, m] : {std::pair{0.5, 0.5}, {0.3, 0.7}, {0.5, 2.0}, {2.0, 0.25}, {0.2, 5.0}}) {
        try {
          r = std::max(r, (S.dil(x, e, S.dil(x, m, u)) - S.dil(x, e * m, u)).norm());
          ++used;
        } catch (const OutOfDomain&) {
        }
      }
      rep.checks.push_back({"A2", pi, used > 0 && r <= tol * scale, r, used ? "" : "no admissible pair"});
    }
    {  // A0: sup of d(x, delta_{1/eps} y) over sampled y in B(x, eps)
      std::vector<double> a;
      for (int k = 1; k <= 6; ++k) {
        const double e = std::ldexp(1.0, -k);
        double worst = -1.0;
        for (const Vec* p : {&u, &v})
          for (int j = -3; j <= 3; ++j) {
            const double t = e * std::ldexp(1.0, j);
            if (t >= 1.0) continue;
            try {
              const Vec y = S.dil(x, t, *p);
              if (S.dist(x, y) >= e) continue;
              worst = std::max(worst, S.dist(x, S.dil(x, 1.0 / e, y)));
            } catch (const OutOfDomain&) {
            }
          }
        if (worst >= 0) a.push_back(worst);
      }
      bool ok = a.size() >= 2;
      double growth = 0.0;
      if (ok) {
        growth = a.back() / std::max(a.front(), 1e-300);
        ok = std::all_of(a.begin(), a.end(), [](double q) { return std::isfinite(q); }) && growth <= 4.0;
        for (double q : a) amax = std::max(amax, q);
      }
      std::ostringstream os;
      os << "growth " << growth;
      rep.checks.push_back({"A0", pi, ok, growth, os.str()});
    }
    {  // A3
      try {
        const auto td = tangent_distance(S, x, u, v, grid, opts);
        const bool ok = td.conv.cauchy_ok && !td.degenerate;
        rep.checks.push_back({"A3", pi, ok, td.value,
                              td.degenerate ? "degenerate limit distance" : (td.conv.cauchy_ok ? "" : "not Cauchy")});
      } catch (const std::exception& e) {
        rep.checks.push_back({"A3", pi, false, 0.0, e.what()});
      }
    }
    {  // A4
      try {
        const auto c = limit_difference(S, x, u, v, grid, opts);
        rep.checks.push_back({"A4", pi, c.cauchy_ok, c.tail_gap, c.cauchy_ok ? "" : "not Cauchy"});
      } catch (const std::exception& e) {
        rep.checks.push_back({"A4", pi, false, 0.0, e.what()});
      }
    }
  }
  rep.A = 1.01 * std::max(1.0, amax);
  rep.B = 2.0 * rep.A;
  return rep;
}

RnpScan derivative_and_rnp_scan(const DilationStructure& S, const CurveFn& c, const std::vector<double>& ts,
                                const std::vector<double>& grid, const LimitOptions& opts) {
  RnpScan scan;
  int good = 0;
  for (double t : ts) {
    DerivativeSample s;
    s.t = t;
    const Vec ct = c(t);
    s.conv = extract_limit([&](double e) { return S.dil(ct, 1.0 / e, c(t + e)); }, grid, opts);
    s.derivable = s.conv.cauchy_ok;
    s.velocity = s.conv.limit;
    s.spread = s.conv.spread;
    good += s.derivable ? 1 : 0;
    scan.samples.push_back(std::move(s));
  }
  scan.derivable_fraction = ts.empty() ? 0.0 : static_cast<double>(good) / ts.size();
  return scan;
}

PansuReport pansu_differential_check(const std::function<Vec(const Vec&)>& f,
                                     const DilationStructure& src, const DilationStructure& dst,
                                     const Vec& x, const std::function<Vec(const Vec&)>& Df,
                                     const std::vector<Vec>& sample, const std::vector<double>& grid,
                                     double tol) {
  PansuReport r;
  const Vec fx = f(x);
  r.conv = extract_limit_scalar(
      [&](double e) {
        double worst = 0.0;
        for (const auto& u : sample)
          worst = std::max(worst, dst.dist(f(src.dil(x, e, u)), dst.dil(fx, e, Df(u))) / e);
        return worst;
      },
      grid);
  r.pass = std::abs(r.conv.scalar()) < tol;
  return r;
}

EquivalenceReport equivalence_probe(const DilationStructure& S, const DilationStructure& Sbar,
                                    const Vec& x, const std::vector<Vec>& sample,
                                    const std::vector<double>& grid, const LimitOptions& opts) {
  EquivalenceReport r;
  bool partial = false;
  r.limits_ok = true;
  for (const auto& u : sample) {
    r.Q.push_back(extract_limit([&](double e) { return Sbar.dil(x, 1.0 / e, S.dil(x, e, u)); }, grid, opts));
    r.P.push_back(extract_limit([&](double e) { return S.dil(x, 1.0 / e, Sbar.dil(x, e, u)); }, grid, opts));
    for (const auto* c : {&r.Q.back(), &r.P.back()}) {
      partial = partial || c->partial;
      r.limits_ok = r.limits_ok && c->cauchy_ok;
    }
  }
  std::vector<double> le, lmax, lmin;
  for (double e : grid) {
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample.size(); ++i)
      for (std::size_t j = i + 1; j < sample.size(); ++j) {
        const Vec a = Sbar.dil(x, e, sample[i]);
        const Vec b = Sbar.dil(x, e, sample[j]);
        const double db = Sbar.dist(a, b);
        if (db <= 0) continue;
        const double q = S.dist(a, b) / db;
        hi = std::max(hi, q);
        lo = std::min(lo, q);
      }
    if (hi > 0 && std::isfinite(lo) && lo > 0) {
      le.push_back(std::log(e));
      lmax.push_back(std::log(hi));
      lmin.push_back(std::log(lo));
    }
  }
  r.ratio_slope_max = fit_line(le, lmax).slope;
  r.ratio_slope_min = fit_line(le, lmin).slope;
  r.bilipschitz = le.size() >= 2 && std::abs(r.ratio_slope_max) <= 0.1 && std::abs(r.ratio_slope_min) <= 0.1;
  if (partial)
    r.verdict = EquivalenceReport::Verdict::Inconclusive;
  else
    r.verdict = (r.limits_ok && r.bilipschitz) ? EquivalenceReport::Verdict::Equivalent
                                               : EquivalenceReport::Verdict::NotEquivalent;
  return r;
}

nlohmann::json to_json(const AxiomReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"axiom", c.axiom}, {"point", c.point}, {"pass", c.pass}, {"value", c.value}, {"detail", c.detail}});
  nlohmann::json summary;
  for (const char* a : {"A0", "A1", "A2", "A3", "A4"}) summary[a] = r.passed(a);
  return nlohmann::json{{"checks", checks}, {"summary", summary}, {"A", r.A}, {"B", r.B}, {"pass", r.all_pass()}};
}

std::string to_csv(const AxiomReport& r) {
  std::ostringstream os;
  os << "axiom,point,pass,value\n";
  for (const auto& c : r.checks)
    os << c.axiom << ',' << c.point << ',' << (c.pass ? 1 : 0) << ',' << fmt_double(c.value) << '\n';
  return os.str();
}

nlohmann::json to_json(const TangentDistanceReport& r) {
  return nlohmann::json{{"value", r.value}, {"cone_residual", r.cone_residual}, {"degenerate", r.degenerate},
                        {"convergence", to_json(r.conv)}};
}

std::string verdict_name(EquivalenceReport::Verdict v) {
  switch (v) {
    case EquivalenceReport::Verdict::Equivalent: return "equivalent";
    case EquivalenceReport::Verdict::NotEquivalent: return "not-equivalent";
    default: return "inconclusive";
  }
}

}  // namespace dil
