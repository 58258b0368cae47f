#pragma once

#include "dil/limits.hpp"
#include "dil/types.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace dil {

/// A point domain with a distance and a field of based dilations delta^x_eps.
class DilationStructure {
 public:
  virtual ~DilationStructure() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual double dist(const Vec& x, const Vec& y) const = 0;
  /// delta^x_eps y
  virtual Vec dil(const Vec& x, double eps, const Vec& y) const = 0;
  /// Radius (in dist) of the neighbourhood U(x) on which dilations are declared.
  virtual double domain_radius(const Vec& /*x*/) const { return std::numeric_limits<double>::infinity(); }
  /// Round-off level of the exact identities A1/A2 for this structure.
  virtual double exactness_tol() const { return 1e-12; }
  /// Half-width of the coordinate box holding the unit tangent ball.
  virtual double sample_box() const { return 1.0; }

  DistFn dist_fn() const;
};

using StructurePtr = std::shared_ptr<const DilationStructure>;

/// Structure built from two callables; handy for counterexamples.
class FunctionalStructure : public DilationStructure {
 public:
  using DilFn = std::function<Vec(const Vec&, double, const Vec&)>;
  FunctionalStructure(std::string name, int dim, DistFn d, DilFn dil);
  std::string name() const override { return name_; }
  int dim() const override { return dim_; }
  double dist(const Vec& x, const Vec& y) const override { return d_(x, y); }
  Vec dil(const Vec& x, double eps, const Vec& y) const override { return dil_(x, eps, y); }

 private:
  std::string name_;
  int dim_;
  DistFn d_;
  DilFn dil_;
};

// approximate operations, exact compositions of two dilations

/// Delta^x_eps(u,v) = delta^{delta^x_eps u}_{1/eps} delta^x_eps v
Vec approx_difference(const DilationStructure& S, const Vec& x, double eps, const Vec& u, const Vec& v);
/// Sigma^x_eps(u,v) = delta^x_{1/eps} delta^{delta^x_eps u}_eps v
Vec approx_sum(const DilationStructure& S, const Vec& x, double eps, const Vec& u, const Vec& v);
/// inv^x_eps u = Delta^x_eps(u, x)
Vec approx_inverse(const DilationStructure& S, const Vec& x, double eps, const Vec& u);

/// Limits as eps -> 0 of the approximate operations.
ConvergenceReport limit_difference(const DilationStructure& S, const Vec& x, const Vec& u, const Vec& v,
                                   const std::vector<double>& grid, const LimitOptions& opts = {});
ConvergenceReport limit_sum(const DilationStructure& S, const Vec& x, const Vec& u, const Vec& v,
                            const std::vector<double>& grid, const LimitOptions& opts = {});
ConvergenceReport limit_inverse(const DilationStructure& S, const Vec& x, const Vec& u,
                                const std::vector<double>& grid, const LimitOptions& opts = {});

/// Residuals of the seven exact identities relating Delta, Sigma and inv at one eps.
struct ApproxIdentityResiduals {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0, g = 0;
  double max() const;
};
ApproxIdentityResiduals approx_identity_residuals(const DilationStructure& S, const Vec& x, double eps,
                                                  const Vec& u, const Vec& v, const Vec& w);

struct TangentDistanceReport {
  ConvergenceReport conv;
  double value = 0.0;
  /// max over mu in {1/2, 1/4} of |d^x(u,v) - d^x(delta_mu u, delta_mu v)/mu|
  double cone_residual = 0.0;
  bool degenerate = false;
};

/// (1/eps) d(delta^x_eps u, delta^x_eps v) and its limit d^x(u,v).
TangentDistanceReport tangent_distance(const DilationStructure& S, const Vec& x, const Vec& u,
                                       const Vec& v, const std::vector<double>& grid,
                                       const LimitOptions& opts = {});
/// Limit value only.
double tangent_distance_value(const DilationStructure& S, const Vec& x, const Vec& u, const Vec& v,
                              const std::vector<double>& grid, const LimitOptions& opts = {});

/// Tangent space at x: operations realised as extracted limits.
class TangentSpaceModel {
 public:
  TangentSpaceModel(StructurePtr S, Vec x, std::vector<double> grid, LimitOptions opts);
  const Vec& base() const { return x_; }
  Vec sum(const Vec& u, const Vec& v) const;
  Vec difference(const Vec& u, const Vec& v) const;
  Vec inverse(const Vec& u) const;
  Vec dilate(double mu, const Vec& u) const;
  double distance(const Vec& u, const Vec& v) const;
  const DilationStructure& structure() const { return *S_; }

 private:
  Vec checked(const ConvergenceReport& r, const char* what) const;
  StructurePtr S_;
  Vec x_;
  std::vector<double> grid_;
  LimitOptions opts_;
};

struct TangentModelDiagnostics {
  bool ok = false;
  std::string failure;
  std::vector<Vec> offending;
  double associativity = 0, neutral = 0, inverse = 0, left_translation = 0, morphism = 0;
};

struct TangentModelResult {
  std::shared_ptr<TangentSpaceModel> model;  // null on failure
  TangentModelDiagnostics diag;
};

TangentModelResult build_tangent_model(StructurePtr S, const Vec& x, const std::vector<Vec>& sample,
                                       const std::vector<double>& grid, double tol = 1e-5,
                                       const LimitOptions& opts = {});

struct AxiomCheck {
  std::string axiom;
  int point = -1;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  double A = 0.0, B = 0.0;
  bool passed(const std::string& axiom) const;
  bool all_pass() const;
};

/// 2^-k, k = 2..26. First-order limits with a rotating phase (nonstandard plane) only settle below eps ~ 1e-7.
std::vector<double> axiom_eps_grid();

/// A0 (fitted constants), A1, A2 exactly, A3 and A4 through limit extraction.
AxiomReport verify_axioms(const DilationStructure& S, const std::vector<Vec>& points,
                          const std::vector<double>& grid, const LimitOptions& opts = {});

struct DerivativeSample {
  double t = 0.0;
  bool derivable = false;
  Vec velocity;
  double spread = 0.0;
  ConvergenceReport conv;
};

struct RnpScan {
  std::vector<DerivativeSample> samples;
  double derivable_fraction = 0.0;
};

/// Velocity estimate delta^{c(t)}_{1/eps} c(t+eps) at each t.
RnpScan derivative_and_rnp_scan(const DilationStructure& S, const CurveFn& c, const std::vector<double>& ts,
                                const std::vector<double>& grid, const LimitOptions& opts = {});

struct PansuReport {
  ConvergenceReport conv;
  bool pass = false;
};

/// sup over the sample of (1/eps) dbar(f(delta^x_eps u), deltabar^{f(x)}_eps Df(u)).
PansuReport pansu_differential_check(const std::function<Vec(const Vec&)>& f,
                                     const DilationStructure& src, const DilationStructure& dst,
                                     const Vec& x, const std::function<Vec(const Vec&)>& Df,
                                     const std::vector<Vec>& sample, const std::vector<double>& grid,
                                     double tol = 1e-6);

struct EquivalenceReport {
  enum class Verdict { Equivalent, NotEquivalent, Inconclusive };
  std::vector<ConvergenceReport> Q, P;
  bool limits_ok = false;
  double ratio_slope_max = 0.0, ratio_slope_min = 0.0;
  bool bilipschitz = false;
  Verdict verdict = Verdict::Inconclusive;
};

/// Q^x = lim deltabar_{1/eps} delta_eps and P^x = lim delta_{1/eps} deltabar_eps.
EquivalenceReport equivalence_probe(const DilationStructure& S, const DilationStructure& Sbar,
                                    const Vec& x, const std::vector<Vec>& sample,
                                    const std::vector<double>& grid, const LimitOptions& opts = {});

nlohmann::json to_json(const AxiomReport& r);
/// One row per (axiom, sample point).
std::string to_csv(const AxiomReport& r);
nlohmann::json to_json(const TangentDistanceReport& r);
std::string verdict_name(EquivalenceReport::Verdict v);

}  // namespace dil
