#pragma once

#include "dil/carnot.hpp"
#include "dil/dilation.hpp"
#include "dil/metric_core.hpp"
#include "dil/spaces.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace dil {

/// Q^x_eps u = x exp(a_1, eps a_2) with a = x^-1 u, over the affine background
/// deltabar^x_eps u = x + eps (u - x) and the Euclidean coordinate distance.
class CoherentProjection {
 public:
  /// Step 1 or 2 only.
  explicit CoherentProjection(CarnotGroup G);

  const CarnotGroup& group() const { return G_; }
  /// (dbar, deltabar)
  StructurePtr background() const { return background_; }
  /// (gauge distance, delta = deltabar Q)
  StructurePtr induced() const { return induced_; }

  Vec q(const Vec& x, double eps, const Vec& u) const;
  /// Q^x u: vertical part of x^-1 u dropped.
  Vec q_limit(const Vec& x, const Vec& u) const;
  Vec bar_dil(const Vec& x, double eps, const Vec& u) const { return x + eps * (u - x); }
  /// delta^x_eps = deltabar^x_eps Q^x_eps
  Vec dil(const Vec& x, double eps, const Vec& u) const { return bar_dil(x, eps, q(x, eps, u)); }
  double bar_dist(const Vec& a, const Vec& b) const { return (a - b).norm(); }

  /// deltabar^x_{1/eps} Q^{delta^x_eps u}_{1/eps} deltabar^x_eps Q^x_eps v
  Vec theta(const Vec& x, double eps, const Vec& u, const Vec& v) const;
  ConvergenceReport theta_limit(const Vec& x, const Vec& u, const Vec& v, const std::vector<double>& grid,
                                const LimitOptions& opts = {}) const;

 private:
  CarnotGroup G_;
  StructurePtr background_, induced_;
};

/// Exact per-eps residuals, all expected at round-off level.
struct CoherenceResiduals {
  double q_identity = 0;           // Q^x_1 u = u
  double q_fixes_base = 0;         // Q^x_eps x = x
  double semigroup = 0;            // Q_eps Q_mu = Q_{eps mu}
  double commutation = 0;          // Q_eps deltabar_mu = deltabar_mu Q_eps
  double induced_commutation = 0;  // delta_eps deltabar_mu = deltabar_mu delta_eps
  double theta_split = 0;          // Theta_eps(u,v) = Sigmabar_eps(Q_eps u, Delta_eps(u,v))
  double max() const;
};
CoherenceResiduals coherence_residuals(const CoherentProjection& P, const Vec& x, double eps, double mu,
                                       const Vec& u, const Vec& v);

/// Residuals of the limit relations, through extracted limits.
struct LimitRelationReport {
  double idempotence = 0;          // Q^x Q^x u = Q^x u
  double reconstruction = 0;       // Delta^x(u,v) = Deltabar^x(Q^x u, Theta^x(u,v))
  double projection_morphism = 0;  // Q^x Delta^x(u,v) = Deltabar^x(Q^x u, Q^x v)
  bool cauchy_ok = false;
};
LimitRelationReport limit_relations(const CoherentProjection& P, const Vec& x, const Vec& u, const Vec& v,
                                    const std::vector<double>& grid, const LimitOptions& opts = {});

struct WordProgram {
  Vec x;
  double eps = 1.0;
  /// scales w_k in (0, 1]; empty uses the limit projection Q
  std::vector<double> weights;
  std::vector<Vec> letters;
  /// nesting radius in the rescaled background distance
  double rho = std::numeric_limits<double>::infinity();
};

/// Psi^1, ..., Psi^{p+1}. Throws NestingError naming the first step whose letter is too far.
std::vector<Vec> psi_word(const CoherentProjection& P, const WordProgram& prog);

/// Largest rho (bisection) for which sampled N-letter words keep every Psi step and letter inside
/// the rescaled background ball of radius `domain` around x.
double fit_nesting_radius(const CoherentProjection& P, const Vec& x, double eps, int N, double domain,
                          std::uint64_t seed, int words = 64);

struct ChowOptions {
  int N = 4;
  double rho = std::numeric_limits<double>::infinity();
  double tol = 1e-6;
  std::uint64_t seed = 1;
};

struct ChowSolution {
  std::vector<Vec> letters;
  std::vector<Vec> trajectory;
  double endpoint_error = 0.0;
  std::vector<double> segment_lengths;
  int N_used = 0;
  double eta = 0.0;
  /// max segment length / eta^{1/2}
  double f_ratio = 0.0;
  bool ok = false;
  std::string failure;
};

/// Letters y_1..y_N with Psi^{N+1}_{eps,0}(x y_1 .. y_N) = z, forward-verified.
ChowSolution chow_connect(const CoherentProjection& P, const Vec& x, const Vec& z, double eps,
                          const ChowOptions& opts = {});

struct FDecade {
  double lo = 0, hi = 0;
  double C = 0;
  int targets = 0;
  double max_error = 0;
  bool all_ok = true;
};

struct FConstantReport {
  std::vector<FDecade> decades;
  /// max C / min C - 1
  double spread = 0;
  bool stable = false;
};

/// Per eta-decade sup of segment / eta^{1/2} over sampled targets in the gauge ball, refined by compass search.
FConstantReport estimate_f_constant(const CoherentProjection& P, const Vec& x, double gauge_radius,
                                    const std::vector<std::pair<double, double>>& decades, int targets,
                                    std::uint64_t seed, const ChowOptions& opts = {});

struct ShortCurveReport {
  PolylineCurve curve;
  std::vector<double> a_values;
  /// ratios[k][j]: segment k at a_values[j]
  std::vector<std::vector<double>> ratios;
  double max_deviation = 0;
  bool pass = false;
};

/// Short curve through the Psi trajectory; condition (B) ratios per segment.
ShortCurveReport short_curve_and_condB(const CoherentProjection& P, const ChowSolution& sol,
                                       const std::vector<double>& a_values = {0.1, 0.05, 0.02, 0.01});

struct ConditionAReport {
  std::vector<double> eps;
  std::vector<double> L;
  double L_max = 0;
  bool pass = false;
};

/// (1/eps) dbar(delta^x_eps u, delta^x_eps v) / dbar(u, v) over the sample, per eps.
ConditionAReport condition_A(const CoherentProjection& P, const Vec& x, const std::vector<Vec>& sample,
                             const std::vector<double>& grid);

/// Candidate tangent operations built on extracted Sigma^x and Delta^x of the induced structure.
class RingTangentOps {
 public:
  RingTangentOps(const CoherentProjection& P, Vec x, std::vector<double> grid = default_eps_grid(),
                 LimitOptions opts = {});
  const TangentSpaceModel& model() const { return model_; }
  /// Sigma^x(u, delta^x_mu Delta^x(u, v))
  Vec ring_dil(const Vec& u, double mu, const Vec& v) const;
  /// Sigma^x(u, Q^x_mu Delta^x(u, v))
  Vec ring_q(const Vec& u, double mu, const Vec& v) const;

 private:
  const CoherentProjection& P_;
  Vec x_;
  TangentSpaceModel model_;
};

struct RingLengthReport {
  bool applicable = false;
  std::string reason;
  double l_ring = 0;   // l^x(c)
  double l_bar = 0;    // lbar^x(Q^x c)
  double gap = 0;
  double homogeneity = 0;  // |l(delta^x_mu c) - mu l(c)|
};

/// Curve through `knots`, each cell the ring flow s -> ring_dil(c_i, s, c_{i+1}).
RingLengthReport ring_length_check(const RingTangentOps& R, const CoherentProjection& P, const std::vector<Vec>& knots,
                            double mu = 0.5, const std::vector<double>& outer = dyadic_grid(1, 5));

/// Vertical coordinate of x^-1 [a, b] for the tangent-group commutator a b a^-1 b^-1.
double commutator_vertical(const RingTangentOps& R, const Vec& a, const Vec& b);

nlohmann::json to_json(const WordProgram& w);
nlohmann::json to_json(const ChowSolution& s);
std::string to_csv(const PolylineCurve& c);

}  // namespace dil
