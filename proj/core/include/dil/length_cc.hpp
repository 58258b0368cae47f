#pragma once

#include "dil/carnot.hpp"
#include "dil/dilation.hpp"
#include "dil/metric_core.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace dil {

struct LengthSample {
  double eps = 0.0;
  double value = 0.0;
};

/// l^x_eps(c) = (1/eps) l_d(delta^x_eps c), polyline dilated knot by knot.
LengthSample rescaled_length(const DilationStructure& S, const Vec& x, double eps, const PolylineCurve& c);

/// Piecewise constant horizontal controls on n equal cells of [0, 1].
struct HorizontalControlCurve {
  Vec base;
  std::vector<Vec> controls;
  int cells() const { return static_cast<int>(controls.size()); }
};

struct HorizontalEndpoint {
  Vec endpoint;
  double length = 0.0;
  /// cell endpoints, starting with the base
  std::vector<Vec> trajectory;
};

/// Each cell moves by the group exponential of control / n.
HorizontalEndpoint integrate_horizontal(const CarnotGroup& G, const HorizontalControlCurve& hc);

struct CcOptions {
  std::vector<int> cells{8, 16, 32};
  int multistarts = 8;
  std::uint64_t seed = 1;
  double endpoint_tol = 1e-8;
  double mu0 = 10.0;
  int max_doublings = 80;
};

struct CcTraceRow {
  int cells = 0;
  int iteration = 0;
  double penalty = 0.0;
  double length = 0.0;
  double endpoint_error = 0.0;
};

struct CcResult {
  double value = 0.0;
  HorizontalControlCurve witness;
  double endpoint_error = 0.0;
  bool converged = false;
  std::string failure;
  std::vector<CcTraceRow> trace;
};

/// Penalised energy minimisation over controls with multistart and cell refinement.
CcResult cc_distance(const CarnotGroup& G, const Vec& x, const Vec& y, const CcOptions& opts = {});

nlohmann::json to_json(const CcResult& r);
std::string trace_csv(const CcResult& r);

struct LengthRepresentationReport {
  bool applicable = false;
  std::string reason;
  double variation = 0.0;
  double integral = 0.0;
  /// |variation - integral| / max(variation, tiny)
  double gap = 0.0;
};

/// Variation against the quadrature of d^{c(t)}(c(t), c'(t)) at cell midpoints.
LengthRepresentationReport length_representation_check(const DilationStructure& S, const PolylineCurve& c,
                                                        const LimitOptions& opts = {});

struct TemperedRow {
  double eps = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct TemperedReport {
  double c_low = 0.0, C_high = 0.0;
  /// log-log slopes of the extreme ratios over the smallest eps decade
  double slope_min = 0.0, slope_max = 0.0;
  /// limsup surrogate: max ratio over the two smallest eps
  double phi = 0.0;
  bool pass = false;
  std::vector<TemperedRow> rows;
};

/// Ratios (1/eps) d(deltabar_eps u, deltabar_eps v) / dbar^x(u, v) over the sample and grid.
TemperedReport tempered_check(const DistFn& d, const DilationStructure& background, const Vec& x,
                              const std::vector<Vec>& sample, const std::vector<double>& grid,
                              const LimitOptions& opts = {});

nlohmann::json to_json(const TemperedReport& r);

struct GammaCurveReport {
  std::vector<double> eps;
  std::vector<double> values;  // l^x_eps(c)
  double limit = 0.0;          // l^x(c) from the tangent distance
  double recovery_gap = 0.0;   // |l^x_eps(c) - l^x(c)| at the smallest eps
  double liminf_slack = 0.0;   // max(0, l^x(c) - min over tail of l^x_eps(c_eps))
  /// +1 increasing, -1 decreasing, 0 constant, 2 neither, as eps decreases
  int trend = 0;
  double max_step = 0.0;
  bool lip_ok = true;
};

struct GammaReport {
  std::vector<GammaCurveReport> curves;
  bool pass = false;
};

/// Constant families for recovery and zigzag families c_eps -> c for the liminf side.
GammaReport gamma_diagnostic(const DilationStructure& S, const Vec& x, const std::vector<PolylineCurve>& curves,
                             const std::vector<double>& eps, const std::vector<double>& grid,
                             double slack = 1e-6, const LimitOptions& opts = {});

nlohmann::json to_json(const GammaReport& r);

}  // namespace dil
