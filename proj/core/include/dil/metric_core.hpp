#pragma once

#include "dil/limits.hpp"
#include "dil/types.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace dil {

/// Finite sampled metric space: point ids, optional coordinates, distance matrix.
struct FiniteMetricSpace {
  std::vector<std::string> ids;
  std::vector<Vec> coords;  // empty, or one entry per id
  Mat dmat;

  std::size_t size() const { return ids.size(); }
  int index_of(const std::string& id) const;

  static FiniteMetricSpace from_points(const std::vector<Vec>& pts, const DistFn& d,
                                       const std::string& prefix = "p");
  static FiniteMetricSpace from_matrix(const Mat& d);
};

struct Violation {
  enum class Kind { Diagonal, Negative, Asymmetric, Triangle };
  Kind kind;
  // Triangle: d(i,k) > d(i,j) + d(j,k); other kinds use i, j only
  int i = -1, j = -1, k = -1;
  double excess = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_metric(const FiniteMetricSpace& space, double tol = 1e-12);

struct PolylineCurve {
  std::vector<double> knots;
  std::vector<Vec> samples;

  /// Throws MalformedInput unless knots increase strictly and counts agree.
  void validate() const;
  double t0() const { return knots.front(); }
  double t1() const { return knots.back(); }
  /// Piecewise linear interpolation in coordinates.
  Vec at(double t) const;
};

PolylineCurve polyline_from(const CurveFn& c, double t0, double t1, int cells);

/// Sum of distances between consecutive samples.
double variation_length(const PolylineCurve& c, const DistFn& d);

/// Knot gaps replaced by the successive distances, starting at the first knot.
PolylineCurve reparameterize_unit_speed(const PolylineCurve& c, const DistFn& d);

/// d(c(t+s), c(t)) / |s| over the step grid.
ConvergenceReport metric_derivative(const CurveFn& c, double t0, double t1, double t,
                                    const std::vector<double>& steps, const DistFn& d,
                                    const LimitOptions& opts = {});
ConvergenceReport metric_derivative(const PolylineCurve& c, double t,
                                    const std::vector<double>& steps, const DistFn& d,
                                    const LimitOptions& opts = {});

/// X x X seen as a groupoid; the arrow (u, x) goes from x to u.
struct TrivialGroupoidView {
  const FiniteMetricSpace* base = nullptr;

  struct Arrow {
    int target;
    int source;
  };
  double norm(const Arrow& g) const;
  Arrow inverse(const Arrow& g) const { return {g.source, g.target}; }
  /// g h, defined when source(g) = target(h).
  Arrow compose(const Arrow& g, const Arrow& h) const;
  /// Right translation of g = (u, x) by h = (x, y): the arrow (u, y).
  Arrow right_translate(const Arrow& g, const Arrow& h) const;
  /// Largest violation of the three groupoid-norm axioms, 0 when all hold.
  double norm_axiom_defect() const;
};

/// d_{(x,x)}((u,x),(v,x)).
double groupoid_fiber_distance(const TrivialGroupoidView& view, const std::string& x,
                               const std::string& u, const std::string& v);

nlohmann::json to_json(const FiniteMetricSpace& s);
FiniteMetricSpace space_from_json(const nlohmann::json& j);
std::string to_csv(const FiniteMetricSpace& s);
FiniteMetricSpace space_from_csv(const std::string& text);

}  // namespace dil
