#include "dil/errors.hpp"
#include "dil/metric_core.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dil;

namespace {

FiniteMetricSpace line_points(std::vector<double> xs) {
  std::vector<Vec> pts;
  for (double x : xs) pts.push_back((Vec(1) << x).finished());
  return FiniteMetricSpace::from_points(pts, [](const Vec& a, const Vec& b) { return (a - b).norm(); });
}

DistFn euclid() {
  return [](const Vec& a, const Vec& b) { return (a - b).norm(); };
}

}  // namespace

TEST(MetricCore, ValidMetricHasNoViolations) {
  EXPECT_TRUE(validate_metric(line_points({0, 1, 3, 7})).ok());
}

TEST(MetricCore, ViolationsAreClassified) {
  Mat d(3, 3);
  d << 0, 1, 5, 1, 0, 1, 5, 1, 0;  // 5 > 1 + 1
  auto rep = validate_metric(FiniteMetricSpace::from_matrix(d));
  ASSERT_FALSE(rep.ok());
  bool tri = false;
  for (const auto& v : rep.violations)
    if (v.kind == Violation::Kind::Triangle) {
      tri = true;
      EXPECT_NEAR(v.excess, 3.0, 1e-12);
    }
  EXPECT_TRUE(tri);

  Mat a(2, 2);
  a << 0, 1, 2, 0;
  rep = validate_metric(FiniteMetricSpace::from_matrix(a));
  ASSERT_FALSE(rep.ok());
  EXPECT_EQ(rep.violations.front().kind, Violation::Kind::Asymmetric);

  Mat g(2, 2);
  g << 0.5, 1, 1, 0;
  EXPECT_EQ(validate_metric(FiniteMetricSpace::from_matrix(g)).violations.front().kind,
            Violation::Kind::Diagonal);
}

TEST(MetricCore, VariationOfUnitSquareBoundary) {
  PolylineCurve c;
  c.knots = {0, 1, 2, 3, 4};
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}})
    c.samples.push_back((Vec(2) << x, y).finished());
  EXPECT_NEAR(variation_length(c, euclid()), 4.0, 1e-15);
}

TEST(MetricCore, InscribedPolygonsApproachCircleLength) {
  const CurveFn circle = [](double t) { return Vec((Vec(2) << std::cos(t), std::sin(t)).finished()); };
  const double l = variation_length(polyline_from(circle, 0, 2 * M_PI, 1024), euclid());
  // 2 n sin(pi / n)
  EXPECT_NEAR(l, 2 * 1024 * std::sin(M_PI / 1024), 1e-12);
  EXPECT_NEAR(l, 2 * M_PI, 1e-4);
}

TEST(MetricCore, UnitSpeedReparameterisation) {
  PolylineCurve c;
  c.knots = {0, 0.1, 5};
  c.samples = {Vec::Zero(2), (Vec(2) << 3, 4).finished(), (Vec(2) << 3, 5).finished()};
  const auto u = reparameterize_unit_speed(c, euclid());
  ASSERT_EQ(u.knots.size(), 3u);
  EXPECT_NEAR(u.knots[1], 5.0, 1e-15);
  EXPECT_NEAR(u.knots[2], 6.0, 1e-15);
}

TEST(MetricCore, PolylineValidation) {
  PolylineCurve c;
  c.knots = {0, 0};
  c.samples = {Vec::Zero(1), Vec::Zero(1)};
  EXPECT_THROW(c.validate(), MalformedInput);
  c.knots = {0, 1, 2};
  EXPECT_THROW(c.validate(), MalformedInput);
}

TEST(MetricCore, MetricDerivativeOfChordIsSpeed) {
  PolylineCurve c;
  c.knots = {0, 2};
  c.samples = {Vec::Zero(2), (Vec(2) << 6, 8).finished()};
  const auto r = metric_derivative(c, 1.0, {0.5, 0.25, 0.125, 0.0625}, euclid());
  EXPECT_TRUE(r.cauchy_ok);
  EXPECT_NEAR(r.scalar(), 5.0, 1e-12);
}

TEST(MetricCore, MetricDerivativeOfCircle) {
  const CurveFn circle = [](double t) { return Vec((Vec(2) << 2 * std::cos(t), 2 * std::sin(t)).finished()); };
  const auto r = metric_derivative(circle, 0, 6, 1.0, dyadic_grid(3, 16), euclid());
  EXPECT_TRUE(r.cauchy_ok);
  EXPECT_NEAR(r.scalar(), 2.0, 1e-7);
}

TEST(MetricCore, TrivialGroupoidNormAxioms) {
  const auto X = line_points({0, 1, 3, 7});
  TrivialGroupoidView G{&X};
  EXPECT_EQ(G.norm_axiom_defect(), 0.0);
  const TrivialGroupoidView::Arrow g{3, 1};
  EXPECT_NEAR(G.norm(g), 6.0, 1e-15);
  EXPECT_EQ(G.norm(G.inverse(g)), G.norm(g));
  const auto h = G.compose(g, {1, 0});
  EXPECT_EQ(h.target, 3);
  EXPECT_EQ(h.source, 0);
  EXPECT_LE(G.norm(h), G.norm(g) + G.norm({1, 0}));
  EXPECT_THROW(G.compose(g, {2, 0}), MalformedInput);
}

TEST(MetricCore, FiberDistanceIsBaseDistance) {
  const auto X = line_points({0, 1, 3, 7});
  TrivialGroupoidView G{&X};
  EXPECT_NEAR(groupoid_fiber_distance(G, X.ids[0], X.ids[2], X.ids[3]), 4.0, 1e-15);
}

TEST(MetricCore, JsonAndCsvRoundTrip) {
  const auto X = line_points({0, 1.5, 3.25});
  const auto J = space_from_json(to_json(X));
  EXPECT_EQ(J.ids, X.ids);
  EXPECT_TRUE(J.dmat.isApprox(X.dmat, 0));
  const auto C = space_from_csv(to_csv(X));
  EXPECT_EQ(C.ids, X.ids);
  EXPECT_EQ((C.dmat - X.dmat).cwiseAbs().maxCoeff(), 0.0);
}

TEST(MetricCore, MalformedCsvIsRejected) {
  EXPECT_THROW(space_from_csv("a,b\n0,1,2\n"), MalformedInput);
  EXPECT_THROW(space_from_csv("a\nzz\n"), MalformedInput);
  EXPECT_THROW(space_from_csv(""), MalformedInput);
}
