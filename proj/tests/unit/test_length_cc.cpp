#include "dil/errors.hpp"
#include "dil/length_cc.hpp"
#include "dil/random.hpp"
#include "dil/spaces.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dil;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

PolylineCurve poly(std::vector<Vec> pts) {
  PolylineCurve c;
  for (std::size_t i = 0; i < pts.size(); ++i) c.knots.push_back(static_cast<double>(i));
  c.samples = std::move(pts);
  return c;
}

}  // namespace

TEST(LengthCc, RescaledLengthOfConesIsConstant) {
  const auto E = construct_space("euclidean 2");
  const auto c = poly({v2(0, 0), v2(3, 4), v2(3, 5)});
  for (double e : {0.5, 0.1, 0.01}) EXPECT_NEAR(rescaled_length(*E, v2(1, 1), e, c).value, 6.0, 1e-12);
  const auto H = construct_space("heisenberg");
  const auto h = poly({v3(0, 0, 0), v3(1, 0, 0), v3(1, 1, 0.5)});
  for (double e : {0.5, 0.1, 0.01}) EXPECT_NEAR(rescaled_length(*H, Vec::Zero(3), e, h).value, 2.0, 1e-12);
}

TEST(LengthCc, IntegrateHorizontalSquareLoopEnclosesArea) {
  const auto G = CarnotGroup::heisenberg();
  HorizontalControlCurve hc{Vec::Zero(3), {v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1)}};
  const auto r = integrate_horizontal(G, hc);
  // square of side 1/4: signed area 1/16
  EXPECT_LT((r.endpoint - v3(0, 0, 1.0 / 16)).norm(), 1e-15);
  EXPECT_NEAR(r.length, 1.0, 1e-15);
  EXPECT_EQ(r.trajectory.size(), 5u);
  hc.controls[1] = v3(0, 1, 0);
  EXPECT_THROW(integrate_horizontal(G, hc), MalformedInput);
}

TEST(LengthCc, HorizontalTargetHasUnitDistance) {
  const auto G = CarnotGroup::heisenberg();
  CcOptions o;
  o.cells = {8};
  o.multistarts = 2;
  const auto r = cc_distance(G, Vec::Zero(3), v3(1, 0, 0), o);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0, 1e-6);
  EXPECT_LT(r.endpoint_error, 1e-8);
  // left invariance
  const Vec x = v3(0.3, -0.4, 0.2);
  const auto s = cc_distance(G, x, G.multiply(x, v3(1, 0, 0)), o);
  EXPECT_NEAR(s.value, 1.0, 1e-6);
}

TEST(LengthCc, VerticalTargetApproachesIsoperimetricValue) {
  const auto G = CarnotGroup::heisenberg();
  CcOptions o;
  o.multistarts = 2;
  const auto r = cc_distance(G, Vec::Zero(3), v3(0, 0, 1), o);
  ASSERT_TRUE(r.converged);
  // a regular 32-gon of area 1 has perimeter 2 sqrt(32 tan(pi/32))
  const double polygon = 2 * std::sqrt(32 * std::tan(M_PI / 32));
  EXPECT_NEAR(r.value, polygon, 1e-3 * polygon);
  EXPECT_GE(r.value, 2 * std::sqrt(M_PI) - 1e-9);
  const auto end = integrate_horizontal(G, r.witness).endpoint;
  EXPECT_LT((end - v3(0, 0, 1)).norm(), 1e-8);
  EXPECT_FALSE(trace_csv(r).empty());
}

TEST(LengthCc, EuclideanGroupGivesNorm) {
  const auto G = CarnotGroup::euclidean(3);
  CcOptions o;
  o.cells = {4};
  o.multistarts = 1;
  const auto r = cc_distance(G, Vec::Zero(3), v3(1, 2, 2), o);
  EXPECT_NEAR(r.value, 3.0, 1e-6);
}

TEST(LengthCc, LengthRepresentation) {
  const auto E = construct_space("euclidean 2");
  auto r = length_representation_check(*E, poly({v2(0, 0), v2(3, 4), v2(3, 5)}));
  ASSERT_TRUE(r.applicable);
  EXPECT_LT(r.gap, 1e-9);
  const auto H = construct_space("heisenberg");
  // both coordinate segments are horizontal lines
  r = length_representation_check(*H, poly({v3(0, 0, 0), v3(1, 0, 0), v3(1, 1, 0.5)}));
  ASSERT_TRUE(r.applicable) << r.reason;
  EXPECT_NEAR(r.variation, 2.0, 1e-12);
  EXPECT_LT(r.gap, 1e-6);
  // a vertical segment is not derivable
  r = length_representation_check(*H, poly({v3(0, 0, 0), v3(0, 0, 1)}));
  EXPECT_FALSE(r.applicable);
}

TEST(LengthCc, TemperedDichotomy) {
  const auto E = construct_space("euclidean 3");
  const auto sample = sample_points(*E, Vec::Zero(3), 6, 4);
  const auto self = tempered_check(E->dist_fn(), *E, Vec::Zero(3), sample, default_eps_grid());
  EXPECT_TRUE(self.pass);
  EXPECT_NEAR(self.c_low, 1.0, 1e-9);
  EXPECT_NEAR(self.C_high, 1.0, 1e-9);
  const auto H = construct_space("heisenberg");
  const std::vector<Vec> vertical{v3(0, 0, 0), v3(0, 0, 0.5), v3(0, 0, -0.3)};
  const auto cc = tempered_check(H->dist_fn(), *E, Vec::Zero(3), vertical, default_eps_grid());
  EXPECT_FALSE(cc.pass);
  EXPECT_LT(cc.slope_max, -0.4);  // ratio grows like eps^{-1/2}
}

TEST(LengthCc, GammaDiagnosticEuclidean) {
  const auto E = construct_space("euclidean 2");
  const auto rep = gamma_diagnostic(*E, Vec::Zero(2), {poly({v2(0, 0), v2(1, 0), v2(1, 1)})},
                                    {0.5, 0.25, 0.125, 0.0625}, default_eps_grid());
  EXPECT_TRUE(rep.pass);
  ASSERT_EQ(rep.curves.size(), 1u);
  EXPECT_NEAR(rep.curves[0].limit, 2.0, 1e-9);
  EXPECT_LT(rep.curves[0].recovery_gap, 1e-9);
}

TEST(LengthCc, GammaDiagnosticSphereRecovers) {
  const auto S = construct_space("sphere");
  const auto rep = gamma_diagnostic(*S, Vec::Zero(2), {poly({v2(0, 0), v2(0.2, 0), v2(0.2, 0.2)})},
                                    {0.5, 0.25, 0.125, 0.0625}, default_eps_grid(), 1e-3);
  ASSERT_EQ(rep.curves.size(), 1u);
  const auto& c = rep.curves[0];
  EXPECT_NE(c.trend, 2);
  EXPECT_LT(c.recovery_gap, std::abs(c.values.front() - c.limit) + 1e-15);
}
