#include "dil/errors.hpp"
#include "dil/random.hpp"
#include "dil/spaces.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dil;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

void expect_a1_a2(const DilationStructure& S, double box, double tol) {
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    const Vec x = uniform_box(rng, Vec::Zero(S.dim()), box), u = uniform_box(rng, x, box);
    const double e = uniform(rng, 0.05, 1), m = uniform(rng, 0.05, 1);
    EXPECT_LT((S.dil(x, 1.0, u) - u).norm(), tol) << S.name();
    EXPECT_LT((S.dil(x, e, x) - x).norm(), tol) << S.name();
    EXPECT_LT((S.dil(x, e, S.dil(x, m, u)) - S.dil(x, e * m, u)).norm(), tol) << S.name();
  }
}

}  // namespace

TEST(Spaces, ExactIdentitiesA1A2) {
  expect_a1_a2(Euclidean(3), 1, 1e-15);
  expect_a1_a2(NonstandardPlane(1.0), 1, 1e-14);
  expect_a1_a2(*construct_space("heisenberg"), 1, 1e-14);
  expect_a1_a2(*construct_space("engel"), 1, 1e-13);
  expect_a1_a2(*construct_space("snowflake a=0.5"), 1, 1e-14);
  expect_a1_a2(SphereChart(), 0.3, 1e-12);
}

TEST(Spaces, SnowflakeDistanceAndCone) {
  const auto S = construct_space("snowflake a=0.5");
  const Vec x = v2(0.1, 0.2), u = v2(1, 1), v = v2(-0.3, 0.5);
  EXPECT_NEAR(S->dist(u, v), std::sqrt((u - v).norm()), 1e-15);
  for (double e : {0.5, 0.1, 0.01})
    EXPECT_NEAR(S->dist(S->dil(x, e, u), S->dil(x, e, v)) / e, S->dist(u, v), 1e-12);
  EXPECT_THROW(construct_space("snowflake a=1.5"), ConstructionError);
  EXPECT_THROW(construct_space("snowflake a=0"), ConstructionError);
}

TEST(Spaces, NonstandardPlaneRotatesAndScales) {
  const NonstandardPlane P(1.0);
  const Vec x = v2(1, 0), y = v2(2, 0);
  const double e = 0.5;
  const Vec d = P.dil(x, e, y) - x;
  EXPECT_NEAR(d.norm(), e, 1e-15);
  EXPECT_NEAR(std::atan2(d(1), d(0)), std::log(e), 1e-14);  // angle theta ln eps
}

TEST(Spaces, CarnotDistanceIsLeftInvariant) {
  const auto S = construct_space("heisenberg");
  const auto& G = dynamic_cast<const CarnotSpace&>(*S).group();
  Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    const Vec g = uniform_box(rng, Vec::Zero(3), 1), a = uniform_box(rng, Vec::Zero(3), 1),
              b = uniform_box(rng, Vec::Zero(3), 1);
    EXPECT_NEAR(S->dist(G.multiply(g, a), G.multiply(g, b)), S->dist(a, b), 1e-13);
  }
}

TEST(Spaces, SphereMatchesGreatCircles) {
  const SphereChart S;
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Vec p = uniform_box(rng, Vec::Zero(2), 0.8), q = uniform_box(rng, Vec::Zero(2), 0.8);
    EXPECT_NEAR(S.dist(p, q), oracle::sphere_dist(p, q), 1e-12);
    EXPECT_LT((SphereChart::from_ambient(SphereChart::to_ambient(p)) - p).norm(), 1e-14);
    EXPECT_LT((SphereChart::exp(p, SphereChart::log(p, q)) - q).norm(), 1e-12);
    const double e = uniform(rng, 0.01, 1);
    const Vec m = S.dil(p, e, q);
    EXPECT_NEAR(S.dist(p, m), e * S.dist(p, q), 1e-12);
    EXPECT_NEAR(S.dist(p, m) + S.dist(m, q), S.dist(p, q), 1e-12);  // on the geodesic
  }
}

TEST(Spaces, SphereChartLimits) {
  const SphereChart S;
  // a point near the south pole maps to a huge chart coordinate; dilating from there overshoots the cut locus
  EXPECT_THROW(S.dil(v2(0, 0), 1.0, v2(50, 0)), OutOfDomain);
  EXPECT_THROW(SphereChart::log(v2(0, 0), v2(1e7, 0)), OutOfDomain);
}

TEST(Spaces, NumericRiemannianSphereAgreesWithClosedForm) {
  const auto R = RiemannianExpSpace::sphere();
  const SphereChart S;
  Rng rng(14);
  for (int i = 0; i < 6; ++i) {
    const Vec p = uniform_box(rng, Vec::Zero(2), 0.4), q = uniform_box(rng, Vec::Zero(2), 0.4);
    EXPECT_NEAR(R->dist(p, q), S.dist(p, q), 1e-6);
    EXPECT_LT((R->dil(p, 0.3, q) - S.dil(p, 0.3, q)).norm(), 1e-6);
  }
  // Christoffel symbols of the conformal metric at the origin vanish
  for (const auto& G : R->christoffel(Vec::Zero(2))) EXPECT_LT(G.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Spaces, FlatRiemannianIsEuclidean) {
  const auto R = RiemannianExpSpace::flat(2);
  const Vec p = v2(0.1, 0.2), q = v2(-0.2, 0.3);
  EXPECT_NEAR(R->dist(p, q), (p - q).norm(), 1e-9);
  EXPECT_LT((R->dil(p, 0.25, q) - (p + 0.25 * (q - p))).norm(), 1e-9);
}

TEST(Spaces, SpecGrammar) {
  auto s = parse_space_spec("snowflake a=0.25 base=euclidean:3");
  EXPECT_EQ(s.kind, "snowflake");
  EXPECT_EQ(s.params.at("a"), "0.25");
  EXPECT_EQ(construct_space(s)->dim(), 3);
  s = parse_space_spec("euclidean:4");
  EXPECT_EQ(s.positional.front(), "4");
  EXPECT_EQ(construct_space("euclidean 4")->dim(), 4);
  EXPECT_EQ(construct_space("carnot engel")->dim(), 4);
  EXPECT_EQ(construct_space("riemannian flat 3")->dim(), 3);
  const auto t = construct_space(R"(carnot {"dims":[2,1],"brackets":[[0,1,2,2.0]]})");
  const auto& G = dynamic_cast<const CarnotSpace&>(*t).group();
  // z = c (a0 b1 - a1 b0) / 2 with c = 2
  EXPECT_NEAR(G.multiply((Vec(3) << 1, 0, 0).finished(), (Vec(3) << 0, 1, 0).finished())(2), 1.0, 1e-15);
  EXPECT_EQ(construct_space(nlohmann::json{{"kind", "nonstandard"}, {"theta", 2}})->name().empty(), false);
}

TEST(Spaces, SpecErrors) {
  EXPECT_THROW(construct_space(""), MalformedInput);
  EXPECT_THROW(construct_space("torus"), MalformedInput);
  EXPECT_THROW(construct_space("euclidean 2.5"), MalformedInput);
  EXPECT_THROW(construct_space("snowflake a=abc"), MalformedInput);
  EXPECT_THROW(construct_space("carnot {nope"), MalformedInput);
  EXPECT_THROW(construct_space("carnot lie"), MalformedInput);
}

TEST(Spaces, SamplePointsAreDeterministicAndInBox) {
  const SphereChart S;
  const auto a = sample_points(S, Vec::Zero(2), 20, 99), b = sample_points(S, Vec::Zero(2), 20, 99);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], b[i]);
    EXPECT_LE(a[i].cwiseAbs().maxCoeff(), S.sample_box());
  }
  EXPECT_NE(sample_points(S, Vec::Zero(2), 20, 100)[0], a[0]);
}
