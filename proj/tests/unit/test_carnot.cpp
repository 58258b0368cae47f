#include "dil/carnot.hpp"
#include "dil/errors.hpp"
#include "dil/random.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dil;

namespace {

// Engel algebra inside 4x4 nilpotent matrices: e0 = E01+E12+E23, e1 = E23, e2 = E13, e3 = E03.
Mat engel_matrix(const Vec& a) {
  Mat m = Mat::Zero(4, 4);
  m(0, 1) = a(0);
  m(1, 2) = a(0);
  m(2, 3) = a(0) + a(1);
  m(1, 3) = a(2);
  m(0, 3) = a(3);
  return m;
}

Vec engel_coords(const Mat& m) {
  Vec a(4);
  a << m(0, 1), m(2, 3) - m(0, 1), m(1, 3), m(0, 3);
  return a;
}

Mat nil_exp(const Mat& n) { return Mat::Identity(4, 4) + n + n * n / 2 + n * n * n / 6; }
Mat nil_log(const Mat& g) {
  const Mat n = g - Mat::Identity(4, 4);
  return n - n * n / 2 + n * n * n / 3;
}

Vec engel_mul(const Vec& a, const Vec& b) {
  return engel_coords(nil_log(nil_exp(engel_matrix(a)) * nil_exp(engel_matrix(b))));
}

}  // namespace

TEST(Carnot, HeisenbergLawMatchesClosedForm) {
  const auto G = CarnotGroup::heisenberg();
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec a = uniform_box(rng, Vec::Zero(3), 2), b = uniform_box(rng, Vec::Zero(3), 2);
    EXPECT_LT((G.multiply(a, b) - oracle::heis_mul(a, b)).norm(), 1e-14);
  }
}

TEST(Carnot, EngelLawMatchesMatrixGroup) {
  const auto G = CarnotGroup::engel();
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Vec a = uniform_box(rng, Vec::Zero(4), 1.5), b = uniform_box(rng, Vec::Zero(4), 1.5);
    EXPECT_LT((G.multiply(a, b) - engel_mul(a, b)).norm(), 1e-12);
  }
}

TEST(Carnot, GroupAxioms) {
  for (const auto& G : {CarnotGroup::heisenberg(), CarnotGroup::engel(), CarnotGroup::euclidean(3)}) {
    Rng rng(3);
    const int n = G.dim();
    for (int i = 0; i < 50; ++i) {
      const Vec a = uniform_box(rng, Vec::Zero(n), 1), b = uniform_box(rng, Vec::Zero(n), 1),
                c = uniform_box(rng, Vec::Zero(n), 1);
      EXPECT_LT((G.multiply(G.multiply(a, b), c) - G.multiply(a, G.multiply(b, c))).norm(), 1e-13);
      EXPECT_LT(G.multiply(a, G.invert(a)).norm(), 1e-15);
      EXPECT_EQ(G.multiply(a, Vec::Zero(n)), a);
    }
  }
}

TEST(Carnot, DilationsAreAutomorphisms) {
  const auto G = CarnotGroup::engel();
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Vec a = uniform_box(rng, Vec::Zero(4), 1), b = uniform_box(rng, Vec::Zero(4), 1);
    const double e = uniform(rng, 0.01, 3);
    EXPECT_LT((G.dilate(e, G.multiply(a, b)) - G.multiply(G.dilate(e, a), G.dilate(e, b))).norm(), 1e-13);
    EXPECT_LT((G.dilate(e, G.dilate(0.5, a)) - G.dilate(0.5 * e, a)).norm(), 1e-15);
  }
  Vec x(4);
  x << 1, 1, 1, 1;
  Vec want(4);
  want << 0.5, 0.5, 0.25, 0.125;
  EXPECT_EQ(G.dilate(0.5, x), want);
}

TEST(Carnot, GaugeIsHomogeneousAndMatchesFormula) {
  const auto H = CarnotGroup::heisenberg();
  Vec v(3);
  v << 0, 0, 0.25;
  EXPECT_NEAR(H.gauge_norm(v), 1.0, 1e-15);  // (16 z^2)^{1/4} = 2 sqrt(z)
  v << 3, 4, 0;
  EXPECT_NEAR(H.gauge_norm(v), 5.0, 1e-14);
  Rng rng(5);
  for (const auto& G : {H, CarnotGroup::engel()}) {
    for (int i = 0; i < 30; ++i) {
      const Vec a = uniform_box(rng, Vec::Zero(G.dim()), 1);
      const double e = uniform(rng, 0.01, 2);
      EXPECT_NEAR(G.gauge_norm(G.dilate(e, a)), e * G.gauge_norm(a), 1e-13);
      EXPECT_NEAR(G.gauge_norm(G.invert(a)), G.gauge_norm(a), 1e-15);
    }
  }
}

TEST(Carnot, StructureQueries) {
  const auto E = CarnotGroup::engel();
  EXPECT_EQ(E.step(), 3);
  EXPECT_EQ(E.dim(), 4);
  EXPECT_EQ(E.horizontal_dim(), 2);
  EXPECT_EQ(E.homogeneous_dim(), 7);
  EXPECT_EQ(E.degree(3), 3);
  EXPECT_EQ(E.layer_offset(2), 2);
  EXPECT_EQ(CarnotGroup::heisenberg().homogeneous_dim(), 4);
  Vec a(4);
  a << 1, 2, 3, 4;
  EXPECT_EQ(E.horizontal(a), (Vec(4) << 1, 2, 0, 0).finished());
  EXPECT_EQ(E.layer(a, 3), (Vec(1) << 4).finished());
}

TEST(Carnot, HorizontalWordReproducesElement) {
  Rng rng(6);
  for (const auto& G : {CarnotGroup::heisenberg(), CarnotGroup::engel()}) {
    for (int i = 0; i < 40; ++i) {
      const Vec g = uniform_box(rng, Vec::Zero(G.dim()), 1);
      const auto w = G.horizontal_word(g);
      for (const auto& l : w) EXPECT_LT((G.horizontal(l) - l).norm(), 1e-15);
      EXPECT_LT((word_product(G, w, Vec::Zero(G.dim())) - g).norm(), 1e-9);
    }
  }
}

TEST(Carnot, CcUpperBoundIsHomogeneous) {
  const auto H = CarnotGroup::heisenberg();
  Vec v(3);
  v << 0.3, -0.2, 0.4;
  EXPECT_NEAR(H.cc_norm_upper(H.dilate(0.5, v)), 0.5 * H.cc_norm_upper(v), 1e-12);
  v << 1, 0, 0;
  EXPECT_NEAR(H.cc_norm_upper(v), 1.0, 1e-15);
}

TEST(Carnot, RejectsInvalidTables) {
  // grading: [e0, e1] must land in degree 2
  EXPECT_THROW(CarnotGroup({2, 1}, {{0, 1, 1, 1.0}}), ConstructionError);
  // index out of range
  EXPECT_THROW(CarnotGroup({2, 1}, {{0, 1, 5, 1.0}}), ConstructionError);
  // V_1 does not generate V_2
  EXPECT_THROW(CarnotGroup({2, 1}, {}), ConstructionError);
  // step 4 is out of scope
  EXPECT_THROW(CarnotGroup({2, 1, 1, 1}, {{0, 1, 2, 1.0}, {0, 2, 3, 1.0}, {0, 3, 4, 1.0}}), Unsupported);
}

TEST(Carnot, JacobiViolationIsRejected) {
  // 3 generators, V2 = span(e3, e4, e5), V3 = e6; [e0,[e1,e2]] + cyclic must vanish
  std::vector<Bracket> b{{0, 1, 3, 1}, {1, 2, 4, 1}, {2, 0, 5, 1}, {0, 4, 6, 1}, {1, 5, 6, 1}, {2, 3, 6, 1}};
  EXPECT_THROW(CarnotGroup({3, 3, 1}, b), ConstructionError);
  b.back().c = -2;
  EXPECT_NO_THROW(CarnotGroup({3, 3, 1}, b));
}

TEST(Carnot, JsonRoundTrip) {
  const auto E = CarnotGroup::engel();
  const auto F = CarnotGroup::from_json(E.to_json());
  Vec a(4), b(4);
  a << 0.1, 0.2, 0.3, 0.4;
  b << -0.5, 0.7, 0.1, 0.0;
  EXPECT_EQ(F.multiply(a, b), E.multiply(a, b));
  EXPECT_THROW(CarnotGroup::from_json(nlohmann::json{{"dims", "x"}}), MalformedInput);
}
