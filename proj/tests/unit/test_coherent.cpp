#include "dil/coherent.hpp"
#include "dil/errors.hpp"
#include "dil/random.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dil;

namespace {

Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }
Vec hor(const Vec& a) { return v3(a(0), a(1), 0); }

const CoherentProjection& heis() {
  static const CoherentProjection P(CarnotGroup::heisenberg());
  return P;
}

}  // namespace

TEST(Coherent, StepThreeIsUnsupported) {
  EXPECT_THROW(CoherentProjection(CarnotGroup::engel()), Unsupported);
}

TEST(Coherent, ProjectionClosedForm) {
  const auto& P = heis();
  const Vec x = v3(0.2, -0.1, 0.3), u = v3(0.5, 0.4, -0.2);
  const Vec a = oracle::heis_mul(oracle::heis_inv(x), u);
  EXPECT_LT((P.q(x, 0.25, u) - oracle::heis_mul(x, v3(a(0), a(1), 0.25 * a(2)))).norm(), 1e-15);
  EXPECT_LT((P.q_limit(x, u) - oracle::heis_mul(x, hor(a))).norm(), 1e-15);
  const auto lim = extract_limit([&](double e) { return P.q(x, e, u); }, default_eps_grid());
  EXPECT_TRUE(lim.cauchy_ok);
  EXPECT_LT((lim.limit - P.q_limit(x, u)).norm(), 1e-12);
}

TEST(Coherent, ResidualsAreRoundOff) {
  const auto& P = heis();
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const Vec x = uniform_box(rng, Vec::Zero(3), 1), u = uniform_box(rng, x, 1), v = uniform_box(rng, x, 1);
    const double e = uniform(rng, 0.1, 1), m = uniform(rng, 0.1, 1);
    EXPECT_LT(coherence_residuals(P, x, e, m, u, v).max(), 1e-12);
  }
}

TEST(Coherent, LimitRelations) {
  const auto& P = heis();
  Rng rng(32);
  for (int i = 0; i < 10; ++i) {
    const Vec x = uniform_box(rng, Vec::Zero(3), 0.5), u = uniform_box(rng, x, 0.5), v = uniform_box(rng, x, 0.5);
    const auto r = limit_relations(P, x, u, v, default_eps_grid());
    EXPECT_TRUE(r.cauchy_ok);
    EXPECT_LT(r.idempotence, 1e-9);
    EXPECT_LT(r.reconstruction, 1e-6);
    EXPECT_LT(r.projection_morphism, 1e-6);
  }
}

TEST(Coherent, PsiWordMatchesRecursion) {
  const auto& P = heis();
  const Vec x = v3(0.1, 0.2, -0.1);
  const std::vector<Vec> q{v3(0.3, 0.1, 0.2), v3(0.2, 0.5, -0.1), v3(-0.1, 0.1, 0.4)};
  WordProgram prog{x, 0.3, {}, q};
  const auto t = psi_word(P, prog);
  ASSERT_EQ(t.size(), 4u);
  Vec psi = x;
  for (std::size_t k = 0; k < q.size(); ++k) {
    psi = oracle::heis_mul(psi, hor(oracle::heis_mul(oracle::heis_inv(psi), q[k])));
    EXPECT_LT((t[k + 1] - psi).norm(), 1e-12);
  }
  prog.eps = 1.0;
  EXPECT_LT((psi_word(P, prog).back() - t.back()).norm(), 1e-12);
  prog.weights = {1.0, 1.0, 1.0};
  EXPECT_LT((psi_word(P, prog).back() - q.back()).norm(), 1e-12);  // Q_1 is the identity
}

TEST(Coherent, NestingViolationReportsStep) {
  const auto& P = heis();
  WordProgram prog{Vec::Zero(3), 0.5, {}, {v3(0.01, 0, 0), v3(2, 0, 0)}, 0.1};
  try {
    psi_word(P, prog);
    FAIL() << "expected NestingError";
  } catch (const NestingError& e) {
    EXPECT_EQ(e.step, 2);
  }
  prog.weights = {0.5};
  EXPECT_THROW(psi_word(P, prog), MalformedInput);
}

TEST(Coherent, NestingRadiusFit) {
  const double r = fit_nesting_radius(heis(), Vec::Zero(3), 0.5, 4, 1.0, 7, 16);
  EXPECT_GT(r, 0.0);
  EXPECT_LE(r, 1.0);
  EXPECT_EQ(r, fit_nesting_radius(heis(), Vec::Zero(3), 0.5, 4, 1.0, 7, 16));
}

TEST(Coherent, ChowVerticalTargetTriangle) {
  const auto& P = heis();
  const double c = 0.04;
  const auto s = chow_connect(P, Vec::Zero(3), v3(0, 0, c), 1.0);
  ASSERT_TRUE(s.ok) << s.failure;
  EXPECT_EQ(s.N_used, 3);
  EXPECT_LT(s.endpoint_error, 1e-12);
  EXPECT_NEAR(s.eta, c, 1e-15);
  // sides s^2 = 4c / sqrt(3); the middle step also climbs c vertically
  EXPECT_NEAR(s.f_ratio, std::sqrt(4 / std::sqrt(3.0) + c), 1e-9);
}

TEST(Coherent, ChowRandomTargetsForwardVerified) {
  const auto& P = heis();
  Rng rng(33);
  for (int i = 0; i < 30; ++i) {
    const Vec x = uniform_box(rng, Vec::Zero(3), 0.5), t = uniform_box(rng, Vec::Zero(3), 0.3);
    const auto s = chow_connect(P, x, P.group().multiply(x, t), uniform(rng, 0.2, 1.0));
    EXPECT_TRUE(s.ok) << s.failure;
    EXPECT_LT(s.endpoint_error, 1e-6);
    EXPECT_EQ(s.trajectory.size(), 5u);
  }
}

TEST(Coherent, ChowGeneralSolverOnRescaledHeisenberg) {
  // [e0, e1] = 3 e2: not the unit table, exercised through the same triangle after rescaling
  const CoherentProjection P(CarnotGroup({2, 1}, {{0, 1, 2, 3.0}}));
  const auto s = chow_connect(P, Vec::Zero(3), v3(0.1, -0.2, 0.05), 1.0);
  EXPECT_TRUE(s.ok) << s.failure;
}

TEST(Coherent, FConstantStableAcrossDecades) {
  ChowOptions o;
  const auto F = estimate_f_constant(heis(), Vec::Zero(3), 0.5, {{0.005, 0.05}, {0.05, 0.5}}, 10, 5, o);
  ASSERT_EQ(F.decades.size(), 2u);
  for (const auto& d : F.decades) {
    EXPECT_TRUE(d.all_ok);
    EXPECT_GT(d.C, 1.4);
    EXPECT_LT(d.C, 1.7);
  }
  EXPECT_TRUE(F.stable);
}

TEST(Coherent, ShortCurveConditionB) {
  const auto& P = heis();
  const auto s = chow_connect(P, v3(0.1, 0.1, 0), v3(0.3, -0.1, 0.1), 1.0);
  ASSERT_TRUE(s.ok);
  const auto r = short_curve_and_condB(P, s);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_deviation, 1e-6);
  EXPECT_EQ(r.curve.samples.size(), s.trajectory.size());
  EXPECT_FALSE(to_csv(r.curve).empty());
}

TEST(Coherent, ConditionA) {
  const auto& P = heis();
  const Vec x = v3(0.2, 0.1, 0);
  std::vector<Vec> sample;
  Rng rng(34);
  for (int i = 0; i < 6; ++i) sample.push_back(uniform_box(rng, x, 0.5));
  const auto r = condition_A(P, x, sample, default_eps_grid());
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(std::isfinite(r.L_max));
}

TEST(Coherent, RingAndProjectedLengthsAgree) {
  const auto& P = heis();
  const auto& G = P.group();
  const Vec x = v3(0.1, -0.2, 0.05);
  const RingTangentOps R(P, x, default_eps_grid(), {});
  std::vector<Vec> knots{x};
  for (const auto& h : {v3(0.2, 0, 0), v3(0, 0.15, 0), v3(-0.1, 0.1, 0)}) knots.push_back(G.multiply(knots.back(), h));
  const auto r = ring_length_check(R, P, knots);
  ASSERT_TRUE(r.applicable) << r.reason;
  EXPECT_LT(r.gap, 1e-6);
  EXPECT_LT(r.homogeneity, 1e-6);
  EXPECT_GT(r.l_ring, 0.4);
  const auto bad = ring_length_check(R, P, {x, G.multiply(x, v3(0, 0, 0.2))});
  EXPECT_FALSE(bad.applicable);
}

TEST(Coherent, TangentCommutatorIsVertical) {
  const auto& P = heis();
  const Vec x = v3(0.1, 0.2, 0.3);
  const RingTangentOps R(P, x, default_eps_grid(), {});
  const Vec a = oracle::heis_mul(x, v3(0.3, 0, 0)), b = oracle::heis_mul(x, v3(0, 0.2, 0));
  EXPECT_NEAR(commutator_vertical(R, a, b), 0.06, 1e-6);
  EXPECT_NEAR(commutator_vertical(R, a, a), 0.0, 1e-6);
}

TEST(Coherent, JsonExports) {
  WordProgram w{Vec::Zero(3), 0.5, {}, {v3(1, 0, 0)}};
  const auto j = to_json(w);
  EXPECT_TRUE(j["rho"].is_null());
  EXPECT_EQ(j["letters"].size(), 1u);
  const auto s = chow_connect(heis(), Vec::Zero(3), v3(0.1, 0, 0), 1.0);
  EXPECT_TRUE(to_json(s)["ok"].get<bool>());
}
