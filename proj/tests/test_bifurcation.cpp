#include <gtest/gtest.h>

#include <cmath>

#include "hardy/bifurcation.hpp"
#include "hardy/closedform.hpp"

using namespace hardy;
using namespace hardy::bifurcation;

namespace {

LCache& cache() {
  static LCache L(4, 2.0, 2000);
  return L;
}

std::vector<BifurcationPoint> const& points() {
  static std::vector<BifurcationPoint> const pts = [] {
    std::vector<BifurcationPoint> v;
    for (int k = 1; k <= 4; ++k) v.push_back(find_lambda_k(cache(), k));
    return v;
  }();
  return pts;
}

}  // namespace

TEST(LOfLambda, BracketIsFourOverB) {
  for (int N = 3; N <= 7; ++N) {
    for (double p : {1.2, 1.5, 0.5 * (1.0 + critical_exponent(N))}) {
      for (double lam : {-1e-4, -0.7, -3.0, -50.0}) {
        TransformCoeffs const C = transform_coeffs(ProblemParams(N, p, lam));
        EXPECT_NEAR(printed_bracket(N, p, lam), 4.0 / C.b, 1e-12 * (4.0 / C.b));
      }
    }
  }
}

TEST(LOfLambda, SixteenLambdaOverBSquared) {
  for (double lam : {-1e-4, -0.5, -2.0, -10.0, -60.0}) {
    LEvaluation const e = cache()(lam);
    EXPECT_LT(e.Lam, 0.0);
    EXPECT_LT(e.L, 0.0);
    EXPECT_NEAR(e.L / 16.0, e.Lam / (e.b * e.b), 1e-10 * std::abs(e.L / 16.0)) << lam;
  }
}

TEST(LOfLambda, NearZeroLimit) {
  LEvaluation const e = cache()(-1e-4);
  EXPECT_GT(e.L, 16.0 * (1.0 - 4.0));
  EXPECT_LT(e.L, 0.0);
}

TEST(LOfLambda, MemoizedAndRejectsNonNegative) {
  std::size_t const before = cache().size();
  LEvaluation const a = cache()(-0.123);
  LEvaluation const b = cache()(-0.123);
  EXPECT_EQ(a.L, b.L);
  EXPECT_EQ(cache().size(), before + 1);
  EXPECT_THROW(cache()(0.0), PreconditionError);
  EXPECT_THROW(LCache(4, 3.0), PreconditionError);
}

TEST(LOfLambda, ParallelMatchesSerial) {
  LCache fresh(4, 2.0, 800);
  std::vector<double> xs{-0.2, -0.9, -2.5, -7.0, -15.0, -40.0};
  auto par = parallel_map(xs, [&](double l) { return fresh(l).L; });
  LCache serial(4, 2.0, 800);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(par[i], serial(xs[i]).L);
}

TEST(Scan, OrderingAndRegression) {
  auto const& pts = points();
  EXPECT_LT(pts[0].lambda_k, 0.0);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) EXPECT_LT(pts[i + 1].lambda_k, pts[i].lambda_k);
  EXPECT_NEAR(pts[0].lambda_k, -0.3515778918, 1e-7);
  EXPECT_NEAR(pts[1].lambda_k, -3.4343923903, 1e-6);
  EXPECT_NEAR(pts[2].lambda_k, -8.1061461005, 1e-6);
  EXPECT_NEAR(pts[3].lambda_k, -14.3631358584, 1e-5);
}

TEST(Scan, DoubledMeshAgreesWithinDiscretization) {
  LCache fine(4, 2.0, 4000);
  BifurcationPoint const bp = find_lambda_k(fine, 1);
  EXPECT_NEAR(bp.lambda_k, -0.3515196284, 1e-7);
  EXPECT_LT(std::abs(bp.lambda_k - points()[0].lambda_k), 1e-3 * std::abs(bp.lambda_k));
}

TEST(Scan, ResidualAtRoot) {
  BifurcationPoint const& bp = points()[0];
  EXPECT_LE(std::abs(bp.L_at_lambda_k + 48.0), 1e-6 * 48.0);
  for (auto const& q : points()) {
    double const t = 16.0 * mu(4, q.k);
    EXPECT_LE(std::abs(q.L_at_lambda_k + t), 1e-5 * t) << q.k;
  }
}

TEST(Scan, SignConditionsAndMorseJumps) {
  for (auto const& bp : points()) {
    SignConditions const s = check_signs(bp, 4);
    EXPECT_TRUE(s.alpha_below) << bp.k;
    EXPECT_TRUE(s.beta_above) << bp.k;
    EXPECT_TRUE(s.beta_exclusive) << bp.k;
    EXPECT_TRUE(s.alpha_exclusive) << bp.k;
    EXPECT_LT(bp.bracket.alpha, bp.lambda_k);
    EXPECT_GT(bp.bracket.beta, bp.lambda_k);
    EXPECT_LE(bp.bracket.beta - bp.bracket.alpha, 1e-7 * std::abs(bp.bracket.beta) * 1.000001);
    EXPECT_EQ(bp.mult, closedform::harmonic_data(4, bp.k).mult);
    EXPECT_EQ(bp.morse_after - bp.morse_before, bp.mult) << bp.k;
    EXPECT_EQ(bp.predicted_branches, bp.k % 2 == 0 ? 2 : 1);
  }
  EXPECT_EQ(points()[0].morse_before, 1u);
  EXPECT_EQ(points()[0].morse_after, 5u);
}

TEST(Scan, MorseFromPencilAgreesWithFormula) {
  for (double lam : {-0.2, -2.0, -6.0, -12.0}) {
    ProblemParams const P(4, 2.0, lam);
    radial::RadialProfile const v = radial::solve_vlambda(P);
    spectral::WeightedProblem const W = spectral::lambda1_problem(v, 2000);
    double const Lam = spectral::smallest(W).value;
    EXPECT_EQ(morse_from_pencil(W.pencil, 4, transform_coeffs(P).b), morse_subcritical(P, Lam)) << lam;
  }
}

TEST(Scan, Errors) {
  EXPECT_THROW(find_lambda_k(cache(), 0, -10.0), ParameterError);
  EXPECT_THROW(find_lambda_k(cache(), 3, -1.0, 20), RangeError);
  EXPECT_THROW(find_lambda_k(cache(), 1, -2.0, 20, 1e-12), ParameterError);
}

TEST(Scan, DefaultDepthAndGrid) {
  EXPECT_DOUBLE_EQ(default_lambda_lo(4, 1), -64.0);
  EXPECT_DOUBLE_EQ(mu(4, 2), 8.0);
  std::vector<double> const g = scan_grid(-100.0, 50);
  EXPECT_EQ(g.size(), 50u);
  EXPECT_DOUBLE_EQ(g.front(), -1e-3);
  EXPECT_NEAR(g.back(), -100.0, 1e-10);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) EXPECT_GT(g[i], g[i + 1]);
}

TEST(Diagram, CriticalRowsFollowClosedForm) {
  auto const rows = sweep_diagram(3, 5.0, {-0.1, -0.6, -0.35, -0.5});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_DOUBLE_EQ(rows[0].lambda, -0.6);
  EXPECT_EQ(rows[0].morse, 9u);
  EXPECT_EQ(rows[1].morse, 4u);
  EXPECT_TRUE(rows[1].degenerate);
  EXPECT_EQ(rows[2].morse, 4u);
  EXPECT_EQ(rows[3].morse, 4u);
  for (auto const& r : rows) {
    EXPECT_TRUE(r.error.empty());
    EXPECT_DOUBLE_EQ(r.Lam, -2.0);
    EXPECT_NEAR(r.L, 16.0 * r.Lam / (r.b * r.b), 1e-12);
    EXPECT_NEAR(r.M, 3.0, 1e-12);
  }
}

TEST(Diagram, SubcriticalRowsAndErrors) {
  auto const rows = sweep_diagram(4, 2.0, {-1.0, 0.1}, 1000);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_LT(rows[0].Lam, 0.0);
  EXPECT_GE(rows[0].morse, 1u);
  EXPECT_FALSE(rows[1].error.empty());
}
