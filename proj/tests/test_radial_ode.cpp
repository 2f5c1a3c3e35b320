#include <gtest/gtest.h>

#include <cmath>

#include "hardy/radial_ode.hpp"
#include "hardy/verify.hpp"

using namespace hardy;
using namespace hardy::radial;

namespace {

// Fixed-step RK4 for w'' + (M-1)/ρ w' + w^p = 0, w(0) = 1, run to the first zero.
double rk4_first_zero(double M, double p, double h) {
  auto f = [&](double t, double w, double dw, double& a, double& b) {
    a = dw;
    b = -(M - 1.0) / t * dw - std::pow(std::max(w, 0.0), p);
  };
  double t = h;
  double w = 1.0 - t * t / (2.0 * M);
  double dw = -t / M;
  while (true) {
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    f(t, w, dw, k1a, k1b);
    f(t + h / 2, w + h / 2 * k1a, dw + h / 2 * k1b, k2a, k2b);
    f(t + h / 2, w + h / 2 * k2a, dw + h / 2 * k2b, k3a, k3b);
    f(t + h, w + h * k3a, dw + h * k3b, k4a, k4b);
    double const wn = w + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
    double const dwn = dw + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
    if (wn <= 0.0) {
      // cubic Hermite root on [t, t+h]
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 100; ++it) {
        double const s = 0.5 * (lo + hi);
        double const h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
        double const h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
        double const val = h00 * w + h10 * h * dw + h01 * wn + h11 * h * dwn;
        (val > 0.0 ? lo : hi) = s;
      }
      return t + 0.5 * (lo + hi) * h;
    }
    t += h;
    w = wn;
    dw = dwn;
  }
}

ProblemParams example() { return ProblemParams(4, 2.0, -1.0); }

}  // namespace

TEST(Shooting, ConfigValidation) {
  ShootingConfig c;
  EXPECT_NO_THROW(c.validate());
  c.r0 = 1e-3;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.tol = 1e-16;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.tol = 1e-5;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(Shooting, FirstZeroAgainstRk4Oracle) {
  for (auto [M, p] : {std::pair{3.0, 2.0}, std::pair{4.0, 2.0}, std::pair{4.3431457505076198, 2.0},
                      std::pair{3.0, 4.0}}) {
    RadialProfile const v = solve_canonical(M, p);
    double const R = rk4_first_zero(M, p, 1e-5);
    EXPECT_NEAR(v.first_zero(), R, 1e-8 * R) << "M " << M << " p " << p;
    EXPECT_NEAR(v.alpha(), std::pow(R, 2.0 / (p - 1.0)), 1e-7 * v.alpha());
  }
  EXPECT_NEAR(solve_canonical(3.0, 2.0).alpha(), 18.947517248033, 1e-8);
}

TEST(Shooting, BoundaryPositivityMonotonicity) {
  RadialProfile const v = solve_vlambda(example());
  EXPECT_LT(std::abs(v.value(1.0)), 1e-8 * v.alpha());
  RadialGrid const g = make_grid(1e-6, 1.0 - 1e-9, 4000, Grading::log);
  GridFunction const vs = v.sample(g);
  GridFunction const ds = v.sample_slope(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    ASSERT_GT(vs[i], 0.0) << g[i];
    ASSERT_LT(ds[i], 0.0) << g[i];
  }
}

TEST(Shooting, HeightInvariance) {
  double const M = 4.3431457505076198;
  RadialProfile const ref = solve_canonical(M, 2.0);
  for (double h : {0.5, 2.0, 7.0}) {
    RadialProfile const v = solve_canonical(M, 2.0, {}, h);
    EXPECT_NEAR(v.alpha(), ref.alpha(), 1e-8 * ref.alpha());
    for (double r : {1e-4, 0.1, 0.5, 0.9, 0.999}) {
      EXPECT_NEAR(v.value(r), ref.value(r), 1e-8 * ref.alpha()) << "height " << h << " r " << r;
    }
  }
}

TEST(Shooting, VlambdaIsScaledCanonical) {
  ProblemParams const P = example();
  TransformCoeffs const C = transform_coeffs(P);
  RadialProfile const v = solve_vlambda(P);
  RadialProfile const w = solve_canonical(C.M, 2.0);
  EXPECT_NEAR(v.coefficient(), C.A, 1e-14);
  for (double r : {1e-3, 0.3, 0.8}) EXPECT_NEAR(v.value(r) / w.value(r), 1.0 / C.A, 1e-12);
  EXPECT_NEAR(v.alpha(), 77.4182816866433, 1e-7);
}

TEST(Shooting, ZeroLambdaReducesToCanonical) {
  ProblemParams const P(4, 2.0, 0.0);
  RadialProfile const v = solve_vlambda(P);
  RadialProfile const w = solve_canonical(4.0, 2.0);
  EXPECT_DOUBLE_EQ(v.alpha(), w.alpha());
  EXPECT_NEAR(v.first_zero(), 6.34651099861232, 1e-9);
  RadialSolution const s = reconstruct_u(v, P, 512, 1e-4);
  for (std::size_t i = 0; i < s.u.size(); ++i) EXPECT_DOUBLE_EQ(s.u[i], s.v[i]);
}

TEST(Shooting, Preconditions) {
  EXPECT_THROW(solve_canonical(4.0, 3.0), PreconditionError);
  EXPECT_THROW(solve_canonical(2.0, 2.0), ParameterError);
  EXPECT_THROW(solve_vlambda(ProblemParams::critical(4, -1.0)), PreconditionError);
  RadialProfile const v = solve_vlambda(example());
  EXPECT_THROW(reconstruct_u(v, ProblemParams(4, 2.0, -2.0)), PreconditionError);
  EXPECT_THROW(v.sample(make_grid(0.5, 2.0, 32, Grading::uniform)), DomainError);
}

TEST(Shooting, EnergyBalance) {
  for (ProblemParams const& P : {example(), ProblemParams(3, 3.0, -0.1), ProblemParams(5, 1.5, -4.0)}) {
    EnergyBalance const e = energy_balance(solve_vlambda(P));
    EXPECT_LT(e.rel_gap, 1e-6);
    EXPECT_GT(e.kinetic, 0.0);
  }
}

TEST(Shooting, TransformedResidual) {
  EXPECT_LT(verify::residual_transformed(solve_vlambda(example())), 1e-6);
}

namespace {

// Central values with the step cap lifted, so the controller alone sets the error.
std::vector<double> alphas_by_tol(std::vector<double> const& tols) {
  std::vector<double> out;
  for (double tol : tols) {
    ShootingConfig cfg;
    cfg.max_step = 10.0;
    cfg.tol = tol;
    out.push_back(solve_canonical(4.3431457505076198, 2.0, cfg).alpha());
  }
  return out;
}

}  // namespace

TEST(Shooting, CentralValueConvergesAsToleranceShrinks) {
  std::vector<double> const a = alphas_by_tol({1e-8, 1e-9, 1e-10, 1e-11});
  double const ref = solve_canonical(4.3431457505076198, 2.0).alpha();
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    EXPECT_LT(std::abs(a[i + 1] - ref), std::abs(a[i] - ref)) << i;
  }
  EXPECT_LT(std::abs(a.back() - ref), 1e-8 * ref);
}

TEST(Shooting, HalvingToleranceCutsChangeByEight) {
  std::vector<double> const a = alphas_by_tol({1e-8, 5e-9, 2.5e-9, 1.25e-9, 6.25e-10});
  for (std::size_t i = 0; i + 2 < a.size(); ++i) {
    double const d0 = std::abs(a[i + 1] - a[i]), d1 = std::abs(a[i + 2] - a[i + 1]);
    EXPECT_LE(d1, d0 / 8.0) << "halving " << i << ": change " << d0 << " -> " << d1;
  }
}

TEST(Reconstruction, OriginBehaviour) {
  ProblemParams const P = example();
  RadialProfile const v = solve_vlambda(P);
  RadialSolution const s = reconstruct_u(v, P);
  OriginFit const f = origin_constant(s);
  EXPECT_NEAR(f.slope, std::sqrt(2.0) - 1.0, 1e-2 * (std::sqrt(2.0) - 1.0));
  EXPECT_NEAR(f.C, v.alpha(), 1e-3 * v.alpha());
  // u(0) = 0 for λ < 0: decreasing toward the origin
  EXPECT_LT(s.u_at(1e-8), s.u_at(1e-6));
  EXPECT_LT(s.u_at(1e-6), s.u_at(1e-4));
  EXPECT_NEAR(s.u_at(1e-8), v.alpha() * std::pow(1e-8, std::sqrt(2.0) - 1.0), 1e-3 * s.u_at(1e-8));

  RadialSolution const s0 = reconstruct_u(solve_vlambda(ProblemParams(4, 2.0, 0.0)), ProblemParams(4, 2.0, 0.0));
  OriginFit const f0 = origin_constant(s0);
  EXPECT_NEAR(f0.slope, 0.0, 1e-6);
  EXPECT_NEAR(f0.C, s0.alpha, 1e-6 * s0.alpha);
}

TEST(Reconstruction, OriginalEquationResidual) {
  ProblemParams const P = example();
  RadialSolution const s = reconstruct_u(solve_vlambda(P), P, 8192, 1e-3);
  EXPECT_LT(verify::residual_ode(s.u, P, verify::Form::subcritical), 1e-4);
}
