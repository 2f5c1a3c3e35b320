#pragma once
// Numerical certificates: ODE residuals, the Sobolev and Hardy-Sobolev quotients,
// the Pohozaev identity, and a batch runner that aggregates them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hardy/closedform.hpp"
#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"
#include "hardy/params.hpp"
#include "hardy/radial_ode.hpp"
#include "hardy/spectral.hpp"
#include "hardy/transform.hpp"

namespace hardy::verify {

enum class Form { critical, subcritical };

namespace detail {

inline void require_resolution(GridFunction const& f, char const* what) {
  if (f.size() < 32) throw ParameterError(std::string(what) + ": grid needs at least 32 nodes");
}

// Max over interior nodes of |Σ terms| / max |term|: each term is scaled by the
// largest term at its own node, so power-law blow-up at the origin cancels.
template <class Terms>
double max_relative(GridFunction const& f, Terms const& terms) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    auto const t = terms(i);
    double sum = 0.0, scale = 0.0;
    for (double x : t) {
      sum += x;
      scale = std::max(scale, std::abs(x));
    }
    if (scale > 0.0) worst = std::max(worst, std::abs(sum) / scale);
  }
  return worst;
}

}  // namespace detail

/// Residual of -u'' - (N-1)/r u' - λ/r^2 u = c u^p with c = C(λ) (critical) or 1 (subcritical).
inline double residual_ode(GridFunction const& u, ProblemParams const& P, Form form) {
  detail::require_resolution(u, "residual_ode");
  if (form == Form::critical && !P.is_critical()) {
    throw PreconditionError("residual_ode: critical form needs critical p");
  }
  double const c = form == Form::critical ? c_lambda(P) : 1.0;
  GridFunction const du = derivative(u);
  GridFunction const d2u = second_derivative(u);
  double const n1 = P.dim() - 1.0, lam = P.lambda(), p = P.p();
  return detail::max_relative(u, [&](std::size_t i) {
    double const r = u.node(i);
    if (!(u[i] > 0.0)) throw DomainError("residual_ode: u must be positive");
    return std::array<double, 4>{-d2u[i], -n1 / r * du[i], -lam / (r * r) * u[i],
                                 -c * std::pow(u[i], p)};
  });
}

/// Residual of -ψ'' - (N-1)/r ψ' + (μ_j - λ)/r^2 ψ - N(N+2)ν² r^{2(ν-1)}/(1+r^{2ν})^2 ψ = 0.
inline double residual_linearized(GridFunction const& psi, ProblemParams const& P, int j) {
  detail::require_resolution(psi, "residual_linearized");
  closedform::LinearizedPotential const V = closedform::linearized_potential(P);
  double const muj = static_cast<double>(closedform::harmonic_data(P.N(), j).mu);
  GridFunction const d1 = derivative(psi);
  GridFunction const d2 = second_derivative(psi);
  double const n1 = P.dim() - 1.0, lam = P.lambda();
  return detail::max_relative(psi, [&](std::size_t i) {
    double const r = psi.node(i);
    return std::array<double, 4>{-d2[i], -n1 / r * d1[i], (muj - lam) / (r * r) * psi[i],
                                 -V(r) * psi[i]};
  });
}

/// Residual of -v'' - (M-1)/r v' = A v^p for a shooting profile, resampled on a
/// uniform grid of n nodes over its range.
inline double residual_transformed(radial::RadialProfile const& v, std::size_t n = 20001) {
  double const r_lo = v.shot().knots.front().t / v.first_zero();
  RadialGrid const grid = make_grid(r_lo, 1.0, n, Grading::uniform);
  GridFunction const f = v.sample(grid);
  GridFunction const d1 = derivative(f);
  GridFunction const d2 = second_derivative(f);
  double const m1 = v.M() - 1.0, A = v.coefficient(), p = v.p();
  return detail::max_relative(f, [&](std::size_t i) {
    double const r = f.node(i);
    return std::array<double, 3>{-d2[i], -m1 / r * d1[i], -A * std::pow(std::max(f[i], 0.0), p)};
  });
}

/// |S^{N-1}| = 2π^{N/2}/Γ(N/2).
inline double sphere_area(int N) {
  double const h = 0.5 * static_cast<double>(N);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

struct QuadGrid {
  double r_min = 1e-6;
  double r_max = 1e4;
  std::size_t n = 20001;
};

namespace detail {

struct Integrals {
  double grad = 0.0;      // ∫ u'^2 r^{N-1}
  double hardy = 0.0;     // ∫ u^2 r^{N-3}
  double critical = 0.0;  // ∫ u^{2N/(N-2)} r^{N-1}
};

inline Integrals radial_integrals(GridFunction const& u, int N) {
  double const n = static_cast<double>(N);
  double const two_star = 2.0 * n / (n - 2.0);
  GridFunction const du = derivative(u);
  std::vector<double> g(u.size()), h(u.size()), c(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] = du[i] * du[i];
    h[i] = u[i] * u[i];
    c[i] = std::pow(std::abs(u[i]), two_star);
  }
  Integrals I;
  I.grad = quad_weighted_extended(GridFunction(u.grid(), std::move(g)), n - 1.0);
  I.hardy = quad_weighted_extended(GridFunction(u.grid(), std::move(h)), n - 3.0);
  I.critical = quad_weighted_extended(GridFunction(u.grid(), std::move(c)), n - 1.0);
  return I;
}

}  // namespace detail

/// Best Sobolev constant ∫|∇U|² / (∫U^{2*})^{(N-2)/N} over R^N, from the bubble U_δ.
inline double sobolev_constant_numeric(int N, QuadGrid const& q = {}, double delta = 1.0) {
  closedform::AubinTalenti const U = closedform::aubin_talenti(N, delta);
  RadialGrid const grid = make_grid(q.r_min, q.r_max, q.n, Grading::log);
  detail::Integrals const I = detail::radial_integrals(GridFunction::sample(grid, U), N);
  double const n = static_cast<double>(N);
  return std::pow(sphere_area(N), 2.0 / n) * I.grad / std::pow(I.critical, (n - 2.0) / n);
}

/// ∫(|∇u|² - λu²/|x|²) / (∫|u|^{2*})^{(N-2)/N} over R^N for radial u.
inline double hardy_sobolev_ratio(GridFunction const& u, ProblemParams const& P) {
  detail::Integrals const I = detail::radial_integrals(u, P.N());
  double const n = P.dim();
  double const num = I.grad - P.lambda() * I.hardy;
  return std::pow(sphere_area(P.N()), 2.0 / n) * num / std::pow(I.critical, (n - 2.0) / n);
}

struct Pohozaev {
  double grad = 0.0;     // ∫ u'^2 r^{N-1}
  double hardy = 0.0;    // λ ∫ u^2 r^{N-3}
  double power = 0.0;    // C(λ) ∫ u^{2*} r^{N-1}
  double gap = 0.0;      // |grad - hardy - power| / max term
};

/// Radial Pohozaev balance ∫u'^2 - λ∫u^2/r^2 - C(λ)∫u^{2*} = 0.
inline Pohozaev pohozaev_check(GridFunction const& u, ProblemParams const& P) {
  detail::Integrals const I = detail::radial_integrals(u, P.N());
  Pohozaev r;
  r.grad = I.grad;
  r.hardy = P.lambda() * I.hardy;
  r.power = c_lambda(P) * I.critical;
  double const scale = std::max({std::abs(r.grad), std::abs(r.hardy), std::abs(r.power)});
  r.gap = std::abs(r.grad - r.hardy - r.power) / scale;
  return r;
}

struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;  // set when the check threw
};

struct VerificationReport {
  ProblemParams params;
  std::string regime;
  std::string convention;
  std::size_t grid_n = 0;
  double grid_r_min = 0.0;
  double grid_r_max = 0.0;
  std::vector<Check> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](Check const& c) { return c.pass; });
  }
};

struct Options {
  std::size_t grid_n = 8192;  // residual grids
  QuadGrid quad{};
  std::size_t mesh_n = 2000;  // eigenvalue mesh
  radial::ShootingConfig shooting{};
};

namespace detail {

inline Check make_check(std::string name, double lhs, double rhs, double gap, double tol) {
  return Check{std::move(name), lhs, rhs, gap, tol, gap <= tol, {}};
}

template <class F>
void run_check(std::vector<Check>& out, std::string const& name, double tol, F&& f) {
  try {
    out.push_back(f());
  } catch (std::exception const& e) {
    Check c;
    c.name = name;
    c.tolerance = tol;
    c.rel_gap = std::numeric_limits<double>::infinity();
    c.error = e.what();
    out.push_back(std::move(c));
  }
}

inline double rel(double x, double y) {
  return std::abs(x - y) / std::max(std::abs(x), std::abs(y));
}

}  // namespace detail

/// Runs the checks applicable to P's regime. Failures are recorded, never thrown.
inline VerificationReport run_all(ProblemParams const& P, Options const& opt = {}) {
  VerificationReport rep{P, P.is_critical() ? "critical" : "subcritical", {}, opt.grid_n, 0, 0, {}};
  auto& out = rep.checks;
  using detail::make_check;
  using detail::run_check;

  if (P.is_critical()) {
    rep.convention = "right-hand side C(lambda) u^p with C(lambda) = N(N-2)nu^2";
    // At λ = 0 the solution is regular and flat at the origin; below r ~ 1e-2 its
    // second differences drop under double-precision resolution.
    rep.grid_r_min = P.lambda() == 0.0 ? 1e-2 : 1e-4;
    rep.grid_r_max = 1e4;
    double const nu = nu_lambda(P);
    auto const u1 = closedform::u_delta_lambda(1.0, P);
    auto res_grid = [&] { return make_grid(rep.grid_r_min, rep.grid_r_max, opt.grid_n, Grading::log); };
    auto quad_grid = [&] { return make_grid(opt.quad.r_min, opt.quad.r_max, opt.quad.n, Grading::log); };

    run_check(out, "residual_ode", 1e-4, [&] {
      double const r = residual_ode(GridFunction::sample(res_grid(), u1), P, Form::critical);
      return make_check("residual_ode", r, 0.0, r, 1e-4);
    });
    run_check(out, "residual_linearized_j0", 1e-4, [&] {
      double const r =
          residual_linearized(GridFunction::sample(res_grid(), closedform::kernel_Z(P)), P, 0);
      return make_check("residual_linearized_j0", r, 0.0, r, 1e-4);
    });
    // degree-j kernels only exist at their degeneracy values
    for (int j = 1; j <= 12; ++j) {
      double const lj = closedform::lambda_j(P.N(), j);
      if (std::abs(P.lambda() - lj) > 1e-12 * std::max(1.0, std::abs(lj))) continue;
      std::string const name = "residual_linearized_j" + std::to_string(j);
      run_check(out, name, 1e-4, [&] {
        double const r = residual_linearized(
            GridFunction::sample(res_grid(), closedform::kernel_Zj(P, j)), P, j);
        return make_check(name, r, 0.0, r, 1e-4);
      });
    }
    run_check(out, "hardy_sobolev_equality", 5e-3, [&] {
      double const S = sobolev_constant_numeric(P.N(), opt.quad);
      double const Q = hardy_sobolev_ratio(GridFunction::sample(quad_grid(), u1), P);
      double const expected = std::pow(nu, 2.0 * (P.dim() - 1.0) / P.dim());
      return make_check("hardy_sobolev_equality", Q / S, expected, detail::rel(Q / S, expected), 5e-3);
    });
    run_check(out, "pohozaev", 1e-5, [&] {
      Pohozaev const ph = pohozaev_check(GridFunction::sample(quad_grid(), u1), P);
      return make_check("pohozaev", ph.grad, ph.hardy + ph.power, ph.gap, 1e-5);
    });
    run_check(out, "energy_identity", 1e-4, [&] {
      auto const e = transform::energy_identity_check(GridFunction::sample(quad_grid(), u1), P);
      return make_check("energy_identity", e.lhs, e.rhs, e.rel_gap, 1e-4);
    });
    return rep;
  }

  rep.convention = "right-hand side u^p without normalization constant";
  rep.grid_r_min = 1e-3;
  rep.grid_r_max = 1.0;
  TransformCoeffs const C = transform_coeffs(P);
  std::optional<radial::RadialProfile> shot;
  run_check(out, "shooting", 1e-8, [&] {
    shot.emplace(radial::solve_vlambda(P, opt.shooting));
    double const end = std::abs(shot->value(1.0)) / shot->alpha();
    return make_check("shooting", shot->value(1.0), 0.0, end, 1e-8);
  });
  if (!shot) return rep;
  radial::RadialProfile const& v = *shot;

  run_check(out, "residual_ode", 1e-4, [&] {
    radial::RadialSolution const sol = radial::reconstruct_u(v, P, opt.grid_n, rep.grid_r_min);
    double const r = residual_ode(sol.u, P, Form::subcritical);
    return make_check("residual_ode", r, 0.0, r, 1e-4);
  });
  run_check(out, "energy_identity_transformed", 1e-6, [&] {
    radial::EnergyBalance const e = radial::energy_balance(v);
    return make_check("energy_identity_transformed", e.kinetic, e.potential, e.rel_gap, 1e-6);
  });
  run_check(out, "origin_exponent", 1e-2, [&] {
    radial::RadialSolution const sol = radial::reconstruct_u(v, P);
    radial::OriginFit const f = radial::origin_constant(sol);
    double const expected = -C.a / C.b;
    double const gap = expected == 0.0 ? std::abs(f.slope) : detail::rel(f.slope, expected);
    return make_check("origin_exponent", f.slope, expected, gap, 1e-2);
  });
  run_check(out, "lambda1_negative", 0.0, [&] {
    spectral::EigenPair const e = spectral::lambda1(P, v, opt.mesh_n);
    return make_check("lambda1_negative", e.value, 0.0, e.value < 0.0 ? 0.0 : 1.0, 0.0);
  });
  run_check(out, "hardy_discrete", 1e-3, [&] {
    spectral::HardyCheck const h = spectral::hardy_discrete_check(C.M, opt.mesh_n);
    double const short_by = std::max(0.0, 1.0 - h.min_quotient / h.standard_bound);
    return make_check("hardy_discrete", h.min_quotient, h.standard_bound, short_by, 1e-3);
  });
  return rep;
}

}  // namespace hardy::verify
