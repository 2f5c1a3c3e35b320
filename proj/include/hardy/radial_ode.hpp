#pragma once
// Shooting solver for -v'' - (M-1)/r v' = v^p, v'(0) = 0, v(1) = 0, and the
// reconstruction of the radial solution of the original problem on the unit ball.
//
// One shot from a fixed central height is integrated outward until its first
// zero R; the exact scaling v -> s^{2/(p-1)} v(s .) then maps it onto (0, 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <sstream>
#include <vector>

#include "hardy/dopri.hpp"
#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"
#include "hardy/params.hpp"
#include "hardy/transform.hpp"

namespace hardy::radial {

struct ShootingConfig {
  double r0 = 1e-6;      // series start radius
  double dt0 = 1e-6;     // initial step
  double tol = 1e-12;    // absolute and relative local error tolerance
  int max_rescale = 60;  // cap on Newton iterations locating the first zero
  double max_step = 1e-2;
  double r_limit = 1e6;

  void validate() const {
    if (!(r0 > 0.0) || r0 > 1e-4) throw ParameterError("shooting: need 0 < r0 <= 1e-4");
    if (!(tol >= 1e-14) || tol > 1e-6) throw ParameterError("shooting: tol must lie in [1e-14, 1e-6]");
    if (!(dt0 > 0.0)) throw ParameterError("shooting: dt0 must be > 0");
    if (max_rescale < 1) throw ParameterError("shooting: max_rescale must be >= 1");
  }
};

/// One outward shot w(ρ) from w(0) = height, stored as Hermite knots up to its first zero.
struct Shot {
  double M = 3.0;
  double p = 2.0;
  double height = 1.0;
  double zero = 0.0;  // first zero R
  std::vector<ode::HermiteKnot> knots;

  double rhs(double rho, double w, double dw) const {
    return -(M - 1.0) / rho * dw - std::pow(std::max(w, 0.0), p);
  }

  /// w(ρ) and w'(ρ) for 0 <= ρ <= zero.
  std::array<double, 2> eval(double rho) const {
    if (rho <= knots.front().t) {
      double const c = std::pow(height, p) / (2.0 * M);
      return {height - c * rho * rho, -2.0 * c * rho};
    }
    if (rho >= knots.back().t) return {knots.back().y, knots.back().dy};
    auto it = std::upper_bound(knots.begin(), knots.end(), rho,
                               [](double t, ode::HermiteKnot const& k) { return t < k.t; });
    return ode::hermite5(*(it - 1), *it, rho);
  }
};

/// Positive solution of -v'' - (M-1)/r v' = A v^p on (0, 1) with v'(0) = v(1) = 0:
///   v(r) = amplitude * R^{2/(p-1)} w(R r).
class RadialProfile {
 public:
  RadialProfile(std::shared_ptr<const Shot> shot, double amplitude)
      : shot_(std::move(shot)), amplitude_(amplitude) {
    double const R = shot_->zero;
    vscale_ = amplitude_ * std::pow(R, 2.0 / (shot_->p - 1.0));
  }

  double M() const { return shot_->M; }
  double p() const { return shot_->p; }
  double first_zero() const { return shot_->zero; }
  double amplitude() const { return amplitude_; }
  Shot const& shot() const { return *shot_; }

  /// Coefficient A of the equation this profile solves: amplitude^{1-p}.
  double coefficient() const { return std::pow(amplitude_, 1.0 - shot_->p); }

  /// v(0).
  double alpha() const { return vscale_ * shot_->height; }

  double value(double r) const { return vscale_ * shot_->eval(shot_->zero * r)[0]; }

  double slope(double r) const {
    return vscale_ * shot_->zero * shot_->eval(shot_->zero * r)[1];
  }

  /// Samples on the integrator's accepted steps, mapped to (0, 1].
  GridFunction samples() const {
    std::vector<double> r, v;
    r.reserve(shot_->knots.size());
    v.reserve(shot_->knots.size());
    for (auto const& k : shot_->knots) {
      r.push_back(k.t / shot_->zero);
      v.push_back(vscale_ * k.y);
    }
    r.back() = 1.0;
    return GridFunction(RadialGrid(std::move(r)), std::move(v));
  }

  /// Samples on an arbitrary grid inside (0, 1].
  GridFunction sample(RadialGrid const& grid) const {
    if (grid.r_max() > 1.0 + 1e-14) throw DomainError("profile sampled outside (0, 1]");
    return GridFunction::sample(grid, [this](double r) { return value(r); });
  }

  GridFunction sample_slope(RadialGrid const& grid) const {
    if (grid.r_max() > 1.0 + 1e-14) throw DomainError("profile sampled outside (0, 1]");
    return GridFunction::sample(grid, [this](double r) { return slope(r); });
  }

 private:
  std::shared_ptr<const Shot> shot_;
  double amplitude_ = 1.0;
  double vscale_ = 1.0;
};

namespace detail {

inline std::shared_ptr<Shot> shoot(double M, double p, ShootingConfig const& cfg, double height) {
  using Knot = ode::Knot<2>;
  auto shot = std::make_shared<Shot>();
  shot->M = M;
  shot->p = p;
  shot->height = height;

  auto f = [M, p](double rho, ode::State<2> const& y) -> ode::State<2> {
    return {y[1], -(M - 1.0) / rho * y[1] - std::pow(std::max(y[0], 0.0), p)};
  };
  ode::StepControl ctl;
  ctl.atol = cfg.tol;
  ctl.rtol = cfg.tol;
  ctl.max_step = cfg.max_step;
  ode::Integrator<2, decltype(f)> integ(f, ctl);

  double const c = std::pow(height, p) / (2.0 * M);
  Knot start = integ.make_knot(cfg.r0, {height - c * cfg.r0 * cfg.r0, -2.0 * c * cfg.r0});
  std::vector<Knot> path{start};
  double h = cfg.dt0;
  Knot last = integ.advance(start, cfg.r_limit, h, &path,
                            [](Knot const& k) { return k.y[0] <= 0.0; });
  if (!(last.y[0] <= 0.0)) {
    std::ostringstream os;
    os << "shooting: no zero found before r = " << cfg.r_limit << " (M = " << M << ", p = " << p << ")";
    throw SolverError(os.str());
  }
  path.pop_back();
  Knot const base = path.back();

  // Newton on the landing point, each trial integrated from the last positive knot.
  auto to_hermite = [&](Knot const& k) {
    return ode::HermiteKnot{k.t, k.y[0], k.y[1], k.dy[1]};
  };
  double target;
  {
    // initial guess from the interpolant across the bracketing step
    ode::HermiteKnot const k0 = to_hermite(base), k1 = to_hermite(last);
    double lo = k0.t, hi = k1.t;
    for (int i = 0; i < 60; ++i) {
      double const mid = 0.5 * (lo + hi);
      (ode::hermite5(k0, k1, mid)[0] > 0.0 ? lo : hi) = mid;
    }
    target = 0.5 * (lo + hi);
  }
  std::vector<Knot> tail;
  bool converged = false;
  for (int it = 0; it < cfg.max_rescale; ++it) {
    tail.clear();
    double hh = std::min(h, target - base.t);
    Knot const end = integ.advance(base, target, hh, &tail);
    double const step = end.y[0] / end.y[1];
    if (!(end.y[1] < 0.0)) throw SolverError("shooting: nonnegative slope at the first zero");
    target -= step;
    if (std::abs(step) <= 4e-16 * target) {
      converged = true;
      break;
    }
  }
  if (!converged) throw SolverError("shooting: first-zero refinement did not converge");
  tail.clear();
  double hh = std::min(h, target - base.t);
  integ.advance(base, target, hh, &tail);
  path.insert(path.end(), tail.begin(), tail.end());

  shot->zero = path.back().t;
  shot->knots.reserve(path.size());
  for (auto const& k : path) shot->knots.push_back(to_hermite(k));
  return shot;
}

}  // namespace detail

/// The unique positive solution of -v'' - (M-1)/r v' = v^p on (0,1), v'(0) = v(1) = 0.
inline RadialProfile solve_canonical(double M, double p, ShootingConfig const& cfg = {},
                                     double height = 1.0) {
  cfg.validate();
  if (!(M > 2.0)) throw ParameterError("solve_canonical: need M > 2");
  if (!(p > 1.0) || !(p < effective_critical_exponent(M))) {
    throw PreconditionError("solve_canonical: need 1 < p < (M+2)/(M-2)");
  }
  if (!(height > 0.0)) throw ParameterError("solve_canonical: height must be > 0");
  return RadialProfile(detail::shoot(M, p, cfg, height), 1.0);
}

/// v_λ solving -v'' - (M-1)/r v' = A v^p on (0,1); A is absorbed by scaling.
inline RadialProfile solve_vlambda(ProblemParams const& P, ShootingConfig const& cfg = {}) {
  if (P.is_critical()) throw PreconditionError("solve_vlambda: p must be subcritical");
  TransformCoeffs const C = transform_coeffs(P);
  RadialProfile const canon = solve_canonical(C.M, P.p(), cfg);
  return RadialProfile(std::make_shared<Shot>(canon.shot()), std::pow(C.A, -1.0 / (P.p() - 1.0)));
}

/// Radial solution u_λ of the original problem on the unit ball and its transform v_λ.
struct RadialSolution {
  GridFunction v;  // on r in (0, 1]
  GridFunction u;  // on s = r^b in (0, 1]
  double alpha = 0.0;
  ProblemParams params;
  TransformCoeffs coeffs;
  RadialProfile profile;

  /// u(s) = s^{-a/b} v(s^{1/b}) at any s in (0, 1].
  double u_at(double s) const {
    if (!(s > 0.0) || s > 1.0 + 1e-14) throw DomainError("u_at: s must lie in (0, 1]");
    double const r = std::pow(s, 1.0 / coeffs.b);
    return std::pow(s, -coeffs.a / coeffs.b) * profile.value(r);
  }
};

/// Samples v_λ on a log grid whose image under s = r^b starts at s_min, and maps it back.
inline RadialSolution reconstruct_u(RadialProfile const& v, ProblemParams const& P,
                                    std::size_t n = 4096, double s_min = 1e-8) {
  TransformCoeffs const C = transform_coeffs(P);
  if (std::abs(v.M() - C.M) > 1e-10 * C.M || std::abs(v.coefficient() - C.A) > 1e-10 * C.A) {
    throw PreconditionError("reconstruct_u: profile does not match the problem parameters");
  }
  if (!(s_min > 0.0) || !(s_min < 1.0)) throw ParameterError("reconstruct_u: need 0 < s_min < 1");
  RadialGrid const grid = make_grid(std::pow(s_min, 1.0 / C.b), 1.0, n, Grading::log);
  GridFunction vs = v.sample(grid);
  GridFunction us = transform::inverse(vs, C);
  return RadialSolution{std::move(vs), std::move(us), v.alpha(), P, C, v};
}

struct OriginFit {
  double C = 0.0;
  double slope = 0.0;
  double residual = 0.0;  // rms of the log-log fit
};

/// Least-squares fit of log u = slope log s + log C over the two smallest decades of the grid.
inline OriginFit origin_constant(RadialSolution const& sol) {
  auto const s = sol.u.grid().nodes();
  double const s_end = s.front() * 100.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < s.size() && s[i] <= s_end * (1 + 1e-12); ++i) {
    if (!(sol.u[i] > 0.0)) throw DomainError("origin_constant: u must be positive near 0");
    double const x = std::log(s[i]), y = std::log(sol.u[i]);
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 3) throw ParameterError("origin_constant: grid too coarse near 0");
  double const dn = static_cast<double>(n);
  double const slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  double const icpt = (sy - slope * sx) / dn;
  double rss = 0.0;
  for (auto const& [x, y] : pts) rss += std::pow(y - (icpt + slope * x), 2);
  OriginFit fit{std::exp(icpt), slope, std::sqrt(rss / dn)};
  if (fit.residual > 1e-2) throw SolverError("origin_constant: fit residual too large, grid too coarse");
  return fit;
}

struct EnergyBalance {
  double kinetic = 0.0;    // ∫ v'^2 r^{M-1}
  double potential = 0.0;  // A ∫ v^{p+1} r^{M-1}
  double rel_gap = 0.0;
};

/// ∫ v'^2 r^{M-1} = A ∫ v^{p+1} r^{M-1}, both sides by trapezoid on a fine uniform grid.
inline EnergyBalance energy_balance(RadialProfile const& v, std::size_t n = 40001) {
  double const r_lo = v.shot().knots.front().t / v.first_zero();
  RadialGrid const grid = make_grid(r_lo, 1.0, n, Grading::uniform);
  GridFunction const vv = v.sample(grid);
  GridFunction const dv = v.sample_slope(grid);
  std::vector<double> k(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = dv[i] * dv[i];
    q[i] = std::pow(std::max(vv[i], 0.0), v.p() + 1.0);
  }
  EnergyBalance e;
  e.kinetic = quad_weighted(GridFunction(grid, std::move(k)), v.M() - 1.0);
  e.potential = v.coefficient() * quad_weighted(GridFunction(grid, std::move(q)), v.M() - 1.0);
  e.rel_gap = std::abs(e.kinetic - e.potential) / std::max(e.kinetic, e.potential);
  return e;
}

}  // namespace hardy::radial
