#pragma once
// The map v(r) = r^a u(r^b), its inverse, and the quadratic-form identity it carries.

#include <algorithm>
#include <cmath>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"
#include "hardy/params.hpp"

namespace hardy::transform {

/// v(r_i) = r_i^a u(r_i^b) on the mapped nodes r_i = s_i^{1/b}.
inline GridFunction forward(GridFunction const& u, TransformCoeffs const& C) {
  auto const s = u.grid().nodes();
  if (!(s.front() > 0.0)) throw DomainError("transform::forward: nonpositive node");
  double const inv_b = 1.0 / C.b;
  std::vector<double> r(s.size()), v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    r[i] = (C.b == 1.0) ? s[i] : std::pow(s[i], inv_b);
    v[i] = (C.a == 0.0) ? u[i] : std::pow(r[i], C.a) * u[i];
  }
  return GridFunction(RadialGrid(std::move(r), u.grid().grading()), std::move(v));
}

/// u(s_i) = s_i^{-a/b} v(s_i^{1/b}) on the mapped nodes s_i = r_i^b.
inline GridFunction inverse(GridFunction const& v, TransformCoeffs const& C) {
  auto const r = v.grid().nodes();
  if (!(r.front() > 0.0)) throw DomainError("transform::inverse: nonpositive node");
  std::vector<double> s(r.size()), u(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    s[i] = (C.b == 1.0) ? r[i] : std::pow(r[i], C.b);
    u[i] = (C.a == 0.0) ? v[i] : std::pow(r[i], -C.a) * v[i];
  }
  return GridFunction(RadialGrid(std::move(s), v.grid().grading()), std::move(u));
}

struct EnergyIdentity {
  double lhs = 0.0;      // ∫ v'^2 r^{M-1} dr
  double rhs = 0.0;      // b ∫ (u'^2 - λ u^2/s^2) s^{N-1} ds
  double rel_gap = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|)
};

/// Both sides of the squared-norm identity. The prefactor of the right side is
/// b, which equals 1/ν in the critical case.
inline EnergyIdentity energy_identity_check(GridFunction const& u, ProblemParams const& P) {
  TransformCoeffs const C = transform_coeffs(P);
  double const N = P.dim();
  double const lam = P.lambda();

  GridFunction const v = forward(u, C);
  GridFunction const dv = derivative(v);
  GridFunction const du = derivative(u);

  auto const s = u.grid().nodes();
  std::vector<double> left(v.size()), right(u.size());
  for (std::size_t i = 0; i < v.size(); ++i) left[i] = dv[i] * dv[i];
  for (std::size_t i = 0; i < u.size(); ++i) {
    right[i] = du[i] * du[i] - lam * u[i] * u[i] / (s[i] * s[i]);
  }
  GridFunction const fl(v.grid(), std::move(left));
  GridFunction const fr(u.grid(), std::move(right));
  check_tail_decay(fl, C.M - 1.0, "energy identity (transformed side)");
  check_tail_decay(fr, N - 1.0, "energy identity (original side)");

  EnergyIdentity e;
  e.lhs = quad_weighted(fl, C.M - 1.0);
  e.rhs = C.b * quad_weighted(fr, N - 1.0);
  double const den = std::max(std::abs(e.lhs), std::abs(e.rhs));
  e.rel_gap = den > 0.0 ? std::abs(e.lhs - e.rhs) / den : 0.0;
  return e;
}

}  // namespace hardy::transform
