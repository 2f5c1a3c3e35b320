#pragma once
// First eigenvalue of the weighted problem
//   -w'' - (M-1)/r w' - V(r) w = Λ w / r^2,   w(R) = 0,
// by P1 finite elements on a log-graded mesh, plus the origin decay diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"
#include "hardy/params.hpp"
#include "hardy/radial_ode.hpp"

namespace hardy::spectral {

struct EigenPair {
  double value = 0.0;
  GridFunction psi;  // includes the Dirichlet node, psi(r_max) = 0
  std::size_t mesh_n = 0;
  double weight_M = 0.0;
};

/// Assembled problem: nodes of the full mesh and the pencil on all but the last node.
struct WeightedProblem {
  RadialGrid mesh;
  double M = 0.0;
  std::function<double(double)> V;
  TridiagonalPencil pencil;
};

namespace detail {

// 5-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 5> gl_x{-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> gl_w{0.2369268850561891, 0.4786286704993665,
                                            0.5688888888888889, 0.4786286704993665,
                                            0.2369268850561891};

}  // namespace detail

/// Stiffness plus potential against the r^{M-3} lumped mass. Element integrals of
/// r^{M-1}, V r^{M-1} and r^{M-3} against linear basis products use Gauss quadrature.
inline WeightedProblem assemble(RadialGrid mesh, double M, std::function<double(double)> V) {
  if (!(M > 2.0)) throw ParameterError("assemble: need M > 2");
  std::size_t const n = mesh.size();
  std::size_t const m = n - 1;
  TridiagonalPencil P;
  P.diag_K.assign(m, 0.0);
  P.offdiag_K.assign(m - 1, 0.0);
  P.diag_B.assign(m, 0.0);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    double const r0 = mesh[e], r1 = mesh[e + 1], h = r1 - r0;
    double w1 = 0.0;                 // ∫ r^{M-1}
    double v00 = 0.0, v01 = 0.0, v11 = 0.0;
    double b0 = 0.0, b1 = 0.0;       // ∫ φ r^{M-3}
    for (std::size_t q = 0; q < detail::gl_x.size(); ++q) {
      double const t = 0.5 * (1.0 + detail::gl_x[q]);
      double const r = r0 + h * t;
      double const wq = 0.5 * h * detail::gl_w[q];
      double const rm1 = std::pow(r, M - 1.0);
      double const phi0 = 1.0 - t, phi1 = t;
      double const Vr = V(r);
      w1 += wq * rm1;
      v00 += wq * Vr * rm1 * phi0 * phi0;
      v01 += wq * Vr * rm1 * phi0 * phi1;
      v11 += wq * Vr * rm1 * phi1 * phi1;
      double const rm3 = rm1 / (r * r);
      b0 += wq * rm3 * phi0;
      b1 += wq * rm3 * phi1;
    }
    double const k = w1 / (h * h);
    // node e always lies in the pencil, node e+1 unless it is the Dirichlet node
    P.diag_K[e] += k - v00;
    P.diag_B[e] += b0;
    if (e + 1 < m) {
      P.diag_K[e + 1] += k - v11;
      P.offdiag_K[e] += -k - v01;
      P.diag_B[e + 1] += b1;
    }
  }
  for (double b : P.diag_B) {
    if (!(b > 0.0)) throw Error("assemble: nonpositive lumped mass");
  }
  P.validate();
  return WeightedProblem{std::move(mesh), M, std::move(V), std::move(P)};
}

namespace detail {

inline GridFunction extend_dirichlet(RadialGrid const& mesh, std::vector<double> x) {
  x.push_back(0.0);
  double big = 0.0;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > big) {
      big = std::abs(x[i]);
      imax = i;
    }
  }
  if (x[imax] < 0.0) {
    for (double& v : x) v = -v;
  }
  return GridFunction(mesh, std::move(x));
}

}  // namespace detail

/// Smallest eigenpair of an assembled problem. A nonnegative value is reported as
/// NotAttainedError: the infimum need not be an eigenvalue then.
inline EigenPair smallest(WeightedProblem const& W) {
  EigResult r = solve_smallest_eig(W.pencil);
  if (!(r.value < 0.0)) {
    std::ostringstream os;
    os << "first eigenvalue " << r.value << " is not negative: infimum possibly not attained";
    throw NotAttainedError(os.str());
  }
  return EigenPair{r.value, detail::extend_dirichlet(W.mesh, std::move(r.vector)), W.mesh.size(), W.M};
}

/// Linearization at v_λ: V = pA v_λ^{p-1}, mesh log-graded on [r_min, 1].
inline WeightedProblem lambda1_problem(radial::RadialProfile const& v, std::size_t mesh_n = 2000,
                                       double r_min = 1e-6) {
  double const p = v.p();
  double const A = v.coefficient();
  auto V = [v, p, A](double r) { return p * A * std::pow(std::max(v.value(r), 0.0), p - 1.0); };
  return assemble(make_grid(r_min, 1.0, mesh_n, Grading::log), v.M(), V);
}

inline EigenPair lambda1(ProblemParams const& P, radial::RadialProfile const& v,
                         std::size_t mesh_n = 2000) {
  if (P.is_critical()) throw PreconditionError("lambda1: p must be subcritical");
  TransformCoeffs const C = transform_coeffs(P);
  if (std::abs(v.M() - C.M) > 1e-10 * C.M) {
    throw PreconditionError("lambda1: profile does not match the problem parameters");
  }
  return smallest(lambda1_problem(v, mesh_n));
}

/// Half-line problem with M = N, V = N(N+2)/(1+r^2)^2 on [r_min, R_max].
inline WeightedProblem critical_halfline_problem(int N, double R_max, std::size_t mesh_n,
                                                 double r_min = 1e-6) {
  if (N < 3) throw ParameterError("N must be >= 3");
  if (!(R_max >= 50.0)) throw ParameterError("critical_halfline_eig: need R_max >= 50");
  double const n = static_cast<double>(N);
  auto V = [n](double r) {
    double const q = 1.0 + r * r;
    return n * (n + 2.0) / (q * q);
  };
  return assemble(make_grid(r_min, R_max, mesh_n, Grading::log), n, V);
}

inline EigenPair critical_halfline_eig(int N, double R_max = 100.0, std::size_t mesh_n = 4000) {
  return smallest(critical_halfline_problem(N, R_max, mesh_n));
}

/// Continuous quotient ∫(w'^2 - V w^2) r^{M-1} / ∫ w^2 r^{M-3} by trapezoid on w's grid.
inline double rayleigh_quotient(GridFunction const& w, double M,
                                std::function<double(double)> const& V) {
  GridFunction const dw = derivative(w);
  std::vector<double> num(w.size()), den(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    num[i] = dw[i] * dw[i] - V(w.node(i)) * w[i] * w[i];
    den[i] = w[i] * w[i];
  }
  double const d = quad_weighted(GridFunction(w.grid(), std::move(den)), M - 3.0);
  if (!(d > 0.0)) throw DomainError("rayleigh_quotient: zero function");
  return quad_weighted(GridFunction(w.grid(), std::move(num)), M - 1.0) / d;
}

/// Discrete quotient x^T K x / x^T B x of nodal values (last node excluded).
inline double discrete_quotient(TridiagonalPencil const& P, std::span<const double> x) {
  std::size_t const m = P.size();
  if (x.size() < m) throw ParameterError("discrete_quotient: too few values");
  double kx = 0.0, bx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    kx += P.diag_K[i] * x[i] * x[i];
    bx += P.diag_B[i] * x[i] * x[i];
    if (i + 1 < m) kx += 2.0 * P.offdiag_K[i] * x[i] * x[i + 1];
  }
  if (!(bx > 0.0)) throw DomainError("discrete_quotient: zero function");
  return kx / bx;
}

/// Interior sign changes, ignoring entries below 1e-10 of the max modulus.
inline std::size_t sign_changes(GridFunction const& psi) {
  double big = 0.0;
  for (double v : psi.values()) big = std::max(big, std::abs(v));
  std::size_t count = 0;
  int last = 0;
  for (double v : psi.values()) {
    if (std::abs(v) <= 1e-10 * big) continue;
    int const s = v > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

struct HardyCheck {
  double min_quotient = 0.0;      // inf ∫w'^2 r^{M-1} / ∫w^2 r^{M-3} over mesh functions
  double standard_bound = 0.0;    // ((M-2)/2)^2
  double alternative_bound = 0.0; // (2/(M-2))^2
  bool standard_holds = false;
  bool alternative_holds = false;
};

/// Smallest eigenvalue of the potential-free pencil against both candidate Hardy constants.
/// `slack` absorbs discretization error.
inline HardyCheck hardy_discrete_check(double M, std::size_t mesh_n = 2000, double slack = 1e-3) {
  WeightedProblem const W =
      assemble(make_grid(1e-6, 1.0, mesh_n, Grading::log), M, [](double) { return 0.0; });
  HardyCheck h;
  h.min_quotient = solve_smallest_eig(W.pencil).value;
  h.standard_bound = 0.25 * (M - 2.0) * (M - 2.0);
  h.alternative_bound = 4.0 / ((M - 2.0) * (M - 2.0));
  h.standard_holds = h.min_quotient >= h.standard_bound * (1.0 - slack);
  h.alternative_holds = h.min_quotient >= h.alternative_bound * (1.0 - slack);
  return h;
}

/// θ = (2 - M + √((M-2)^2 + 4β²))/2.
inline double decay_exponent(double M, double beta2) {
  if (!(M > 2.0)) throw PreconditionError("decay_exponent: need M > 2");
  if (!(beta2 > 0.0)) throw PreconditionError("decay_exponent: need beta^2 > 0");
  return 0.5 * (2.0 - M + std::sqrt((M - 2.0) * (M - 2.0) + 4.0 * beta2));
}

struct DecayFit {
  double slope = 0.0;
  double gap = 0.0;
};

/// Least-squares log-log slope of psi over the two smallest decades of its grid.
inline DecayFit verify_decay(GridFunction const& psi, double theta) {
  auto const r = psi.grid().nodes();
  double const r_end = r.front() * 100.0 * (1.0 + 1e-12);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.size() && r[i] <= r_end; ++i) {
    if (!(psi[i] > 0.0)) throw DomainError("verify_decay: psi must be positive near 0");
    double const x = std::log(r[i]), y = std::log(psi[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 3) throw ParameterError("verify_decay: fewer than 3 nodes in the first two decades");
  double const dn = static_cast<double>(n);
  double const slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  return DecayFit{slope, std::abs(slope - theta)};
}

}  // namespace hardy::spectral
