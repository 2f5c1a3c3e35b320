#pragma once
// Explicit objects of the critical problem: radial solutions, bubbles,
// linearization kernels, degeneracy values, spherical-harmonic data and the
// Morse index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "hardy/errors.hpp"
#include "hardy/params.hpp"

namespace hardy::closedform {

namespace detail {

inline void require_critical(ProblemParams const& P, char const* what) {
  if (!P.is_critical()) {
    throw PreconditionError(std::string(what) + " requires critical p = (N+2)/(N-2)");
  }
}

inline void require_positive_radius(double r, char const* what) {
  if (!(r > 0.0)) throw DomainError(std::string(what) + ": r must be > 0");
}

using u128 = unsigned __int128;

inline std::uint64_t narrow(u128 x, char const* what) {
  if (x > static_cast<u128>(UINT64_MAX)) {
    throw NumericError(std::string(what) + ": result exceeds 64-bit range");
  }
  return static_cast<std::uint64_t>(x);
}

// Exact binomial coefficient; each partial product C(n-k+i, i) is an integer.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  u128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * static_cast<u128>(n - k + i) / static_cast<u128>(i);
    narrow(c, "binomial");
  }
  return static_cast<std::uint64_t>(c);
}

}  // namespace detail

/// Aubin–Talenti bubble U_δ(r) = δ^{(N-2)/2} / (1 + δ² r²)^{(N-2)/2}.
struct AubinTalenti {
  int N;
  double delta;

  AubinTalenti(int N_, double delta_) : N(N_), delta(delta_) {
    if (N < 3) throw ParameterError("N must be >= 3");
    if (!(delta > 0.0)) throw ParameterError("delta must be > 0");
  }

  double operator()(double r) const {
    if (r < 0.0) throw DomainError("aubin_talenti: r must be >= 0");
    double const h = 0.5 * (N - 2);
    return std::pow(delta, h) / std::pow(1.0 + delta * delta * r * r, h);
  }
};

inline AubinTalenti aubin_talenti(int N, double delta) { return AubinTalenti(N, delta); }

/// Radial solutions u_{δ,λ} of the critical problem (normalised by C(λ)).
struct UDeltaLambda {
  int N;
  double delta;
  double nu;

  double operator()(double r) const {
    detail::require_positive_radius(r, "u_delta_lambda");
    double const h = 0.5 * (N - 2);
    return std::pow(r, h * (nu - 1.0)) * std::pow(delta, h) /
           std::pow(1.0 + delta * delta * std::pow(r, 2.0 * nu), h);
  }
};

inline UDeltaLambda u_delta_lambda(double delta, ProblemParams const& P) {
  detail::require_critical(P, "u_delta_lambda");
  if (!(delta > 0.0)) throw ParameterError("delta must be > 0");
  return UDeltaLambda{P.N(), delta, nu_lambda(P)};
}

/// Radial kernel Z_λ of the linearization at u_{1,λ}; exists for every λ.
struct KernelZ {
  int N;
  double nu;

  double operator()(double r) const {
    detail::require_positive_radius(r, "kernel_Z");
    double const r2nu = std::pow(r, 2.0 * nu);
    return std::pow(r, 0.5 * (N - 2) * (nu - 1.0)) * (1.0 - r2nu) /
           std::pow(1.0 + r2nu, 0.5 * N);
  }
};

inline KernelZ kernel_Z(ProblemParams const& P) {
  detail::require_critical(P, "kernel_Z");
  return KernelZ{P.N(), nu_lambda(P)};
}

/// r^{(N-2)(ν-1)/2 + ν} / (1 + r^{2ν})^{N/2} for an arbitrary ν (no degeneracy check).
struct DegreeProfile {
  int N;
  double nu;

  double exponent() const { return 0.5 * (N - 2) * (nu - 1.0) + nu; }

  double operator()(double r) const {
    detail::require_positive_radius(r, "degree profile");
    return std::pow(r, exponent()) / std::pow(1.0 + std::pow(r, 2.0 * nu), 0.5 * N);
  }
};

/// λ_j = ((N-2)²/4)(1 - j(N-2+j)/(N-1)).
inline double lambda_j(int N, int j) {
  if (N < 3) throw ParameterError("N must be >= 3");
  if (j < 0) throw ParameterError("j must be >= 0");
  double const mu = static_cast<double>(j) * static_cast<double>(N - 2 + j);
  return hardy_constant(N) * (1.0 - mu / static_cast<double>(N - 1));
}

/// Radial factor of the degree-j kernel elements; only exists at λ = λ_j.
inline DegreeProfile kernel_Zj(ProblemParams const& P, int j) {
  detail::require_critical(P, "kernel_Zj");
  if (j < 1) throw ParameterError("kernel_Zj: j must be >= 1");
  double const lj = lambda_j(P.N(), j);
  if (std::abs(P.lambda() - lj) > 1e-12 * std::max(1.0, std::abs(lj))) {
    throw PreconditionError("kernel_Zj: lambda = " + std::to_string(P.lambda()) +
                            " is not the degeneracy value lambda_" + std::to_string(j) + " = " +
                            std::to_string(lj));
  }
  DegreeProfile prof{P.N(), nu_lambda(P)};
  // The two printed forms of the exponent agree identically.
  double const alt = 0.5 * P.N() * prof.nu - 0.5 * (P.N() - 2);
  if (std::abs(alt - prof.exponent()) > 1e-12 * std::max(1.0, std::abs(alt))) {
    throw NumericError("kernel_Zj: exponent forms disagree");
  }
  return prof;
}

struct HarmonicData {
  int j = 0;
  std::uint64_t mu = 0;    // j(N-2+j)
  std::uint64_t mult = 1;  // (N+2j-2)(N+j-3)!/((N-2)! j!)
};

/// Eigenvalue μ_j of -Δ on S^{N-1} and its multiplicity, in exact integer arithmetic.
inline HarmonicData harmonic_data(int N, int j) {
  if (N < 3) throw ParameterError("N must be >= 3");
  if (j < 0) throw ParameterError("j must be >= 0");
  using detail::u128;
  auto const n = static_cast<std::uint64_t>(N);
  auto const k = static_cast<std::uint64_t>(j);
  HarmonicData h;
  h.j = j;
  h.mu = detail::narrow(static_cast<u128>(k) * static_cast<u128>(n - 2 + k), "harmonic_data");
  // (N+j-3)!/((N-2)! j!) = C(N+j-3, j)/(N-2)
  u128 const num = static_cast<u128>(n + 2 * k - 2) * detail::binomial(n + k - 3, k);
  if (num % (n - 2) != 0) throw NumericError("harmonic_data: non-integer multiplicity");
  h.mult = detail::narrow(num / (n - 2), "harmonic_data");
  return h;
}

/// Σ mult(j) over integers 0 <= j < tau. A tau within 1e-12 of an integer is that integer.
inline std::uint64_t multiplicity_sum_below(int N, double tau) {
  if (!std::isfinite(tau)) throw NumericError("morse threshold is not finite");
  detail::u128 sum = 0;
  for (int j = 0;; ++j) {
    double const gap = tau - static_cast<double>(j);
    if (gap <= 1e-12 * std::max(1.0, std::abs(tau))) break;
    sum += harmonic_data(N, j).mult;
    detail::narrow(sum, "morse index");
  }
  return static_cast<std::uint64_t>(sum);
}

/// τ(λ) = (2-N)/2 + √(N² - 16(N-1)λ/(N-2)²)/2.
inline double morse_threshold_critical(int N, double lambda) {
  double const n = static_cast<double>(N);
  double const d = n - 2.0;
  return 0.5 * (2.0 - n) + 0.5 * std::sqrt(n * n - 16.0 * (n - 1.0) * lambda / (d * d));
}

/// Morse index m(λ) of u_{1,λ}.
inline std::uint64_t morse_index_critical(ProblemParams const& P) {
  detail::require_critical(P, "morse_index_critical");
  return multiplicity_sum_below(P.N(), morse_threshold_critical(P.N(), P.lambda()));
}

/// Potential N(N+2)ν² r^{2(ν-1)}/(1 + r^{2ν})² of the linearized problem at u_{1,λ}.
struct LinearizedPotential {
  int N;
  double nu;

  double operator()(double r) const {
    if (r < 0.0) throw DomainError("linearized_potential: r must be >= 0");
    double const r2nu = std::pow(r, 2.0 * nu);
    return static_cast<double>(N) * (N + 2) * nu * nu * std::pow(r, 2.0 * (nu - 1.0)) /
           ((1.0 + r2nu) * (1.0 + r2nu));
  }
};

inline LinearizedPotential linearized_potential(ProblemParams const& P) {
  detail::require_critical(P, "linearized_potential");
  return LinearizedPotential{P.N(), nu_lambda(P)};
}

}  // namespace hardy::closedform
