#pragma once
// Problem definition (N, p, lambda) and the coefficients of the power-rescaling
// transform v(r) = r^a u(r^b).

#include <cmath>
#include <sstream>
#include <string>

#include "hardy/errors.hpp"

namespace hardy {

/// (N+2)/(N-2), the critical Sobolev exponent.
inline double critical_exponent(int N) {
  if (N < 3) throw ParameterError("N must be >= 3");
  return static_cast<double>(N + 2) / static_cast<double>(N - 2);
}

/// (N-2)^2/4, the Hardy constant.
inline double hardy_constant(int N) {
  if (N < 3) throw ParameterError("N must be >= 3");
  double const d = static_cast<double>(N - 2);
  return 0.25 * d * d;
}

/// The triple (N, p, lambda) of -Δu - λ/|x|² u = u^p.
class ProblemParams {
 public:
  ProblemParams(int N, double p, double lambda) : N_(N), p_(p), lambda_(lambda) {
    if (N < 3) throw ParameterError("N must be >= 3");
    double const pc = critical_exponent(N);
    if (!std::isfinite(p) || !(p > 1.0) || p > pc * (1.0 + 1e-14)) {
      std::ostringstream os;
      os << "p must satisfy 1 < p <= (N+2)/(N-2) = " << pc << ", got " << p;
      throw ParameterError(os.str());
    }
    if (is_critical()) p_ = pc;
    if (!std::isfinite(lambda) || !(lambda < hardy_constant(N))) {
      std::ostringstream os;
      os << "lambda must be < (N-2)^2/4 = " << hardy_constant(N) << ", got " << lambda;
      throw ParameterError(os.str());
    }
  }

  static ProblemParams critical(int N, double lambda) {
    return ProblemParams(N, critical_exponent(N), lambda);
  }

  int N() const { return N_; }
  double p() const { return p_; }
  double lambda() const { return lambda_; }
  double dim() const { return static_cast<double>(N_); }

  /// p equals (N+2)/(N-2) to relative 1e-12.
  bool is_critical() const {
    double const pc = critical_exponent(N_);
    return std::abs(p_ - pc) <= 1e-12 * pc;
  }

  ProblemParams with_lambda(double lambda) const { return ProblemParams(N_, p_, lambda); }

 private:
  int N_;
  double p_;
  double lambda_;
};

/// sqrt(1 - 4λ/(N-2)^2).
inline double nu_lambda(int N, double lambda) {
  double const h = hardy_constant(N);
  if (!(lambda < h)) throw DomainError("nu_lambda: lambda must be below (N-2)^2/4");
  return std::sqrt(1.0 - lambda / h);
}

inline double nu_lambda(ProblemParams const& P) { return nu_lambda(P.N(), P.lambda()); }

struct TransformCoeffs {
  double nu = 1.0;  // ν_λ
  double a = 0.0;   // prefactor exponent
  double b = 1.0;   // radial rescaling exponent
  double M = 3.0;   // effective dimension
  double A = 1.0;   // nonlinearity coefficient, equal to b^2
  double D = 4.0;   // common denominator (p-1)(N-2)(ν-1)+4 = 4/b
};

inline TransformCoeffs transform_coeffs(ProblemParams const& P) {
  double const n2 = P.dim() - 2.0;
  double const nu = nu_lambda(P);
  double const p = P.p();
  double const D = (p - 1.0) * n2 * (nu - 1.0) + 4.0;
  // D >= 4ν > 0 for 1 < p <= (N+2)/(N-2)
  if (!(D > 0.0)) throw NumericError("transform_coeffs: nonpositive denominator");
  TransformCoeffs c;
  c.nu = nu;
  c.D = D;
  c.a = 2.0 * n2 * (1.0 - nu) / D;
  c.b = 4.0 / D;
  c.A = c.b * c.b;
  c.M = 1.0 + ((p + 3.0) * n2 * (nu - 1.0) + 4.0 * (P.dim() - 1.0)) / D;
  return c;
}

/// C(λ) = N(N-2)ν², the normalisation of the critical problem.
inline double c_lambda(ProblemParams const& P) {
  if (!P.is_critical()) throw PreconditionError("C(lambda) is only defined for critical p");
  double const nu = nu_lambda(P);
  return P.dim() * (P.dim() - 2.0) * nu * nu;
}

/// Subcritical range of the transformed problem: (M+2)/(M-2).
inline double effective_critical_exponent(double M) { return (M + 2.0) / (M - 2.0); }

}  // namespace hardy
