// Solves the subcritical problem on the unit ball for a few values of lambda and
// prints the central height, the origin behaviour and the first weighted eigenvalue.

#include <cstdio>

#include "hardy/radial_ode.hpp"
#include "hardy/spectral.hpp"

int main() {
  std::printf("%8s %10s %14s %12s %12s %12s\n", "lambda", "M", "v(0)", "slope", "-a/b", "Lambda");
  for (double lambda : {-0.001, -0.5, -1.0, -4.0, -16.0}) {
    hardy::ProblemParams const P(4, 2.0, lambda);
    hardy::TransformCoeffs const C = hardy::transform_coeffs(P);
    auto const v = hardy::radial::solve_vlambda(P);
    auto const fit = hardy::radial::origin_constant(hardy::radial::reconstruct_u(v, P));
    auto const eig = hardy::spectral::lambda1(P, v);
    std::printf("%8.3f %10.6f %14.6f %12.6f %12.6f %12.6f\n", lambda, C.M, v.alpha(), fit.slope,
                -C.a / C.b, eig.value);
  }
}
