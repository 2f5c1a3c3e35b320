// Morse index of the critical radial solution as lambda decreases through the
// degeneracy values, for N = 3.

#include <cstdio>

#include "hardy/closedform.hpp"

int main() {
  int const N = 3;
  for (int j = 1; j <= 4; ++j) {
    auto const h = hardy::closedform::harmonic_data(N, j);
    std::printf("lambda_%d = %9.4f  mult %3llu\n", j, hardy::closedform::lambda_j(N, j),
                static_cast<unsigned long long>(h.mult));
  }
  for (double lambda = 0.0; lambda >= -8.0; lambda -= 0.5) {
    auto const P = hardy::ProblemParams::critical(N, lambda);
    std::printf("lambda %6.2f  m = %llu\n", lambda,
                static_cast<unsigned long long>(hardy::closedform::morse_index_critical(P)));
  }
}
