#pragma once
// Subcritical degeneracy values λ_k where Λ(λ) crosses -b(λ)^2 μ_k, their
// brackets and Morse indices, and the λ-sweep table.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hardy/closedform.hpp"
#include "hardy/errors.hpp"
#include "hardy/params.hpp"
#include "hardy/radial_ode.hpp"
#include "hardy/spectral.hpp"

namespace hardy::bifurcation {

struct LEvaluation {
  double lambda = 0.0;
  double Lam = 0.0;      // Λ(λ)
  double b = 1.0;
  double bracket = 4.0;  // (p-1)(2-N+√((N-2)^2-4λ)) + 4
  double L = 0.0;        // Λ · bracket^2
};

/// (p-1)(2-N+√((N-2)^2-4λ)) + 4.
inline double printed_bracket(int N, double p, double lambda) {
  double const d = static_cast<double>(N - 2);
  return (p - 1.0) * (-d + std::sqrt(d * d - 4.0 * lambda)) + 4.0;
}

/// Memoized λ -> L(λ) for fixed (N, p). Safe for concurrent use.
class LCache {
 public:
  LCache(int N, double p, std::size_t mesh_n = 2000, radial::ShootingConfig cfg = {})
      : N_(N), p_(p), mesh_n_(mesh_n), cfg_(cfg) {
    ProblemParams const probe(N, p, -1.0);
    if (probe.is_critical()) throw PreconditionError("L(lambda): p must be subcritical");
  }

  int N() const { return N_; }
  double p() const { return p_; }
  std::size_t mesh_n() const { return mesh_n_; }

  LEvaluation operator()(double lambda) const {
    if (!(lambda < 0.0)) throw PreconditionError("L(lambda): need lambda < 0");
    {
      std::shared_lock lock(mu_);
      auto it = memo_.find(lambda);
      if (it != memo_.end()) return it->second;
    }
    LEvaluation const e = compute(lambda);
    std::unique_lock lock(mu_);
    return memo_.emplace(lambda, e).first->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return memo_.size();
  }

 private:
  LEvaluation compute(double lambda) const {
    ProblemParams const P(N_, p_, lambda);
    TransformCoeffs const C = transform_coeffs(P);
    radial::RadialProfile const v = radial::solve_vlambda(P, cfg_);
    spectral::EigenPair const e = spectral::lambda1(P, v, mesh_n_);
    LEvaluation out;
    out.lambda = lambda;
    out.Lam = e.value;
    out.b = C.b;
    out.bracket = printed_bracket(N_, p_, lambda);
    out.L = e.value * out.bracket * out.bracket;
    return out;
  }

  int N_;
  double p_;
  std::size_t mesh_n_;
  radial::ShootingConfig cfg_;
  mutable std::shared_mutex mu_;
  mutable std::map<double, LEvaluation> memo_;
};

/// Evaluates f over xs on worker threads; results keep the order of xs.
template <class F>
auto parallel_map(std::vector<double> const& xs, F const& f) {
  using R = decltype(f(xs.front()));
  std::size_t const workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  std::vector<std::optional<R>> out(xs.size());
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < xs.size(); i += workers) out[i].emplace(f(xs[i]));
    }));
  }
  for (auto& j : jobs) j.get();
  std::vector<R> res;
  res.reserve(out.size());
  for (auto& o : out) res.push_back(std::move(*o));
  return res;
}

/// Σ mult(j) over 0 <= j < (2-N)/2 + √((N-2)^2 - 4Λ/b^2)/2.
inline std::uint64_t morse_subcritical(ProblemParams const& P, double Lam) {
  if (!(Lam < 0.0)) throw PreconditionError("morse_subcritical: need Lambda < 0");
  double const d = P.dim() - 2.0;
  double const b = transform_coeffs(P).b;
  double const tau = -0.5 * d + 0.5 * std::sqrt(d * d - 4.0 * Lam / (b * b));
  return closedform::multiplicity_sum_below(P.N(), tau);
}

/// Σ mult(j) · #{eigenvalues of the pencil below -b^2 μ_j}.
inline std::uint64_t morse_from_pencil(TridiagonalPencil const& pencil, int N, double b) {
  std::uint64_t total = 0;
  for (int j = 0;; ++j) {
    closedform::HarmonicData const h = closedform::harmonic_data(N, j);
    std::size_t const c = eig_count_below(pencil, -b * b * static_cast<double>(h.mu)).count;
    if (c == 0) break;
    total += h.mult * c;
  }
  return total;
}

struct Bracket {
  double alpha = 0.0;  // g(alpha) < 0
  double beta = 0.0;   // g(beta) > 0
};

struct BifurcationPoint {
  int k = 1;
  double lambda_k = 0.0;
  double L_at_lambda_k = 0.0;
  Bracket bracket;
  double L_alpha = 0.0;
  double L_beta = 0.0;
  std::uint64_t morse_before = 0;  // at beta_k
  std::uint64_t morse_after = 0;   // at alpha_k
  std::uint64_t mult = 0;
  int predicted_branches = 1;
  double lambda_lo = 0.0;
  std::vector<Bracket> other_sign_changes;  // further left, not selected
};

inline double default_lambda_lo(int N, int k) {
  double const d = static_cast<double>(N - 2);
  double const kk = static_cast<double>(k + 1);
  return -4.0 * kk * kk * d * d;
}

/// μ_k = k(N-2+k) as a double.
inline double mu(int N, int k) {
  return static_cast<double>(closedform::harmonic_data(N, k).mu);
}

inline std::vector<double> scan_grid(double lambda_lo, std::size_t scan_n) {
  if (!(lambda_lo < -1e-3)) throw ParameterError("scan: lambda_lo must be below -1e-3");
  if (scan_n < 2) throw ParameterError("scan: need at least 2 points");
  std::vector<double> xs(scan_n);
  double const l0 = std::log(1e-3), l1 = std::log(-lambda_lo);
  for (std::size_t i = 0; i < scan_n; ++i) {
    double const t = static_cast<double>(i) / static_cast<double>(scan_n - 1);
    xs[i] = -std::exp(l0 + (l1 - l0) * t);
  }
  xs.front() = -1e-3;
  xs.back() = lambda_lo;
  return xs;  // from -1e-3 leftward
}

/// Rightmost sign change of L(λ) + 16 μ_k on [lambda_lo, -1e-3], refined by bisection to
/// width tol (tol = 0 selects 1e-7 |λ|).
inline BifurcationPoint find_lambda_k(LCache const& L, int k, double lambda_lo, std::size_t scan_n = 200,
                                      double tol = 0.0) {
  if (k < 1) throw ParameterError("find_lambda_k: k must be >= 1");
  int const N = L.N();
  double const target = -16.0 * mu(N, k);
  auto g = [&](double lam) { return L(lam).L - target; };

  std::vector<double> const xs = scan_grid(lambda_lo, scan_n);
  std::vector<double> const gs = parallel_map(xs, g);

  std::vector<Bracket> found;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (gs[i] > 0.0 && gs[i + 1] < 0.0) found.push_back(Bracket{xs[i + 1], xs[i]});
  }
  if (found.empty()) {
    std::ostringstream os;
    os << "find_lambda_k: no sign change of L + 16 mu_" << k << " on [" << lambda_lo
       << ", -1e-3]; use a deeper lambda_lo";
    throw RangeError(os.str());
  }
  Bracket br = found.front();
  if (tol == 0.0) tol = 1e-7 * std::abs(br.beta);
  if (!(tol >= 1e-8 * std::abs(br.beta))) {
    throw ParameterError("find_lambda_k: tol below 1e-8 |lambda| is under the noise floor");
  }
  double g_alpha = g(br.alpha), g_beta = g(br.beta);
  while (br.beta - br.alpha > tol) {
    double const mid = 0.5 * (br.alpha + br.beta);
    double const gm = g(mid);
    if (gm > 0.0) {
      br.beta = mid;
      g_beta = gm;
    } else {
      br.alpha = mid;
      g_alpha = gm;
    }
  }

  BifurcationPoint bp;
  bp.k = k;
  bp.lambda_lo = lambda_lo;
  bp.bracket = br;
  // linear interpolation inside the final bracket
  bp.lambda_k = br.beta - g_beta * (br.beta - br.alpha) / (g_beta - g_alpha);
  if (!(bp.lambda_k > br.alpha && bp.lambda_k < br.beta)) bp.lambda_k = 0.5 * (br.alpha + br.beta);
  bp.L_at_lambda_k = L(bp.lambda_k).L;
  LEvaluation const ea = L(br.alpha), eb = L(br.beta);
  bp.L_alpha = ea.L;
  bp.L_beta = eb.L;
  ProblemParams const Pa(N, L.p(), br.alpha), Pb(N, L.p(), br.beta);
  bp.morse_after = morse_subcritical(Pa, ea.Lam);
  bp.morse_before = morse_subcritical(Pb, eb.Lam);
  bp.mult = closedform::harmonic_data(N, k).mult;
  bp.predicted_branches = (k % 2 == 0) ? N / 2 : 1;
  bp.other_sign_changes.assign(found.begin() + 1, found.end());
  return bp;
}

/// find_lambda_k from the default depth, doubling lambda_lo on RangeError at most 3 times.
inline BifurcationPoint find_lambda_k(LCache const& L, int k) {
  double lo = default_lambda_lo(L.N(), k);
  for (int attempt = 0;; ++attempt) {
    try {
      return find_lambda_k(L, k, lo);
    } catch (RangeError const&) {
      if (attempt == 3) throw;
      lo *= 2.0;
    }
  }
}

struct SignConditions {
  bool alpha_below = false;     // L(α_k) + 16 μ_k < 0
  bool beta_above = false;      // L(β_k) + 16 μ_k > 0
  bool beta_exclusive = false;  // L(β_k) < -16 μ_h for all h < k
  bool alpha_exclusive = false; // L(α_k) > -16 μ_j for all j > k
  bool all() const { return alpha_below && beta_above && beta_exclusive && alpha_exclusive; }
};

inline SignConditions check_signs(BifurcationPoint const& bp, int N) {
  SignConditions s;
  double const t = -16.0 * mu(N, bp.k);
  s.alpha_below = bp.L_alpha < t;
  s.beta_above = bp.L_beta > t;
  // μ_h increases with h, so the nearest degrees are the binding ones
  s.beta_exclusive = bp.k == 1 || bp.L_beta < -16.0 * mu(N, bp.k - 1);
  s.alpha_exclusive = bp.L_alpha > -16.0 * mu(N, bp.k + 1);
  return s;
}

struct DiagramRow {
  double lambda = 0.0;
  double nu = 0.0, b = 0.0, M = 0.0, A = 0.0;
  double Lam = 0.0;  // subcritical Λ(λ); 1-N in the critical case
  double L = 0.0;
  std::uint64_t morse = 0;
  bool degenerate = false;  // threshold sits on an integer
  std::string error;
};

/// One row per λ (sorted ascending). Per-row failures are recorded in `error`.
inline std::vector<DiagramRow> sweep_diagram(int N, double p, std::vector<double> lambdas,
                                             std::size_t mesh_n = 2000) {
  std::sort(lambdas.begin(), lambdas.end());
  ProblemParams const probe(N, p, std::min(0.0, lambdas.empty() ? 0.0 : lambdas.front()));
  bool const critical = probe.is_critical();
  std::optional<LCache> cache;
  if (!critical) cache.emplace(N, p, mesh_n);

  auto row = [&](double lam) {
    DiagramRow r;
    r.lambda = lam;
    try {
      ProblemParams const P(N, p, lam);
      TransformCoeffs const C = transform_coeffs(P);
      r.nu = C.nu;
      r.b = C.b;
      r.M = C.M;
      r.A = C.A;
      double const d = P.dim() - 2.0;
      if (critical) {
        r.Lam = 1.0 - P.dim();
        r.L = 16.0 * r.Lam / (C.b * C.b);
        r.morse = closedform::morse_index_critical(P);
        double const tau = closedform::morse_threshold_critical(N, lam);
        r.degenerate = std::abs(tau - std::round(tau)) <= 1e-12 * std::max(1.0, std::abs(tau));
      } else {
        if (!(lam < 0.0)) throw PreconditionError("subcritical sweep needs lambda < 0");
        LEvaluation const e = (*cache)(lam);
        r.Lam = e.Lam;
        r.L = e.L;
        r.morse = morse_subcritical(P, e.Lam);
        double const tau = -0.5 * d + 0.5 * std::sqrt(d * d - 4.0 * e.Lam / (C.b * C.b));
        r.degenerate = std::abs(tau - std::round(tau)) <= 1e-12 * std::max(1.0, std::abs(tau));
      }
    } catch (std::exception const& ex) {
      r.error = ex.what();
    }
    return r;
  };
  return parallel_map(lambdas, row);
}

}  // namespace hardy::bifurcation
