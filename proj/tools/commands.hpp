#pragma once
// Subcommand bodies of the `hardy` tool. Each writes its main output to `out`
// and returns the process exit code; library errors propagate to the caller.

#include <cstdint>
#include <cstdio>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "canonical_json.hpp"
#include "hardy/bifurcation.hpp"
#include "hardy/closedform.hpp"
#include "hardy/params.hpp"
#include "hardy/radial_ode.hpp"
#include "hardy/transform.hpp"
#include "hardy/verify.hpp"

namespace hardy::cli {

enum Exit : int {
  ok = 0,
  verification_failed = 1,
  bad_parameters = 2,
  solver_failed = 3,
  incomplete_scan = 4,
};

struct ParamFlags {
  int N = 0;
  std::optional<double> p;
  bool critical = false;
  double lambda = 0.0;

  double exponent() const {
    if (N < 3) throw ParameterError("N must be >= 3");
    if (critical) {
      double const pc = critical_exponent(N);
      if (p && std::abs(*p - pc) > 1e-12 * pc) {
        throw ParameterError("--critical conflicts with --p (critical exponent is " +
                             io::format_double(pc) + ")");
      }
      return pc;
    }
    if (!p) throw ParameterError("one of --p or --critical is required");
    return *p;
  }

  ProblemParams make() const { return ProblemParams(N, exponent(), lambda); }
};

namespace detail {

inline std::string csv_field(std::string const& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += (c == '\n') ? ' ' : c;
  }
  return q + "\"";
}

inline io::json params_json(ProblemParams const& P) {
  io::json j;
  j["N"] = P.N();
  j["p"] = P.p();
  j["lambda"] = P.lambda();
  j["critical"] = P.is_critical();
  return j;
}

}  // namespace detail

inline int cmd_params(ParamFlags const& f, std::ostream& out) {
  ProblemParams const P = f.make();
  TransformCoeffs const C = transform_coeffs(P);
  io::json j = detail::params_json(P);
  j["nu"] = C.nu;
  j["a"] = C.a;
  j["b"] = C.b;
  j["M"] = C.M;
  j["A"] = C.A;
  j["D"] = C.D;
  if (P.is_critical()) j["C_lambda"] = c_lambda(P);
  out << io::to_canonical(j);
  return ok;
}

inline int cmd_critical_spectrum(int N, int j_max, std::ostream& out) {
  if (N < 3) throw ParameterError("N must be >= 3");
  if (j_max < 0) throw ParameterError("--j-max must be >= 0");
  out << "# degeneracy values of the critical problem, N = " << N << "\n"
      << "# morse_below: Morse index for lambda slightly above lambda_j\n"
      << "# morse_above: Morse index for lambda slightly below lambda_j\n"
      << "j,lambda_j,mu_j,mult,morse_below,morse_above,note\n";
  std::uint64_t below = 0;
  for (int j = 0; j <= j_max; ++j) {
    closedform::HarmonicData const h = closedform::harmonic_data(N, j);
    std::uint64_t const above = below + h.mult;
    out << j << ',' << io::format_double(closedform::lambda_j(N, j)) << ',' << h.mu << ','
        << h.mult << ',' << below << ',' << above << ','
        << (j == 0 ? "radial kernel Z_lambda exists for all lambda" : "") << "\n";
    below = above;
  }
  return ok;
}

struct RadialFlags {
  ParamFlags params;
  std::size_t grid = 4096;
};

/// CSV (r, v, u) on a log grid of [1e-4, 1]; returns the sidecar object.
inline io::json cmd_radial(RadialFlags const& f, std::ostream& csv) {
  ProblemParams const P = f.params.make();
  if (P.is_critical()) throw ParameterError("radial: p must be subcritical");
  TransformCoeffs const C = transform_coeffs(P);
  radial::RadialProfile const v = radial::solve_vlambda(P);
  radial::RadialSolution const sol = radial::reconstruct_u(v, P);
  radial::OriginFit const fit = radial::origin_constant(sol);
  radial::RadialSolution const res_sol = radial::reconstruct_u(v, P, f.grid, 1e-3);
  double const residual = verify::residual_ode(res_sol.u, P, verify::Form::subcritical);
  radial::EnergyBalance const e = radial::energy_balance(v);

  RadialGrid const grid = make_grid(1e-4, 1.0, f.grid, Grading::log);
  csv << "# radial solution N = " << P.N() << ", p = " << io::format_double(P.p())
      << ", lambda = " << io::format_double(P.lambda()) << "\n"
      << "# v: transformed solution, u(r) = r^(-a/b) v(r^(1/b))\n"
      << "r,v,u\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double const r = grid[i];
    csv << io::format_double(r) << ',' << io::format_double(v.value(r)) << ','
        << io::format_double(sol.u_at(r)) << "\n";
  }

  io::json j = detail::params_json(P);
  j["alpha"] = v.alpha();
  j["origin_slope"] = fit.slope;
  j["origin_slope_expected"] = -C.a / C.b;
  j["origin_C"] = fit.C;
  j["residual"] = residual;
  j["residual_transformed"] = verify::residual_transformed(v);
  j["energy_gap"] = e.rel_gap;
  j["first_zero"] = v.first_zero();
  j["M"] = C.M;
  j["A"] = C.A;
  j["grid"] = f.grid;
  return j;
}

struct BifurcateFlags {
  ParamFlags params;
  int k_min = 1;
  int k_max = 3;
  std::size_t mesh = 2000;
  std::size_t scan_n = 200;
};

inline int cmd_bifurcate(BifurcateFlags const& f, std::ostream& out) {
  ProblemParams const P = f.params.make();
  if (P.is_critical()) throw ParameterError("bifurcate: p must be subcritical");
  if (f.k_min < 1 || f.k_max < f.k_min) throw ParameterError("--k-range must satisfy 1 <= k_min <= k_max");
  bifurcation::LCache const cache(P.N(), P.p(), f.mesh);

  auto solve = [&](int k) {
    io::json r;
    r["k"] = k;
    try {
      double lo = bifurcation::default_lambda_lo(P.N(), k);
      std::optional<bifurcation::BifurcationPoint> bp;
      for (int attempt = 0; !bp; ++attempt) {
        try {
          bp = bifurcation::find_lambda_k(cache, k, lo, f.scan_n);
        } catch (RangeError const&) {
          if (attempt == 3) throw;
          lo *= 2.0;
        }
      }
      bifurcation::SignConditions const s = bifurcation::check_signs(*bp, P.N());
      if (!s.all()) throw SolverError("bracket sign conditions do not hold");
      r["lambda_k"] = bp->lambda_k;
      r["alpha_k"] = bp->bracket.alpha;
      r["beta_k"] = bp->bracket.beta;
      r["L_lambda_k"] = bp->L_at_lambda_k;
      r["L_alpha"] = bp->L_alpha;
      r["L_beta"] = bp->L_beta;
      r["target"] = -16.0 * bifurcation::mu(P.N(), k);
      r["morse_before"] = bp->morse_before;
      r["morse_after"] = bp->morse_after;
      r["mult"] = bp->mult;
      r["predicted_branches"] = bp->predicted_branches;
      r["lambda_lo"] = bp->lambda_lo;
      io::json others = io::json::array();
      for (auto const& b : bp->other_sign_changes) others.push_back({b.alpha, b.beta});
      r["other_sign_changes"] = others;
    } catch (std::exception const& e) {
      r["error"] = e.what();
    }
    return r;
  };

  std::vector<std::future<io::json>> jobs;
  for (int k = f.k_min; k <= f.k_max; ++k) jobs.push_back(std::async(std::launch::async, solve, k));
  io::json list = io::json::array();
  bool complete = true;
  for (auto& j : jobs) {
    io::json r = j.get();
    if (r.contains("error")) complete = false;
    list.push_back(std::move(r));
  }
  out << io::to_canonical(list);
  return complete ? ok : incomplete_scan;
}

struct VerifyFlags {
  ParamFlags params;
  verify::Options options;
};

inline int cmd_verify(VerifyFlags const& f, std::ostream& out) {
  ProblemParams const P = f.params.make();
  verify::VerificationReport const rep = verify::run_all(P, f.options);
  io::json j;
  j["params"] = detail::params_json(P);
  j["regime"] = rep.regime;
  j["convention"] = rep.convention;
  j["grid"] = {{"n", rep.grid_n}, {"r_min", rep.grid_r_min}, {"r_max", rep.grid_r_max}};
  io::json checks = io::json::array();
  for (auto const& c : rep.checks) {
    io::json cj;
    cj["name"] = c.name;
    cj["lhs"] = c.lhs;
    cj["rhs"] = c.rhs;
    cj["rel_gap"] = c.rel_gap;
    cj["tolerance"] = c.tolerance;
    cj["pass"] = c.pass;
    if (!c.error.empty()) cj["error"] = c.error;
    checks.push_back(std::move(cj));
  }
  j["checks"] = checks;
  j["all_pass"] = rep.all_pass();
  out << io::to_canonical(j);
  return rep.all_pass() ? ok : verification_failed;
}

struct LambdaRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;

  std::vector<double> values() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return xs;
  }
};

/// "lo:hi:n" with lo <= hi and n >= 1.
inline LambdaRange parse_lambda_range(std::string const& s) {
  LambdaRange r;
  std::istringstream in(s);
  char c1 = 0, c2 = 0;
  long long n = 0;
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> n) || c1 != ':' || c2 != ':' || !in.eof() || n < 1 ||
      r.hi < r.lo) {
    throw ParameterError("--lambda-range must be lo:hi:n with lo <= hi and n >= 1, got '" + s + "'");
  }
  r.n = static_cast<std::size_t>(n);
  return r;
}

struct DiagramFlags {
  ParamFlags params;
  std::string lambda_range;
  std::size_t mesh = 2000;
};

inline int cmd_diagram(DiagramFlags const& f, std::ostream& out) {
  LambdaRange const range = parse_lambda_range(f.lambda_range);
  double const p = f.params.exponent();
  std::vector<double> const lambdas = range.values();
  for (double l : lambdas) ProblemParams(f.params.N, p, l);  // validates every row up front
  std::vector<bifurcation::DiagramRow> const rows =
      bifurcation::sweep_diagram(f.params.N, p, lambdas, f.mesh);
  bool const critical = ProblemParams(f.params.N, p, lambdas.front()).is_critical();
  out << "# bifurcation diagram N = " << f.params.N << ", p = " << io::format_double(p) << "\n"
      << "# columns: lambda, nu, b, M, A, Lambda (first weighted eigenvalue"
      << (critical ? "; 1-N in the critical case" : "") << "), L = 16 Lambda / b^2, morse, "
      << "degenerate (threshold on an integer), error\n"
      << "lambda,nu,b,M,A,Lambda,L,morse,degenerate,error\n";
  for (auto const& r : rows) {
    if (!r.error.empty()) {
      out << io::format_double(r.lambda) << ",,,,,,,,," << detail::csv_field(r.error) << "\n";
      continue;
    }
    out << io::format_double(r.lambda) << ',' << io::format_double(r.nu) << ','
        << io::format_double(r.b) << ',' << io::format_double(r.M) << ','
        << io::format_double(r.A) << ',' << io::format_double(r.Lam) << ','
        << io::format_double(r.L) << ',' << r.morse << ',' << (r.degenerate ? 1 : 0) << ",\n";
  }
  return ok;
}

}  // namespace hardy::cli
