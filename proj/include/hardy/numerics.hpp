#pragma once
// Radial grids, weighted quadrature, finite differences and a symmetric
// tridiagonal generalized eigensolver (Sturm bisection + inverse iteration).

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hardy/errors.hpp"

namespace hardy {

enum class Grading {
  uniform,  // equal spacing
  log,      // geometric: constant node ratio
  power,    // r_min + (r_max - r_min) * t^exponent, clusters nodes near r_min
  custom    // arbitrary strictly increasing nodes
};

inline const char* to_string(Grading g) {
  switch (g) {
    case Grading::uniform: return "uniform";
    case Grading::log: return "log";
    case Grading::power: return "power";
    case Grading::custom: return "custom";
  }
  return "?";
}

/// Strictly increasing radii in (0, r_max].
class RadialGrid {
 public:
  static constexpr std::size_t min_nodes = 16;

  RadialGrid() = default;

  explicit RadialGrid(std::vector<double> nodes, Grading grading = Grading::custom,
                      double exponent = 1.0)
      : nodes_(std::move(nodes)), grading_(grading), exponent_(exponent) {
    if (nodes_.size() < min_nodes) {
      throw ParameterError("radial grid needs at least 16 nodes, got " +
                           std::to_string(nodes_.size()));
    }
    if (!(nodes_.front() > 0.0)) throw ParameterError("radial grid: r_min must be > 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i])) {
        throw ParameterError("radial grid nodes must be finite and strictly increasing");
      }
    }
  }

  std::span<const double> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double r_min() const { return nodes_.front(); }
  double r_max() const { return nodes_.back(); }
  Grading grading() const { return grading_; }
  double exponent() const { return exponent_; }

  /// Largest ratio of consecutive spacings (>= 1 means growing spacing).
  double max_spacing_ratio() const {
    double worst = 1.0;
    for (std::size_t i = 2; i < nodes_.size(); ++i) {
      double const h0 = nodes_[i - 1] - nodes_[i - 2];
      double const h1 = nodes_[i] - nodes_[i - 1];
      worst = std::max(worst, std::max(h1 / h0, h0 / h1));
    }
    return worst;
  }

 private:
  std::vector<double> nodes_;
  Grading grading_ = Grading::custom;
  double exponent_ = 1.0;
};

/// Builds a grid with first node r_min and last node r_max.
/// `exponent` is only used by Grading::power.
inline RadialGrid make_grid(double r_min, double r_max, std::size_t n, Grading grading,
                            double exponent = 2.0) {
  if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max)) {
    throw ParameterError("make_grid: need 0 < r_min < r_max");
  }
  if (n < RadialGrid::min_nodes) throw ParameterError("make_grid: need n >= 16");
  std::vector<double> x(n);
  double const last = static_cast<double>(n - 1);
  switch (grading) {
    case Grading::uniform: {
      double const h = (r_max - r_min) / last;
      for (std::size_t i = 0; i < n; ++i) x[i] = r_min + h * static_cast<double>(i);
      break;
    }
    case Grading::log: {
      double const l0 = std::log(r_min);
      double const dl = (std::log(r_max) - l0) / last;
      for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(l0 + dl * static_cast<double>(i));
      break;
    }
    case Grading::power: {
      if (!(exponent >= 1.0)) throw ParameterError("make_grid: power exponent must be >= 1");
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = r_min + (r_max - r_min) * std::pow(static_cast<double>(i) / last, exponent);
      }
      break;
    }
    case Grading::custom:
      throw ParameterError("make_grid: custom grading needs explicit nodes");
  }
  x.front() = r_min;
  x.back() = r_max;
  return RadialGrid(std::move(x), grading, exponent);
}

/// A radial function sampled on a RadialGrid. Values are always finite.
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(RadialGrid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw ParameterError("grid function: value count does not match node count");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw NumericError("grid function: non-finite value");
    }
  }

  template <class F>
  static GridFunction sample(RadialGrid const& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return GridFunction(grid, std::move(v));
  }

  RadialGrid const& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double node(std::size_t i) const { return grid_[i]; }

  GridFunction scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return GridFunction(grid_, std::move(v));
  }

 private:
  RadialGrid grid_;
  std::vector<double> values_;
};

namespace detail {

inline std::vector<double> weighted_integrand(GridFunction const& f, double w) {
  auto const r = f.grid().nodes();
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = f[i] * std::pow(r[i], w);
    if (!std::isfinite(g[i])) {
      throw NumericError("quadrature: non-finite integrand at r = " + std::to_string(r[i]));
    }
  }
  return g;
}

inline double trapezoid(std::span<const double> r, std::span<const double> g) {
  double s = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) s += 0.5 * (r[i] - r[i - 1]) * (g[i] + g[i - 1]);
  return s;
}

// Local power-law exponent of g between nodes i and j, or NaN if undefined.
inline double local_exponent(std::span<const double> r, std::span<const double> g,
                             std::size_t i, std::size_t j) {
  if (g[i] == 0.0 || g[j] == 0.0 || (g[i] > 0.0) != (g[j] > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::log(g[j] / g[i]) / std::log(r[j] / r[i]);
}

}  // namespace detail

/// Composite trapezoid approximation of the integral of f(r) r^w over [r_min, r_max].
inline double quad_weighted(GridFunction const& f, double w) {
  auto const g = detail::weighted_integrand(f, w);
  return detail::trapezoid(f.grid().nodes(), g);
}

/// quad_weighted plus power-law corrections for (0, r_min) and (r_max, inf).
/// The local exponent k of the integrand is read off the two end nodes; the head
/// is added when k > -1, the tail when k < -1. A tail with k >= -1 whose size is
/// not negligible is a TruncationError.
inline double quad_weighted_extended(GridFunction const& f, double w) {
  auto const r = f.grid().nodes();
  auto const g = detail::weighted_integrand(f, w);
  double s = detail::trapezoid(r, g);
  std::size_t const n = r.size();

  double const k0 = detail::local_exponent(r, g, 0, 1);
  if (std::isfinite(k0) && k0 > -1.0) s += g[0] * r[0] / (k0 + 1.0);

  double const k1 = detail::local_exponent(r, g, n - 2, n - 1);
  if (std::isfinite(k1)) {
    double const edge = g[n - 1] * r[n - 1];
    if (k1 < -1.0) {
      s += -edge / (k1 + 1.0);
    } else if (std::abs(edge) > 1e-10 * std::abs(s)) {
      std::ostringstream os;
      os << "quadrature: integrand tail exponent " << k1 << " >= -1 at r = " << r[n - 1];
      throw TruncationError(os.str());
    }
  }
  return s;
}

/// Throws TruncationError when the per-log-unit density |f r^w| r at the last
/// node is not smaller than one decade earlier and is not negligible.
inline void check_tail_decay(GridFunction const& f, double w, char const* what = "integrand") {
  auto const r = f.grid().nodes();
  auto const g = detail::weighted_integrand(f, w);
  std::size_t const n = r.size();
  double const r_last = r[n - 1];
  std::size_t j = n - 1;
  while (j > 0 && r[j] > r_last / 10.0) --j;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(g[i]) * r[i]);
  double const end = std::abs(g[n - 1]) * r_last;
  double const earlier = std::abs(g[j]) * r[j];
  if (end > 1e-12 * scale && end >= earlier) {
    std::ostringstream os;
    os << what << " not decaying over the last decade of the grid (r_max = " << r_last << ")";
    throw TruncationError(os.str());
  }
}

/// Three-point nonuniform-grid first derivative; second-order one-sided stencils at both ends.
inline GridFunction derivative(GridFunction const& f) {
  auto const x = f.grid().nodes();
  auto const y = f.values();
  std::size_t const n = x.size();
  if (n < 3) throw ParameterError("derivative: need at least 3 nodes");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double const h1 = x[i] - x[i - 1];
    double const h2 = x[i + 1] - x[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] +
           h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  {
    double const h1 = x[1] - x[0];
    double const h2 = x[2] - x[1];
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] -
           h1 / (h2 * (h1 + h2)) * y[2];
  }
  {
    double const h1 = x[n - 2] - x[n - 3];
    double const h2 = x[n - 1] - x[n - 2];
    d[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2] +
               (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * y[n - 1];
  }
  return GridFunction(f.grid(), std::move(d));
}

/// Three-point nonuniform second derivative. The end nodes repeat the value of
/// their neighbour; only interior values are meant for residuals.
inline GridFunction second_derivative(GridFunction const& f) {
  auto const x = f.grid().nodes();
  auto const y = f.values();
  std::size_t const n = x.size();
  if (n < 3) throw ParameterError("second_derivative: need at least 3 nodes");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double const h1 = x[i] - x[i - 1];
    double const h2 = x[i + 1] - x[i];
    d[i] = 2.0 * ((y[i + 1] - y[i]) / h2 - (y[i] - y[i - 1]) / h1) / (h1 + h2);
  }
  d[0] = d[1];
  d[n - 1] = d[n - 2];
  return GridFunction(f.grid(), std::move(d));
}

/// K x = Lambda B x with K symmetric tridiagonal and B diagonal positive.
struct TridiagonalPencil {
  std::vector<double> diag_K;
  std::vector<double> offdiag_K;  // size n - 1
  std::vector<double> diag_B;

  std::size_t size() const { return diag_K.size(); }

  void validate() const {
    std::size_t const n = diag_K.size();
    if (n == 0) throw ParameterError("pencil: empty");
    if (diag_B.size() != n || offdiag_K.size() + 1 != n) {
      throw ParameterError("pencil: inconsistent sizes");
    }
    for (double b : diag_B) {
      if (!(b > 0.0) || !std::isfinite(b)) throw ParameterError("pencil: B must be positive definite");
    }
    for (double k : diag_K) {
      if (!std::isfinite(k)) throw NumericError("pencil: non-finite K");
    }
    for (double k : offdiag_K) {
      if (!std::isfinite(k)) throw NumericError("pencil: non-finite K");
    }
  }
};

struct EigResult {
  double value = 0.0;
  std::vector<double> vector;  // B-normalized
};

struct EigCount {
  std::size_t count = 0;
  bool perturbed = false;  // threshold coincided with an eigenvalue and was nudged down
};

namespace detail {

// Standard symmetric tridiagonal C = B^{-1/2} K B^{-1/2}.
struct ScaledTridiagonal {
  std::vector<double> c;
  std::vector<double> e;
  double pivmin = 0.0;
  double gersh_lo = 0.0;
  double gersh_hi = 0.0;

  explicit ScaledTridiagonal(TridiagonalPencil const& P) {
    P.validate();
    std::size_t const n = P.size();
    c.resize(n);
    e.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) c[i] = P.diag_K[i] / P.diag_B[i];
    double emax = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      e[i] = P.offdiag_K[i] / std::sqrt(P.diag_B[i] * P.diag_B[i + 1]);
      emax = std::max(emax, e[i] * e[i]);
    }
    pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax);
    gersh_lo = std::numeric_limits<double>::infinity();
    gersh_hi = -gersh_lo;
    for (std::size_t i = 0; i < n; ++i) {
      double rad = 0.0;
      if (i > 0) rad += std::abs(e[i - 1]);
      if (i + 1 < n) rad += std::abs(e[i]);
      gersh_lo = std::min(gersh_lo, c[i] - rad);
      gersh_hi = std::max(gersh_hi, c[i] + rad);
    }
  }

  // Number of eigenvalues strictly below t (negative pivots of LDL^T of C - tI).
  std::size_t count_below(double t) const {
    std::size_t neg = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      double const off = (i == 0) ? 0.0 : e[i - 1] * e[i - 1] / d;
      d = c[i] - t - off;
      if (std::abs(d) < pivmin) d = -pivmin;
      if (d < 0.0) ++neg;
    }
    return neg;
  }
};

// Solves (C - sigma I) y = rhs for symmetric tridiagonal C by Gaussian
// elimination with partial pivoting (one extra superdiagonal of fill).
inline std::vector<double> shifted_solve(ScaledTridiagonal const& T, double sigma,
                                         std::vector<double> rhs) {
  std::size_t const n = T.c.size();
  double const tiny = std::numeric_limits<double>::epsilon() *
                      std::max({std::abs(T.gersh_lo), std::abs(T.gersh_hi), 1e-300});
  if (n == 1) {
    double d = T.c[0] - sigma;
    if (std::abs(d) < tiny) d = tiny;
    rhs[0] /= d;
    return rhs;
  }
  std::vector<double> dg(n), up(n, 0.0), up2(n, 0.0), lo(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) dg[i] = T.c[i] - sigma;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    up[i] = T.e[i];
    lo[i] = T.e[i];
  }
  // Row i holds (dg[i], up[i], up2[i]) after elimination; lo[i] is the subdiagonal below row i.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(lo[i]) > std::abs(dg[i])) {
      // swap rows i and i+1
      std::swap(dg[i], lo[i]);
      double const a = up[i];
      up[i] = dg[i + 1];
      dg[i + 1] = a;
      double const b = up2[i];
      up2[i] = (i + 1 < n - 1) ? up[i + 1] : 0.0;
      if (i + 1 < n - 1) up[i + 1] = b;
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (std::abs(dg[i]) < tiny) dg[i] = tiny;
    double const m = lo[i] / dg[i];
    dg[i + 1] -= m * up[i];
    if (i + 1 < n - 1) up[i + 1] -= m * up2[i];
    rhs[i + 1] -= m * rhs[i];
  }
  if (std::abs(dg[n - 1]) < tiny) dg[n - 1] = tiny;
  rhs[n - 1] /= dg[n - 1];
  rhs[n - 2] = (rhs[n - 2] - up[n - 2] * rhs[n - 1]) / dg[n - 2];
  for (std::size_t k = n - 2; k-- > 0;) {
    rhs[k] = (rhs[k] - up[k] * rhs[k + 1] - up2[k] * rhs[k + 2]) / dg[k];
  }
  return rhs;
}

inline void normalize2(std::vector<double>& y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  s = std::sqrt(s);
  if (!(s > 0.0) || !std::isfinite(s)) throw SolverError("inverse iteration: degenerate iterate");
  for (double& v : y) v /= s;
}

}  // namespace detail

/// Counts generalized eigenvalues of (K, B) strictly below `threshold`. When the
/// threshold lies within relative 1e-12 of an eigenvalue it is lowered by that
/// amount and `perturbed` is set.
inline EigCount eig_count_below(TridiagonalPencil const& P, double threshold) {
  detail::ScaledTridiagonal const T(P);
  double const scale = std::max({std::abs(threshold), std::abs(T.gersh_lo), std::abs(T.gersh_hi)});
  double const delta = 1e-12 * std::max(std::abs(threshold), 1e-3 * scale);
  std::size_t const below = T.count_below(threshold - delta);
  std::size_t const above = T.count_below(threshold + delta);
  if (below != above) return EigCount{below, true};
  return EigCount{T.count_below(threshold), false};
}

/// Smallest generalized eigenvalue of (K, B) and its B-normalized eigenvector.
/// The sign is fixed so that the first non-negligible component is positive.
inline EigResult solve_smallest_eig(TridiagonalPencil const& P, int max_iter = 400) {
  detail::ScaledTridiagonal const T(P);
  std::size_t const n = T.c.size();
  double lo = T.gersh_lo;
  double hi = T.gersh_hi;
  double const width0 = hi - lo;
  lo -= 1e-12 * std::abs(width0) + T.pivmin;
  hi += 1e-12 * std::abs(width0) + T.pivmin;
  int it = 0;
  for (; it < max_iter; ++it) {
    double const mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (T.count_below(mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (it == max_iter) {
    std::ostringstream os;
    os << "eigen bisection did not converge: bracket [" << lo << ", " << hi << "]";
    throw SolverError(os.str());
  }
  double const value = 0.5 * (lo + hi);

  std::vector<double> y(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) y[i] += 1e-3 * std::sin(1.0 + static_cast<double>(i));
  detail::normalize2(y);
  for (int k = 0; k < 4; ++k) {
    y = detail::shifted_solve(T, value, std::move(y));
    detail::normalize2(y);
  }
  std::vector<double> x(n);
  double xmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = y[i] / std::sqrt(P.diag_B[i]);
    xmax = std::max(xmax, std::abs(y[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(y[i]) > 1e-8 * xmax) {
      if (x[i] < 0.0) {
        for (double& v : x) v = -v;
      }
      break;
    }
  }
  return EigResult{value, std::move(x)};
}

}  // namespace hardy
