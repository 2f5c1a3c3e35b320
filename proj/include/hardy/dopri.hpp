#pragma once
// Dormand–Prince 5(4) embedded Runge–Kutta stepping with a quintic Hermite
// interpolant over accepted steps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "hardy/errors.hpp"

namespace hardy::ode {

template <std::size_t Dim>
using State = std::array<double, Dim>;

struct StepControl {
  double atol = 1e-12;
  double rtol = 1e-12;
  double max_step = 1e-2;
  double min_step_rel = 1e-14;  // step underflow relative to |t|
  long max_steps = 10'000'000;
};

template <std::size_t Dim>
struct Knot {
  double t;
  State<Dim> y;
  State<Dim> dy;  // f(t, y)
};

namespace detail {

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// One trial step; returns the 5th-order solution and the scaled error norm (<= 1 accepts).
template <std::size_t Dim, class F>
State<Dim> dopri_trial(F const& f, double t, State<Dim> const& y, State<Dim> const& k1, double h,
                       StepControl const& ctl, State<Dim>& k7, double& err) {
  using namespace detail;
  State<Dim> tmp, k2, k3, k4, k5, k6, out;
  for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  k2 = f(t + c2 * h, tmp);
  for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  k3 = f(t + c3 * h, tmp);
  for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  k4 = f(t + c4 * h, tmp);
  for (std::size_t i = 0; i < Dim; ++i) {
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  }
  k5 = f(t + c5 * h, tmp);
  for (std::size_t i = 0; i < Dim; ++i) {
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  }
  k6 = f(t + h, tmp);
  for (std::size_t i = 0; i < Dim; ++i) {
    out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  }
  k7 = f(t + h, out);
  err = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) {
    double const est =
        h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double const sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(out[i]));
    err = std::max(err, std::abs(est) / sc);
  }
  return out;
}

/// Adaptive integrator that records every accepted step.
template <std::size_t Dim, class F>
class Integrator {
 public:
  Integrator(F f, StepControl ctl) : f_(std::move(f)), ctl_(ctl) {}

  /// Advances from `from` to exactly `t_end`. `h` carries the step-size
  /// suggestion in and out. `stop(knot)` returning true ends integration early
  /// after that accepted step.
  template <class Stop>
  Knot<Dim> advance(Knot<Dim> from, double t_end, double& h, std::vector<Knot<Dim>>* path,
                    Stop const& stop) const {
    long steps = 0;
    Knot<Dim> cur = from;
    while (cur.t < t_end) {
      if (++steps > ctl_.max_steps) throw SolverError("ode: step budget exhausted");
      h = std::min(h, ctl_.max_step);
      bool const last = (t_end - cur.t) <= h;
      if (last) {
        h = t_end - cur.t;
      } else if (h < ctl_.min_step_rel * std::max(1.0, std::abs(cur.t))) {
        std::ostringstream os;
        os << "ode: step size underflow at t = " << cur.t;
        throw SolverError(os.str());
      }
      State<Dim> k7;
      double err = 0.0;
      State<Dim> const y = dopri_trial<Dim>(f_, cur.t, cur.y, cur.dy, h, ctl_, k7, err);
      if (!(err <= 1.0)) {
        double const fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h *= fac;
        continue;
      }
      double const t_new = last ? t_end : cur.t + h;
      cur = Knot<Dim>{t_new, y, k7};
      if (path) path->push_back(cur);
      double const fac = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
      h *= fac;
      if (stop(cur)) break;
    }
    return cur;
  }

  Knot<Dim> advance(Knot<Dim> from, double t_end, double& h, std::vector<Knot<Dim>>* path) const {
    return advance(from, t_end, h, path, [](Knot<Dim> const&) { return false; });
  }

  Knot<Dim> make_knot(double t, State<Dim> const& y) const { return Knot<Dim>{t, y, f_(t, y)}; }

 private:
  F f_;
  StepControl ctl_;
};

/// Quintic Hermite data for a scalar second-order ODE sampled at knots:
/// value, first and second derivative at each end.
struct HermiteKnot {
  double t, y, dy, d2y;
};

/// Value and first derivative of the quintic Hermite interpolant on [k0, k1].
inline std::array<double, 2> hermite5(HermiteKnot const& k0, HermiteKnot const& k1, double t) {
  double const h = k1.t - k0.t;
  double const s = (t - k0.t) / h;
  double const s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  double const H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  double const H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  double const H2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  double const H3 = 10 * s3 - 15 * s4 + 6 * s5;
  double const H4 = -4 * s3 + 7 * s4 - 3 * s5;
  double const H5 = 0.5 * s3 - s4 + 0.5 * s5;
  double const D0 = -30 * s2 + 60 * s3 - 30 * s4;
  double const D1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  double const D2 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
  double const D3 = 30 * s2 - 60 * s3 + 30 * s4;
  double const D4 = -12 * s2 + 28 * s3 - 15 * s4;
  double const D5 = 1.5 * s2 - 4 * s3 + 2.5 * s4;
  double const y = k0.y * H0 + h * k0.dy * H1 + h * h * k0.d2y * H2 + k1.y * H3 + h * k1.dy * H4 +
                   h * h * k1.d2y * H5;
  double const dy = (k0.y * D0 + h * k0.dy * D1 + h * h * k0.d2y * D2 + k1.y * D3 +
                     h * k1.dy * D4 + h * h * k1.d2y * D5) /
                    h;
  return {y, dy};
}

}  // namespace hardy::ode
