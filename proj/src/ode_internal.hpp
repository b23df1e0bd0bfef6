#ifndef RSIR_ODE_INTERNAL_HPP
#define RSIR_ODE_INTERNAL_HPP

#include <algorithm>
#include <cmath>
#include <functional>

namespace rsir::detail {

inline double rk4_step(const std::function<double(double, double)>& g, double t,
                       double x, double dt) {
  const double k1 = g(t, x);
  const double k2 = g(t + 0.5 * dt, x + 0.5 * dt * k1);
  const double k3 = g(t + 0.5 * dt, x + 0.5 * dt * k2);
  const double k4 = g(t + dt, x + dt * k3);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrate dx/dt = g to exactly t_end (either direction), fixed step dt
// with a shorter final step.
inline double integrate_to(const std::function<double(double, double)>& g,
                           double t0, double x0, double t_end, double dt) {
  double t = t0, x = x0;
  const double dir = t_end >= t0 ? 1.0 : -1.0;
  while (dir * (t_end - t) > 1e-14 * std::max(1.0, std::abs(t_end))) {
    double step = std::min(dt, dir * (t_end - t)) * dir;
    x = rk4_step(g, t, x, step);
    t += step;
  }
  return x;
}

// Entry time of the backward characteristic through (t, x) on x = 0,
// relative to the window start t0: bisection on s -> X(t; s, 0) - x.
inline double entry_time_window(const std::function<double(double, double)>& g,
                                double t0, double t, double x, double dt) {
  double lo = t0, hi = t;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    double val = integrate_to(g, mid, 0.0, t, dt) - x;
    if (val > 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rsir::detail

#endif
