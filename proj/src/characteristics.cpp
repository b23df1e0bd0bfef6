#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ode_internal.hpp"
#include "rsir/scalar_renewal.hpp"

namespace rsir {

double CharacteristicTrace::position_at(double t) const {
  if (times.empty()) throw std::invalid_argument("empty trace");
  if (t <= times.front()) return positions.front();
  if (t >= times.back()) return positions.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  double w = (t - times[i]) / (times[i + 1] - times[i]);
  return (1.0 - w) * positions[i] + w * positions[i + 1];
}

CharacteristicTrace trace_forward(const Coefficients& c, double t0, double x0,
                                  double t_end, double dt, double age_max) {
  if (t_end < t0) throw std::invalid_argument("trace_forward: t_end < t0");
  if (dt <= 0) throw std::invalid_argument("trace_forward: dt must be positive");
  CharacteristicTrace tr;
  tr.t0 = t0;
  tr.x0 = x0;
  double t = t0, x = x0;
  tr.times.push_back(t);
  tr.positions.push_back(x);
  while (t < t_end - 1e-14 * std::max(1.0, std::abs(t_end))) {
    double step = std::min(dt, t_end - t);
    double xn = c.unit_speed ? x + step : detail::rk4_step(c.g, t, x, step);
    t += step;
    tr.times.push_back(t);
    tr.positions.push_back(xn);
    if (xn > age_max) {
      tr.truncated = true;
      break;
    }
    x = xn;
  }
  return tr;
}

double sigma_curve(const Coefficients& c, double t, double dt, double) {
  if (c.unit_speed) return t;
  return detail::integrate_to(c.g, 0.0, 0.0, t, dt);
}

double trace_backward_entry_time(const Coefficients& c, double t, double x,
                                 double dt, double age_max) {
  const double sig = sigma_curve(c, t, dt, age_max);
  const double tol = 1e-12 * std::max(1.0, std::abs(sig));
  if (x >= sig - tol)
    throw std::domain_error(
        "trace_backward_entry_time: point lies in the datum-influenced region");
  if (c.unit_speed) return t - x;
  return detail::entry_time_window(c.g, 0.0, t, x, dt);
}

double exponential_weight(const Coefficients& c, double tau, double t, double x,
                          double dt, double) {
  if (tau > t) throw std::invalid_argument("exponential_weight: tau must be <= t");
  if (tau == t) return 1.0;
  std::vector<double> ts{t}, xs{x};
  double tt = t, xx = x;
  while (tt > tau + 1e-14 * std::max(1.0, std::abs(t))) {
    double step = std::min(dt, tt - tau);
    xx = c.unit_speed ? xx - step : detail::rk4_step(c.g, tt, xx, -step);
    tt -= step;
    ts.push_back(tt);
    xs.push_back(xx);
  }
  double acc = 0.0;
  auto mu = [&](double s, double y) {
    y = std::max(y, 0.0);  // coefficients live on the age half-line
    return c.m(s, y) + (c.unit_speed ? 0.0 : c.dg_dx(s, y));
  };
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    double w = 0.5 * (ts[i] - ts[i + 1]);
    acc += w * (mu(ts[i], xs[i]) + mu(ts[i + 1], xs[i + 1]));
  }
  return std::exp(-acc);
}

}  // namespace rsir
