#include "rsir/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsir {

namespace {
constexpr double kSnap = 1e-9;
double snap_tol(double t) { return kSnap * std::max(1.0, std::abs(t)); }
}  // namespace

TimeSeries::TimeSeries() : times_{0.0}, values_{0.0} {}

TimeSeries::TimeSeries(std::vector<double> times, std::vector<double> values, Mode mode)
    : times_(std::move(times)), values_(std::move(values)), mode_(mode) {
  if (times_.empty() || times_.size() != values_.size())
    throw std::invalid_argument("TimeSeries: need matching, non-empty breakpoints");
  for (std::size_t i = 0; i + 1 < times_.size(); ++i)
    if (times_[i + 1] <= times_[i])
      throw std::invalid_argument("TimeSeries: breakpoints must increase");
}

TimeSeries TimeSeries::constant(double v) {
  return TimeSeries({0.0}, {v}, Mode::PiecewiseConstant);
}

double TimeSeries::operator()(double t) const {
  // last piece index with times_[i] <= t (snapped); clamped outside
  std::size_t i = 0;
  while (i + 1 < times_.size() && t >= times_[i + 1] - snap_tol(t)) ++i;
  if (mode_ == Mode::PiecewiseConstant) return values_[i];
  if (i + 1 == times_.size()) return values_.back();
  if (t <= times_[i]) return values_[i];
  double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
  w = std::clamp(w, 0.0, 1.0);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double TimeSeries::sup(double t0, double t1) const {
  double m = std::max(std::abs(operator()(t0)), std::abs(operator()(t1)));
  for (std::size_t i = 0; i < times_.size(); ++i)
    if (times_[i] > t0 && times_[i] < t1) m = std::max(m, std::abs(values_[i]));
  return m;
}

double TimeSeries::min(double t0, double t1) const {
  double m = std::min(operator()(t0), operator()(t1));
  for (std::size_t i = 0; i < times_.size(); ++i)
    if (times_[i] > t0 && times_[i] < t1) m = std::min(m, values_[i]);
  return m;
}

double TimeSeries::tv(double t0, double t1) const {
  double acc = 0.0;
  double prev = operator()(t0);
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] <= t0 || times_[i] >= t1) continue;
    acc += std::abs(values_[i] - prev);
    prev = values_[i];
  }
  acc += std::abs(operator()(t1) - prev);
  return acc;
}

double TimeSeries::l1(double t0, double t1) const {
  if (t1 <= t0) return 0.0;
  // integrate piecewise over [t0, t1] splitting at breakpoints
  std::vector<double> cuts{t0};
  for (double bp : times_)
    if (bp > t0 && bp < t1) cuts.push_back(bp);
  cuts.push_back(t1);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1], len = b - a;
    if (mode_ == Mode::PiecewiseConstant) {
      acc += std::abs(operator()(0.5 * (a + b))) * len;
    } else {
      double va = operator()(a), vb = operator()(b);
      if (va * vb >= 0)
        acc += 0.5 * (std::abs(va) + std::abs(vb)) * len;
      else {
        double z = va / (va - vb);  // zero crossing fraction
        acc += 0.5 * std::abs(va) * z * len + 0.5 * std::abs(vb) * (1 - z) * len;
      }
    }
  }
  return acc;
}

bool TimeSeries::operator==(const TimeSeries& o) const {
  return mode_ == o.mode_ && times_ == o.times_ && values_ == o.values_;
}

}  // namespace rsir
