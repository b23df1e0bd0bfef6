#ifndef RSIR_TIME_SERIES_HPP
#define RSIR_TIME_SERIES_HPP

#include <vector>

namespace rsir {

/// Sampled BV function of one variable: piecewise constant (right-continuous)
/// or piecewise linear between breakpoints, clamped outside. Breakpoint
/// lookups snap with a small relative tolerance so that mesh times computed
/// as k*dt land in the intended piece.
class TimeSeries {
 public:
  enum class Mode { PiecewiseConstant, PiecewiseLinear };

  TimeSeries();  // constant zero
  TimeSeries(std::vector<double> times, std::vector<double> values, Mode mode);
  static TimeSeries constant(double v);

  double operator()(double t) const;
  double sup(double t0, double t1) const;           // sup of |value|
  double tv(double t0, double t1) const;            // total variation on [t0, t1]
  double l1(double t0, double t1) const;            // integral of |value|
  double min(double t0, double t1) const;

  Mode mode() const { return mode_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  bool operator==(const TimeSeries& o) const;

 private:
  std::vector<double> times_, values_;
  Mode mode_ = Mode::PiecewiseConstant;
};

}  // namespace rsir

#endif
