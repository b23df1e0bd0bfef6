#include "rsir/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace rsir {

namespace {

// time integral of eta_i(t) * trace(t) over the stored steps, eta at cell
// midpoints, trace by trapezoid
double control_time_integral(const Trajectory& tr, const TimeSeries& eta,
                             const std::function<double(const SIRState&, int)>& trace,
                             int interface_index) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
    const double t0 = tr.states[k].time, t1 = tr.states[k + 1].time;
    const double e = eta(0.5 * (t0 + t1));
    acc += e * 0.5 * (t1 - t0) *
           (trace(tr.states[k], interface_index) + trace(tr.states[k + 1], interface_index));
  }
  return acc;
}

const AgeTriggeredPolicy& require_age(const Trajectory& tr, const AgeTriggeredPolicy& p) {
  const auto& bounds = tr.grid->segment_bounds();
  if (p.ages.size() + 2 != bounds.size())
    throw std::invalid_argument("cost: policy does not match the trajectory's grid");
  for (std::size_t j = 0; j < p.ages.size(); ++j)
    if (std::abs(p.ages[j] - bounds[j + 1]) > 1e-12)
      throw std::invalid_argument("cost: vaccination ages do not match the grid");
  return p;
}

}  // namespace

double cost_age_susceptible(const Trajectory& tr, const AgeTriggeredPolicy& p) {
  require_age(tr, p);
  double acc = 0.0;
  for (std::size_t j = 0; j < p.ages.size(); ++j)
    acc += control_time_integral(
        tr, p.eta[j], [](const SIRState& s, int ix) { return s.S.left_trace(ix); },
        static_cast<int>(j) + 1);
  return acc;
}

double cost_age_whole(const Trajectory& tr, const AgeTriggeredPolicy& p) {
  require_age(tr, p);
  double acc = 0.0;
  for (std::size_t j = 0; j < p.ages.size(); ++j)
    acc += control_time_integral(
        tr, p.eta[j],
        [](const SIRState& s, int ix) {
          return s.S.left_trace(ix) + s.I.left_trace(ix) + s.R.left_trace(ix);
        },
        static_cast<int>(j) + 1);
  return acc;
}

namespace {

double cost_time_impl(const Trajectory& tr, const TimeTriggeredPolicy& p, bool whole) {
  if (tr.prejump.size() != p.times.size())
    throw std::invalid_argument(
        "cost: trajectory does not carry a pre-jump snapshot per vaccination time");
  const Grid& g = *tr.grid;
  const double h = g.cell_width();
  double acc = 0.0;
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    if (std::abs(tr.prejump[k].first - p.times[k]) > 1e-9)
      throw std::invalid_argument("cost: vaccination times do not match the snapshots");
    const SIRState& s = tr.prejump[k].second;
    for (int j = 0; j < g.segments(); ++j) {
      auto vs = s.S.segment(j);
      auto vi = s.I.segment(j);
      auto vr = s.R.segment(j);
      for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
        const double a0 = g.node_age(j, static_cast<int>(i));
        const double a1 = a0 + h;
        double f0 = p.nu[k](a0) * (vs[i] + (whole ? vi[i] + vr[i] : 0.0));
        double f1 = p.nu[k](a1) * (vs[i + 1] + (whole ? vi[i + 1] + vr[i + 1] : 0.0));
        acc += 0.5 * h * (f0 + f1);
      }
    }
  }
  return acc;
}

}  // namespace

double cost_time_susceptible(const Trajectory& tr, const TimeTriggeredPolicy& p) {
  return cost_time_impl(tr, p, false);
}

double cost_time_whole(const Trajectory& tr, const TimeTriggeredPolicy& p) {
  return cost_time_impl(tr, p, true);
}

double effect(const Trajectory& tr, const EffectWeight& w) {
  const Grid& g = *tr.grid;
  const double h = g.cell_width();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
    const double t0 = tr.states[k].time, t1 = tr.states[k + 1].time;
    const double tm = 0.5 * (t0 + t1);
    double a_int0 = 0.0, a_int1 = 0.0;
    for (int j = 0; j < g.segments(); ++j) {
      auto i0 = tr.states[k].I.segment(j);
      auto i1 = tr.states[k + 1].I.segment(j);
      for (std::size_t q = 0; q + 1 < i0.size(); ++q) {
        const double a0 = g.node_age(j, static_cast<int>(q));
        const double a1 = a0 + h;
        a_int0 += 0.5 * h * (w.phi(tm, a0) * i0[q] + w.phi(tm, a1) * i0[q + 1]);
        a_int1 += 0.5 * h * (w.phi(tm, a0) * i1[q] + w.phi(tm, a1) * i1[q + 1]);
      }
    }
    acc += 0.5 * (t1 - t0) * (a_int0 + a_int1);
  }
  return acc;
}

}  // namespace rsir
