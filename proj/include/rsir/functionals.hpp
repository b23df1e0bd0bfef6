#ifndef RSIR_FUNCTIONALS_HPP
#define RSIR_FUNCTIONALS_HPP

#include <functional>

#include "rsir/sir_model.hpp"

namespace rsir {

/// Weight for the campaign-effect functional (integral of phi * I).
struct EffectWeight {
  std::function<double(double, double)> phi = [](double, double) { return 1.0; };
  bool allow_signed = false;
};

/// Dosed-vaccine counts for the age-triggered policy: time integral of
/// eta_i(t) times the left trace at each vaccination age, summed over ages.
/// Control factors are evaluated at time-cell midpoints, state factors by
/// trapezoid, so piecewise-constant controls integrate exactly.
double cost_age_susceptible(const Trajectory& tr, const AgeTriggeredPolicy& p);
double cost_age_whole(const Trajectory& tr, const AgeTriggeredPolicy& p);

/// Dosed-vaccine counts for the time-triggered policy: age integral of
/// nu_k against the persisted pre-jump states.
double cost_time_susceptible(const Trajectory& tr, const TimeTriggeredPolicy& p);
double cost_time_whole(const Trajectory& tr, const TimeTriggeredPolicy& p);

/// Weighted number of infected individuals over the whole trajectory.
double effect(const Trajectory& tr, const EffectWeight& w = {});

}  // namespace rsir

#endif
