#ifndef RSIR_OPTIMIZER_HPP
#define RSIR_OPTIMIZER_HPP

#include <cstdint>
#include <vector>

#include "rsir/functionals.hpp"
#include "rsir/sir_model.hpp"

namespace rsir {

/// Flattened control parameters in [0,1]^d: per vaccination age (or time),
/// one value per bin, piecewise constant.
struct ControlVector {
  std::vector<double> v;

  int size() const { return static_cast<int>(v.size()); }
  void project();  // clamp into the box
};

enum class Direction { MinCostSubjectToEffect, MinEffectSubjectToCost };
enum class CostVariant { AgeSusceptible, AgeWhole, TimeSusceptible, TimeWhole };

struct OptimizationProblem {
  Direction direction = Direction::MinEffectSubjectToCost;
  double cap = 0.0;  // effect cap or cost cap, per direction
  CostVariant cost_variant = CostVariant::AgeSusceptible;
  EffectWeight weight;
  Scenario base;     // template scenario; its policy fixes ages/times
  int bins = 1;      // control bins per age (in time) or per time (in age)

  int dimension() const;
};

/// Re-instantiate the template's policy from a control vector.
Scenario instantiate(const OptimizationProblem& p, const ControlVector& c);

/// Simulate one control and evaluate (cost, effect).
std::pair<double, double> evaluate(const OptimizationProblem& p, const ControlVector& c);

struct EvalRecord {
  int index = 0;
  ControlVector control;
  double cost = 0.0, effect = 0.0;
  double objective = 0.0;  // penalized
  bool feasible = false;
  bool failed = false;  // simulation failure; candidate skipped
};

struct SolveResult {
  ControlVector best;
  double best_cost = 0.0, best_effect = 0.0;
  bool feasible = false;  // a feasible point was seen and returned
  std::vector<EvalRecord> history;
};

/// Box-projected coordinate pattern search on the exact-penalty objective
/// (primary + rho * constraint violation, rho escalating tenfold on stalls),
/// starting from the zero control. Deterministic for fixed (problem, budget,
/// seed); candidate evaluations may run on `threads` workers, reduced in
/// index order.
SolveResult solve(const OptimizationProblem& p, int budget, std::uint64_t seed,
                  int threads = 0);

}  // namespace rsir

#endif
