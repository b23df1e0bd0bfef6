#include "rsir/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace rsir {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int policy_count(const Scenario& sc) {
  if (const auto* a = std::get_if<AgeTriggeredPolicy>(&sc.policy))
    return static_cast<int>(a->ages.size());
  return static_cast<int>(std::get<TimeTriggeredPolicy>(sc.policy).times.size());
}

TimeSeries bin_series(std::span<const double> vals, double t0, double t1) {
  std::vector<double> ts, vs;
  const int B = static_cast<int>(vals.size());
  for (int b = 0; b < B; ++b) {
    ts.push_back(t0 + (t1 - t0) * b / B);
    vs.push_back(vals[b]);
  }
  return TimeSeries(std::move(ts), std::move(vs), TimeSeries::Mode::PiecewiseConstant);
}

}  // namespace

void ControlVector::project() {
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
}

int OptimizationProblem::dimension() const { return policy_count(base) * bins; }

Scenario instantiate(const OptimizationProblem& p, const ControlVector& c) {
  Scenario sc = p.base;
  const int B = p.bins;
  if (auto* a = std::get_if<AgeTriggeredPolicy>(&sc.policy)) {
    a->eta.clear();
    for (std::size_t j = 0; j < a->ages.size(); ++j)
      a->eta.push_back(bin_series({c.v.data() + j * B, static_cast<std::size_t>(B)},
                                  0.0, sc.grid->horizon()));
  } else {
    auto& tp = std::get<TimeTriggeredPolicy>(sc.policy);
    tp.nu.clear();
    const double amax = sc.grid->age_max();
    for (std::size_t k = 0; k < tp.times.size(); ++k) {
      std::vector<double> vals(c.v.begin() + k * B, c.v.begin() + (k + 1) * B);
      tp.nu.push_back([vals, amax, B](double a) {
        int b = std::min(B - 1, static_cast<int>(a / amax * B));
        return vals[b];
      });
    }
  }
  return sc;
}

std::pair<double, double> evaluate(const OptimizationProblem& p, const ControlVector& c) {
  if (c.size() != p.dimension())
    throw std::invalid_argument("evaluate: control dimension mismatch");
  ControlVector boxed = c;
  boxed.project();
  Scenario sc = instantiate(p, boxed);
  Trajectory tr = simulate(sc);
  double cost = 0.0;
  switch (p.cost_variant) {
    case CostVariant::AgeSusceptible:
      cost = cost_age_susceptible(tr, std::get<AgeTriggeredPolicy>(sc.policy));
      break;
    case CostVariant::AgeWhole:
      cost = cost_age_whole(tr, std::get<AgeTriggeredPolicy>(sc.policy));
      break;
    case CostVariant::TimeSusceptible:
      cost = cost_time_susceptible(tr, std::get<TimeTriggeredPolicy>(sc.policy));
      break;
    case CostVariant::TimeWhole:
      cost = cost_time_whole(tr, std::get<TimeTriggeredPolicy>(sc.policy));
      break;
  }
  return {cost, effect(tr, p.weight)};
}

namespace {

struct Penalized {
  double primary = 0.0, violation = 0.0;
};

Penalized split(const OptimizationProblem& p, double cost, double eff) {
  if (p.direction == Direction::MinCostSubjectToEffect)
    return {cost, std::max(0.0, eff - p.cap)};
  return {eff, std::max(0.0, cost - p.cap)};
}

// evaluate a batch of candidates, preserving index order in the results
void run_batch(const OptimizationProblem& p, const std::vector<ControlVector>& xs,
               std::vector<EvalRecord>& out, int threads) {
  out.assign(xs.size(), {});
  auto work = [&](std::size_t i) {
    EvalRecord r;
    r.control = xs[i];
    try {
      auto [cost, eff] = evaluate(p, xs[i]);
      r.cost = cost;
      r.effect = eff;
    } catch (const std::exception&) {
      r.failed = true;
    }
    out[i] = std::move(r);
  };
  if (threads <= 1 || xs.size() <= 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  const int nw = std::min<int>(threads, static_cast<int>(xs.size()));
  std::atomic<std::size_t> cursor{0};
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = cursor.fetch_add(1); i < xs.size(); i = cursor.fetch_add(1))
        work(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

SolveResult solve(const OptimizationProblem& p, int budget, std::uint64_t seed,
                  int threads) {
  const int d = p.dimension();
  if (budget < d + 1) throw std::invalid_argument("solve: budget must be at least d+1");
  if (p.cap < 0) throw std::invalid_argument("solve: the constraint cap must be nonnegative");

  std::mt19937_64 rng(seed);
  SolveResult res;
  double rho = 10.0;

  ControlVector x{std::vector<double>(d, 0.0)};
  double step = 0.25;
  const double step_min = 1e-3;

  // best by penalized objective (search state) and best feasible (answer)
  double best_obj = kInf;
  ControlVector best_feasible;
  double bf_primary = kInf, bf_cost = 0, bf_effect = 0;
  bool have_feasible = false;
  ControlVector least_viol;
  double lv_viol = kInf, lv_cost = 0, lv_effect = 0;

  int used = 0;
  auto objective = [&](const EvalRecord& r) {
    if (r.failed) return kInf;
    Penalized pe = split(p, r.cost, r.effect);
    return pe.primary + rho * pe.violation;
  };
  auto note = [&](EvalRecord r) {
    r.index = static_cast<int>(res.history.size());
    Penalized pe = split(p, r.cost, r.effect);
    r.feasible = !r.failed && pe.violation <= 0.0;
    r.objective = objective(r);
    if (r.feasible && pe.primary < bf_primary) {
      bf_primary = pe.primary;
      best_feasible = r.control;
      bf_cost = r.cost;
      bf_effect = r.effect;
      have_feasible = true;
    }
    if (!r.failed && pe.violation < lv_viol) {
      lv_viol = pe.violation;
      least_viol = r.control;
      lv_cost = r.cost;
      lv_effect = r.effect;
    }
    res.history.push_back(r);
    return res.history.back();
  };

  // initial point
  {
    std::vector<EvalRecord> batch;
    run_batch(p, {x}, batch, 1);
    ++used;
    best_obj = note(batch[0]).objective;
  }

  while (used < budget && step >= step_min) {
    // coordinate poll around x
    std::vector<ControlVector> cands;
    for (int i = 0; i < d && used + static_cast<int>(cands.size()) < budget; ++i) {
      for (double s : {+step, -step}) {
        ControlVector c = x;
        c.v[i] = std::clamp(c.v[i] + s, 0.0, 1.0);
        bool same = std::abs(c.v[i] - x.v[i]) < 1e-15;
        if (!same && used + static_cast<int>(cands.size()) < budget) cands.push_back(c);
      }
    }
    if (cands.empty()) break;
    std::vector<EvalRecord> batch;
    run_batch(p, cands, batch, threads);
    used += static_cast<int>(batch.size());

    int pick = -1;
    double pick_obj = best_obj;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const EvalRecord& r = note(batch[i]);
      if (r.objective < pick_obj - 1e-15) {
        pick_obj = r.objective;
        pick = static_cast<int>(i);
      }
    }
    if (pick >= 0) {
      x = cands[pick];
      best_obj = pick_obj;
      continue;
    }
    // stalled: escalate the penalty while no feasible point has been seen,
    // otherwise shrink the step
    if (!have_feasible && rho < 1e12) {
      rho *= 10.0;
      best_obj = kInf;  // stale under the new penalty
      for (const auto& r : res.history)
        if (!r.failed) {
          Penalized q = split(p, r.cost, r.effect);
          best_obj = std::min(best_obj, q.primary + rho * q.violation);
        }
      continue;
    }
    step *= 0.5;
    if (step < step_min && used < budget && have_feasible) {
      // seeded restart around the best feasible point
      std::uniform_real_distribution<double> u(-0.125, 0.125);
      x = best_feasible;
      for (double& xv : x.v) xv = std::clamp(xv + u(rng), 0.0, 1.0);
      step = 0.25;
      std::vector<EvalRecord> b2;
      run_batch(p, {x}, b2, 1);
      ++used;
      best_obj = note(b2[0]).objective;
      if (res.history.size() >= static_cast<std::size_t>(budget)) break;
    }
  }

  if (have_feasible) {
    res.best = best_feasible;
    res.best_cost = bf_cost;
    res.best_effect = bf_effect;
    res.feasible = true;
  } else {
    res.best = least_viol;
    res.best_cost = lv_cost;
    res.best_effect = lv_effect;
    res.feasible = false;
  }
  return res;
}

}  // namespace rsir
