#ifndef RSIR_REPORT_HPP
#define RSIR_REPORT_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsir {

/// Result of evaluating one runtime-checkable inequality: both sides are
/// reported, never silently clipped. `rhs` may be +inf when the assembled
/// bound overflows double; `log10_rhs` still carries its magnitude.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double log10_rhs = 0.0;
  double tolerance = 0.0;
  bool holds = false;
  std::string detail;
};

inline InequalityReport make_report(std::string name, double lhs, double rhs,
                                    double tol = 0.0, std::string detail = {}) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.log10_rhs = rhs > 0 ? std::log10(rhs) : 0.0;
  r.tolerance = tol;
  r.holds = lhs <= rhs + tol;
  r.detail = std::move(detail);
  return r;
}

inline bool all_hold(const std::vector<InequalityReport>& rs) {
  for (const auto& r : rs)
    if (!r.holds) return false;
  return true;
}

/// A declared coefficient constant was contradicted by sampling.
class HypothesisViolation : public std::runtime_error {
 public:
  HypothesisViolation(const std::string& constant, const std::string& what)
      : std::runtime_error("hypothesis violation [" + constant + "]: " + what),
        constant_(constant) {}
  const std::string& constant() const { return constant_; }

 private:
  std::string constant_;
};

/// Scenario/config file problem (parse error, unknown key, misalignment).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The solver could not deliver what its contract promises.
class SolverFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rsir

#endif
