#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lrflow/phase.hpp"

namespace lrflow {

struct NamedValue {
  std::string name;
  double value;
};

/// Tolerance used by every make_state to accept an initial condition.
inline constexpr double kStateTolerance = 1e-8;

/// A vector field on a phase space, with the scalar and vector quantities
/// the diagnostics know how to track. Evaluation is const and pure.
class System {
 public:
  virtual ~System() = default;

  /// Scenario-level system name, e.g. "rubber-chaplygin".
  virtual std::string kind() const = 0;
  const Layout& layout() const { return layout_; }

  virtual PhaseRate rate(const PhasePoint& x) const = 0;
  virtual double energy(const PhasePoint& x) const = 0;

  /// Signed or absolute residuals of the constraints the state must satisfy.
  virtual std::vector<NamedValue> constraint_residuals(const PhasePoint& /*x*/) const {
    return {};
  }

  /// Names accepted by quantity(). Always contains "energy"; "constraints"
  /// is present when the system has constraint residuals.
  virtual std::vector<std::string> quantity_names() const;

  /// Throws std::invalid_argument for names not in quantity_names().
  virtual Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const;

  /// Throws ConstraintViolation for the first residual above kStateTolerance.
  void validate(const PhasePoint& x) const;

 protected:
  explicit System(Layout layout) : layout_(std::move(layout)) {}

  Layout layout_;
};

}  // namespace lrflow
