#pragma once

// Three-dimensional vector forms of the Chaplygin ball, written in R^3 with
// cross products. They are independent implementations used to cross-check
// the so(n) systems at n = 3 through iso3.

#include <Eigen/Dense>

#include "lrflow/system.hpp"

namespace lrflow {

/// Rubber ball: k = J omega, J = I + m rho^2 (Id - gamma gamma^T),
/// k' = k x omega + lambda gamma, gamma' = gamma x omega, (omega, gamma) = 0.
class ClassicalRubberBall3 final : public System {
 public:
  ClassicalRubberBall3(Eigen::Matrix3d inertia, double mass, double radius);

  std::string kind() const override { return "chap3-rubber"; }
  PhasePoint make_state(const Eigen::Vector3d& omega, const Eigen::Vector3d& gamma) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// 1/2 (k, omega).
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;

 private:
  Eigen::Matrix3d inertia_;
  double contact_;
};

/// Classical (slipless, twisting allowed) Chaplygin ball:
/// k = I omega + m rho^2 (omega - (omega, gamma) gamma), k' = k x omega,
/// gamma' = gamma x omega.
class ClassicalChaplyginBall3 final : public System {
 public:
  ClassicalChaplyginBall3(Eigen::Matrix3d inertia, double mass, double radius);

  std::string kind() const override { return "chap3-classical"; }
  PhasePoint make_state(const Eigen::Vector3d& omega, const Eigen::Vector3d& gamma) const;

  PhaseRate rate(const PhasePoint& x) const override;
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;

 private:
  Eigen::Matrix3d inertia_;
  double contact_;
};

}  // namespace lrflow
