#pragma once

// The n-dimensional rubber Chaplygin ball and its relatives: the reduced
// flow on the cotangent bundle of the sphere, the sphere geodesic flow it
// becomes after a time change, and the alternative generalization in which
// the contact direction is a skew matrix.

#include <functional>
#include <memory>

#include "lrflow/operators.hpp"
#include "lrflow/system.hpp"

namespace lrflow {

/// Balanced ball of mass m and radius rho rolling without slipping or
/// twisting on a hyperplane with normal Gamma (space frame). State
/// (g, omega, gamma = g^{-1} Gamma); omega must lie in R^n ^ gamma.
class RubberChaplyginSystem final : public System {
 public:
  RubberChaplyginSystem(InertiaOperator inertia, double mass, double radius, UnitVector normal);
  RubberChaplyginSystem(InertiaOperator inertia, double mass, double radius);

  std::string kind() const override { return "rubber-chaplygin"; }
  const InertiaOperator& inertia() const { return inertia_; }
  double mass() const { return mass_; }
  double radius() const { return radius_; }
  const UnitVector& normal() const { return normal_; }
  /// m rho^2.
  double contact_inertia() const { return mass_ * radius_ * radius_; }

  PhasePoint make_state(const Rotation& g, const SkewMatrix& omega) const;

  /// K = I + m rho^2 pr_{R^n ^ gamma}.
  Eigen::MatrixXd total_inertia(const Eigen::VectorXd& gamma) const;
  /// Momentum about the contact point, k = I omega + m rho^2 (omega X + X omega).
  SkewMatrix contact_momentum(const PhasePoint& x) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// 1/2 <K omega, omega>.
  double energy(const PhasePoint& x) const override;
  /// no_twist = |pr_{k^gamma} omega|, gamma_norm, gamma_transport.
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;

 private:
  InertiaOperator inertia_;
  double mass_;
  double radius_;
  UnitVector normal_;
  int n_;
  int N_;
};

/// Alternative generalization on so(n): state (gamma, omega) with gamma a
/// skew matrix on an adjoint orbit,
///   k = I omega + m rho^2 [[gamma, omega], gamma],  k' = [k, omega],
///   gamma' = [gamma, omega].
class GsrSystem final : public System {
 public:
  GsrSystem(InertiaOperator inertia, double mass, double radius);

  std::string kind() const override { return "gsr"; }
  const InertiaOperator& inertia() const { return inertia_; }
  double contact_inertia() const { return mass_ * radius_ * radius_; }

  PhasePoint make_state(const SkewMatrix& gamma, const SkewMatrix& omega) const;

  /// Matrix of X -> I X + m rho^2 [[gamma, X], gamma].
  Eigen::MatrixXd total_inertia(const SkewMatrix& gamma) const;
  SkewMatrix momentum(const PhasePoint& x) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// 1/2 <k, omega>.
  double energy(const PhasePoint& x) const override;
  std::vector<std::string> quantity_names() const override;
  /// Adds "momentum_norm" <k, k> and "gamma_norm" <gamma, gamma>.
  Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const override;

 private:
  InertiaOperator inertia_;
  double mass_;
  double radius_;
  int n_;
  int N_;
};

/// Reduced rubber ball on T*S^{n-1}, coordinates (gamma, p) with
///   p = m rho^2 gamma' - I(gamma ^ gamma') gamma,
///   gamma' = -Phi gamma, p' = -Phi p, Phi = gamma ^ gamma'.
/// The Legendre map is inverted on the tangent space at gamma.
class CotangentSystem final : public System {
 public:
  CotangentSystem(InertiaOperator inertia, double mass, double radius);

  std::string kind() const override { return "cotangent"; }
  const InertiaOperator& inertia() const { return inertia_; }
  double contact_inertia() const { return mass_ * radius_ * radius_; }

  PhasePoint make_state(const UnitVector& gamma, const Eigen::VectorXd& p) const;
  /// Projection of a rubber Chaplygin state: gamma and p = -k gamma.
  PhasePoint from_group(const RubberChaplyginSystem& ball, const PhasePoint& x) const;

  /// Tangent velocity gamma' for momentum p (Legendre inverse).
  Eigen::VectorXd velocity(const Eigen::VectorXd& gamma, const Eigen::VectorXd& p) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// 1/2 (p, gamma').
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;
  std::vector<std::string> quantity_names() const override;
  Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const override;

  /// Field on the flat (gamma, p) chart of R^{2n}.
  Eigen::VectorXd chart_field(const Eigen::VectorXd& y) const;
  /// 1 / sqrt det <(I + m rho^2) beta_i, beta_j> over an orthonormal basis
  /// beta of R^n ^ gamma, evaluated on chart coordinates.
  double measure_density(const Eigen::VectorXd& y) const;
  /// (A gamma, gamma)^{-(n-2)/2}; requires a special inertia operator.
  double special_measure_density(const Eigen::VectorXd& gamma) const;

 private:
  InertiaOperator inertia_;
  double mass_;
  double radius_;
  int n_;
};

/// Geodesic flow on S^{n-1} for the Lagrangian
///   a^e * 1/2 [ (A g', g') a - (A g, g')^2 ],  a = (A g, g),
/// with e = conformal_exponent. State (gamma, dgamma), dgamma tangent.
class LStarSystem final : public System {
 public:
  explicit LStarSystem(Eigen::VectorXd axes, double conformal_exponent = 0.0);

  std::string kind() const override { return "lstar-geodesic"; }
  const Eigen::VectorXd& axes() const { return axes_; }
  double conformal_exponent() const { return exponent_; }

  PhasePoint make_state(const UnitVector& gamma, const Eigen::VectorXd& velocity) const;

  double lagrangian(const Eigen::VectorXd& gamma, const Eigen::VectorXd& velocity) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// The Lagrangian (quadratic in velocity, hence the energy).
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;

 private:
  Eigen::VectorXd axes_;
  double exponent_;
  int n_;
};

/// The field of `base` multiplied by a positive state-dependent factor,
/// i.e. the same orbits under the time change d(new time) = dt / factor.
class TimeRescaledSystem final : public System {
 public:
  TimeRescaledSystem(std::shared_ptr<const System> base,
                     std::function<double(const PhasePoint&)> factor, std::string label);

  std::string kind() const override { return base_->kind() + "-" + label_; }
  const System& base() const { return *base_; }
  double factor(const PhasePoint& x) const;

  PhaseRate rate(const PhasePoint& x) const override;
  double energy(const PhasePoint& x) const override { return base_->energy(x); }
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override {
    return base_->constraint_residuals(x);
  }
  std::vector<std::string> quantity_names() const override { return base_->quantity_names(); }
  Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const override {
    return base_->quantity(name, x);
  }

 private:
  std::shared_ptr<const System> base_;
  std::function<double(const PhasePoint&)> factor_;
  std::string label_;
};

/// dt/dtau = sqrt((A gamma, gamma)) for a (gamma, ...) layout whose first
/// block is gamma.
std::function<double(const PhasePoint&)> chaplygin_time_factor(Eigen::VectorXd axes);

}  // namespace lrflow
