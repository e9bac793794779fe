#pragma once

// Rigid body on SO(n) with a left-invariant metric: the LR system
// (right-invariant constraints) and the L+R system (left-invariant plus
// conjugated right-invariant inertia).

#include "lrflow/operators.hpp"
#include "lrflow/system.hpp"

namespace lrflow {

/// State: frame g, body velocity omega, and the moving constraint
/// covectors alpha_i = Ad_{g^-1} a_i, carried as skew blocks alpha1..alphak.
class LRSystem final : public System {
 public:
  /// `constraints` spans the fixed subspace of space-frame covectors a_i.
  LRSystem(InertiaOperator inertia, SubspaceBasis constraints);

  std::string kind() const override { return "lr"; }
  const InertiaOperator& inertia() const { return inertia_; }
  const SubspaceBasis& constraints() const { return constraints_; }
  int constraint_count() const { return constraints_.size(); }

  /// alpha_i are computed from g; omega must satisfy <alpha_i, omega> = 0.
  PhasePoint make_state(const Rotation& g, const SkewMatrix& omega) const;

  PhaseRate rate(const PhasePoint& x) const override;
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;
  std::vector<std::string> quantity_names() const override;
  Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const override;

  /// The (omega, alpha) part of the field. It is closed in these coordinates
  /// and stays defined off the constraint set, which is the chart used for
  /// the invariant-measure check.
  Eigen::VectorXd chart_field(const Eigen::VectorXd& coords) const;
  /// sqrt det <I^{-1} alpha_i, alpha_j> evaluated on chart coordinates.
  double measure_density(const Eigen::VectorXd& coords) const;

 private:
  InertiaOperator inertia_;
  SubspaceBasis constraints_;
  int n_;
  int N_;
};

/// L+R system d/dt(B omega) = [B omega, omega] with B = I + Pi^g,
/// Pi^g = Ad_{g^-1} Pi0 Ad_g. Pi0 is symmetric but need not be definite;
/// only B is required to stay positive definite.
///
/// The geodesic variant integrates the Euler-Poincare equations of the
/// Lagrangian 1/2 <B omega, omega> instead, which differ by the term
/// [omega, Pi omega] coming from the g-dependence of Pi^g.
class LplusRSystem final : public System {
 public:
  enum class Variant { kNonholonomic, kGeodesic };

  LplusRSystem(InertiaOperator inertia, Eigen::MatrixXd right_inertia,
               Variant variant = Variant::kNonholonomic);

  std::string kind() const override {
    return variant_ == Variant::kGeodesic ? "geodesic-lpr" : "lplusr";
  }
  const InertiaOperator& inertia() const { return inertia_; }
  const Eigen::MatrixXd& right_inertia() const { return pi0_; }
  Variant variant() const { return variant_; }

  PhasePoint make_state(const Rotation& g, const SkewMatrix& omega) const;

  /// Pi^g in the bivector basis.
  Eigen::MatrixXd conjugated_right_inertia(const Eigen::MatrixXd& g) const;
  /// B = I + Pi^g.
  Eigen::MatrixXd total_inertia(const Eigen::MatrixXd& g) const;
  /// omega' for a given Pi (already conjugated).
  Eigen::VectorXd acceleration(const Eigen::MatrixXd& pi, const Eigen::VectorXd& omega) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// 1/2 <B omega, omega>.
  double energy(const PhasePoint& x) const override;
  std::vector<std::string> quantity_names() const override;
  /// Adds "momentum" = <B omega, B omega>.
  Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const override;

  /// Chart (omega, upper triangle of Pi including the diagonal) with
  /// Pi' = [Pi, ad_omega].
  Eigen::VectorXd chart_point(const PhasePoint& x) const;
  Eigen::VectorXd chart_field(const Eigen::VectorXd& y) const;
  /// sqrt det(I + Pi) on chart coordinates.
  double measure_density(const Eigen::VectorXd& y) const;

 private:
  Eigen::MatrixXd chart_pi(const Eigen::VectorXd& y) const;

  InertiaOperator inertia_;
  Eigen::MatrixXd pi0_;
  Variant variant_;
  int n_;
  int N_;
};

}  // namespace lrflow
