#pragma once

// A ball with inertia I spinning about its fixed center on N dynamically
// symmetric support balls that touch it at the space-fixed points Gamma_i.
// Rolling without slipping gives the L+R flow with
//   B omega = I omega + sum D_i / rho_i^2 (omega X_i + X_i omega),
// X_i = gamma_i gamma_i^T. The rubber variant (no twist at the contacts)
// uses
//   B* omega = I omega + (sum D_i) omega
//              + sum D_i (1 - rho_i^2) / rho_i^2 (omega X_i + X_i omega).

#include <vector>

#include "lrflow/operators.hpp"
#include "lrflow/system.hpp"

namespace lrflow {

struct SupportBall {
  double inertia;     // D_i >= 0 (0 detaches the ball)
  double rho;         // radius ratio, nonzero
  UnitVector contact; // Gamma_i in space
};

struct TraceCoefficient {
  int degree;              // k in tr(M + sum mu_i X_i)^k
  std::vector<int> powers; // exponent of each mu_i
  double value;
};

class SupportSystem final : public System {
 public:
  /// Throws InvariantError when the total inertia cannot be guaranteed
  /// positive definite for every contact configuration; the message reports
  /// the offending lower eigenvalue bound.
  SupportSystem(InertiaOperator inertia, std::vector<SupportBall> balls, bool rubber);

  std::string kind() const override { return rubber_ ? "rubber-support" : "support"; }
  const InertiaOperator& inertia() const { return inertia_; }
  const std::vector<SupportBall>& balls() const { return balls_; }
  bool rubber() const { return rubber_; }

  /// gamma_i = g^{-1} Gamma_i.
  PhasePoint make_state(const Rotation& g, const SkewMatrix& omega) const;

  /// Matrix of B (or B*) at the body-frame contact vectors stored in x.
  Eigen::MatrixXd total_inertia(const PhasePoint& x) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// 1/2 <B omega, omega>.
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;
  std::vector<std::string> quantity_names() const override;
  /// Adds "trace_integrals": every coefficient of tr(B omega + sum mu_i X_i)^k
  /// for k <= n, in trace_integrals() order.
  Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const override;

  std::vector<TraceCoefficient> trace_integrals(const PhasePoint& x) const;
  std::vector<TraceCoefficient> trace_integrals(const PhasePoint& x, int max_degree) const;

  /// omega' from the unreduced constraints solved with explicit multipliers:
  /// rolling (Ad_g omega + rho_i W_i on h_i = R^n ^ Gamma_i) and, for the
  /// rubber variant, no twist (Ad_g omega - W_i on k_i = h_i^perp).
  /// Independent cross-check of the reduced operator.
  Eigen::VectorXd multiplier_acceleration(const PhasePoint& x) const;

  /// Space-frame velocities W_i of the support balls. Rubber: fully
  /// determined by omega. Plain: the component along k_i is taken from
  /// free_components (zero if empty).
  std::vector<SkewMatrix> peripheral_velocities(const PhasePoint& x,
                                                const std::vector<SkewMatrix>& free_components = {}) const;

 private:
  double shift() const;
  double coefficient(const SupportBall& b) const;

  InertiaOperator inertia_;
  std::vector<SupportBall> balls_;
  bool rubber_;
  int n_;
  int N_;
};

}  // namespace lrflow
