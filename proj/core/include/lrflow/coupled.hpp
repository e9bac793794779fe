#pragma once

// Coupled LR systems on SO(n) x so(n): a body with inertia I rolling against
// peripheral bodies of inertia D through right-invariant constraints.

#include <vector>

#include "lrflow/operators.hpp"
#include "lrflow/system.hpp"

namespace lrflow {

struct PeripheralSubspace {
  SubspaceBasis subspace;  // h_i, fixed in space
  double rho;              // coupling ratio, nonzero
};

/// Parameters shared by the full and reduced coupled systems.
struct CoupledData {
  InertiaOperator inertia;
  double peripheral_inertia;  // D > 0
  SubspaceBasis h0;           // constraints on the first body alone
  std::vector<PeripheralSubspace> peripherals;

  /// Checks dimensions, D > 0, rho_i != 0 and mutual orthogonality of h_i.
  void check() const;
  int n() const { return inertia.n(); }

  /// k = (h_1 + ... + h_q)^perp.
  SubspaceBasis free_peripheral_subspace() const;
  /// k_0 = (h_0 + h_1 + ... + h_q)^perp.
  SubspaceBasis noether_subspace() const;
  /// B = I + sum D / rho_i^2 pr_{h_i^g} as a matrix.
  Eigen::MatrixXd total_inertia(const Eigen::MatrixXd& g) const;
};

/// Unreduced flow on (g, omega, W), W the space-frame velocity of the
/// second factor. All multipliers come from one constrained solve.
class CoupledFullSystem final : public System {
 public:
  explicit CoupledFullSystem(CoupledData data);

  std::string kind() const override { return "coupled"; }
  const CoupledData& data() const { return data_; }

  PhasePoint make_state(const Rotation& g, const SkewMatrix& omega, const SkewMatrix& W) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// 1/2 <I omega, omega> + 1/2 D <W, W>.
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;
  std::vector<std::string> quantity_names() const override;
  /// Adds "noether_W" = pr_k W and "noether_momentum" = pr_{k0} Ad_g(I omega),
  /// both as coordinates in an orthonormal basis of the subspace.
  Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const override;

 private:
  CoupledData data_;
  SubspaceBasis k_;
  SubspaceBasis k0_;
  int n_;
  int N_;
};

/// Reduced flow on (g, omega):
///   d/dt(B omega) = [B omega, omega] - Pi' omega
///                   - (B^{-1}|_{h0^g})^{-1} pr_{h0^g} B^{-1} [I omega, omega].
class CoupledReducedSystem final : public System {
 public:
  explicit CoupledReducedSystem(CoupledData data);

  std::string kind() const override { return "coupled-reduced"; }
  const CoupledData& data() const { return data_; }

  PhasePoint make_state(const Rotation& g, const SkewMatrix& omega) const;

  PhaseRate rate(const PhasePoint& x) const override;
  /// 1/2 <B omega, omega>.
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;
  std::vector<std::string> quantity_names() const override;
  Eigen::VectorXd quantity(std::string_view name, const PhasePoint& x) const override;

 private:
  CoupledData data_;
  SubspaceBasis k0_;
  int n_;
  int N_;
};

/// Peripheral body i of an N-coupled system: energy 1/2 D <W_i, W_i> and
/// constraints A [Ad_g omega] + B [W_i] = 0 in bivector coordinates.
struct CoupledBody {
  double inertia;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

class NCoupledSystem final : public System {
 public:
  NCoupledSystem(InertiaOperator inertia, std::vector<CoupledBody> bodies);

  /// Bodies for the constraints [Omega, Gamma_i] + rho_i W_i = 0.
  static std::vector<CoupledBody> commutator_bodies(const std::vector<SkewMatrix>& gammas,
                                                    const std::vector<double>& rhos,
                                                    const std::vector<double>& inertias);

  std::string kind() const override { return "ncoupled"; }
  const InertiaOperator& inertia() const { return inertia_; }
  const std::vector<CoupledBody>& bodies() const { return bodies_; }

  PhasePoint make_state(const Rotation& g, const SkewMatrix& omega,
                        const std::vector<SkewMatrix>& Ws) const;
  /// Each W_i chosen as the minimum-norm solution of its constraint.
  PhasePoint make_state(const Rotation& g, const SkewMatrix& omega) const;

  /// The L+R operator the flow reduces to:
  /// I + Ad_g^T (sum D_i A_i^T C_i^{-1} A_i) Ad_g, C_i = B_i B_i^T.
  Eigen::MatrixXd reduced_inertia(const Eigen::MatrixXd& g) const;

  PhaseRate rate(const PhasePoint& x) const override;
  double energy(const PhasePoint& x) const override;
  std::vector<NamedValue> constraint_residuals(const PhasePoint& x) const override;

 private:
  InertiaOperator inertia_;
  std::vector<CoupledBody> bodies_;
  std::vector<Eigen::MatrixXd> gram_inverse_;  // C_i^{-1}
  int n_;
  int N_;
};

}  // namespace lrflow
