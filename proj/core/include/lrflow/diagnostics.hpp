#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrflow/chaplygin.hpp"
#include "lrflow/coupled.hpp"
#include "lrflow/integrators.hpp"
#include "lrflow/lr.hpp"
#include "lrflow/operators.hpp"
#include "lrflow/support.hpp"

namespace lrflow {

// ----- conservation ---------------------------------------------------------

struct QuantityDrift {
  std::string name;
  Eigen::VectorXd initial;
  /// max_t |q(t) - q(0)|_inf
  double max_abs_drift = 0.0;
  /// max_abs_drift / |q(0)|_inf (divided by 1 when q(0) = 0).
  double max_rel_drift = 0.0;
  /// max_t |q(t)|_inf; the figure of merit for constraint residuals.
  double max_abs_value = 0.0;
};

struct ConservationReport {
  std::vector<QuantityDrift> quantities;

  /// Throws std::out_of_range for an unknown name.
  const QuantityDrift& at(const std::string& name) const&;
  // A temporary report hands out a copy, so a bound reference cannot dangle.
  QuantityDrift at(const std::string& name) &&;
};

/// Tracks each named quantity (see System::quantity_names) along traj.
/// An empty trajectory or an unknown name throws std::invalid_argument.
ConservationReport conservation_report(const System& system, const Trajectory& traj,
                                       const std::vector<std::string>& quantities);

// ----- invariant measures ---------------------------------------------------

using FlatField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct DivergenceResult {
  double value = 0.0;
  /// Same estimate with fd_step / 2.
  double halved_step_value = 0.0;
  bool consistent = true;
  std::string warning;
};

/// Central-difference estimate of div(mu f) at y. A large disagreement
/// between fd_step and fd_step/2 flags cancellation in the result.
DivergenceResult measure_divergence(const FlatField& field, const MeasureDensity& density,
                                    const Eigen::VectorXd& y, double fd_step = 1e-5);

/// A flat chart of a reduced phase space with the field and the claimed
/// density expressed on it.
struct MeasureChart {
  FlatField field;
  MeasureDensity density;
  Eigen::VectorXd point;
};

/// (omega, alpha_1, ..., alpha_k), density sqrt det <I^{-1} alpha_i, alpha_j>.
MeasureChart lr_measure_chart(const LRSystem& system, const PhasePoint& x);
/// (omega, Pi upper triangle), density sqrt det(I + Pi).
MeasureChart lplusr_measure_chart(const LplusRSystem& system, const PhasePoint& x);
/// (gamma, p) in R^{2n}, density 1 / sqrt det((I + m rho^2)|_{R^n ^ gamma}).
MeasureChart cotangent_measure_chart(const CotangentSystem& system, const PhasePoint& x);

struct ChaplyginDensities {
  double restricted;  // 1 / sqrt det((I + m rho^2)|_{R^n ^ gamma})
  double special;     // (A gamma, gamma)^{-(n-2)/2}, NaN without special inertia
};

ChaplyginDensities chaplygin_measure_check(const CotangentSystem& system,
                                           const Eigen::VectorXd& gamma);

/// Least-squares slope of log(restricted density) against log((A gamma, gamma))
/// over the given unit vectors (special inertia required).
double chaplygin_density_exponent(const CotangentSystem& system,
                                  const std::vector<Eigen::VectorXd>& gammas);

/// Numerical rank (relative singular-value tolerance) of the central-difference
/// Jacobian of f at y.
int jacobian_rank(const FlatField& f, const Eigen::VectorXd& y, double fd_step = 1e-6,
                  double rel_tol = 1e-6);

/// Energy and all trace-integral coefficients of a support system as a
/// function of its flat coordinates (omega, gamma_1, ...) at fixed frame.
FlatField support_integrals_map(const SupportSystem& system, const PhasePoint& x);

// ----- limits and reductions ------------------------------------------------

struct EpsilonLimitRow {
  double epsilon;
  /// sup over the common time grid of |omega_LplusR - omega_LR|_inf
  double error;
};

/// Compares the L+R flow with Pi0 = eps sum a_i a_i^T (a_i the elements of
/// `constraints`) against the LR flow with constraints a_i, from g = Id.
std::vector<EpsilonLimitRow> epsilon_limit_study(const InertiaOperator& inertia,
                                                 const SubspaceBasis& constraints,
                                                 const SkewMatrix& omega0,
                                                 const std::vector<double>& epsilons, double T,
                                                 double h = 1e-3,
                                                 Method method = Method::kRk4Projected);

/// Least-squares slope of log(error) against log(epsilon).
double epsilon_limit_slope(const std::vector<EpsilonLimitRow>& rows);

/// Contact point path r(t) - r(0) = rho * int Ad_g(omega) Gamma dt by the
/// cumulative trapezoid rule. One n-vector per trajectory sample; the
/// component along Gamma stays zero.
std::vector<Eigen::VectorXd> reconstruct_contact(const RubberChaplyginSystem& system,
                                                 const Trajectory& traj);

/// W(t) = pr_k W0 - sum_i (1 / rho_i) pr_{h_i} Ad_g omega along a reduced
/// (or full) coupled trajectory whose first frame is g and whose first
/// coordinate block is omega.
std::vector<SkewMatrix> reconstruct_W(const CoupledData& data, const Trajectory& traj,
                                      const SkewMatrix& W0);

/// max over samples of |a_k - b_k|_inf over frames and coordinates.
double trajectory_distance(const Trajectory& a, const Trajectory& b);

}  // namespace lrflow
