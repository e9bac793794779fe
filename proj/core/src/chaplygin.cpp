#include <cmath>

#include "lrflow/chaplygin.hpp"
#include "lrflow/multipliers.hpp"

namespace lrflow {

namespace {

Layout rubber_layout(int n) {
  Layout layout;
  layout.add_frame("g", n).add_skew("omega", n).add_unit_vector("gamma", n);
  return layout;
}

void check_ball(double mass, double radius) {
  if (!(mass > 0.0)) throw InvariantError("ball mass must be positive");
  if (!(radius > 0.0)) throw InvariantError("ball radius must be positive");
}

}  // namespace

RubberChaplyginSystem::RubberChaplyginSystem(InertiaOperator inertia, double mass, double radius,
                                             UnitVector normal)
    : System(rubber_layout(inertia.n())),
      inertia_(std::move(inertia)),
      mass_(mass),
      radius_(radius),
      normal_(std::move(normal)),
      n_(inertia_.n()),
      N_(bivector_dim(inertia_.n())) {
  check_ball(mass_, radius_);
  require_same_dimension(normal_.n(), n_, "RubberChaplyginSystem: normal");
}

RubberChaplyginSystem::RubberChaplyginSystem(InertiaOperator inertia, double mass, double radius)
    : RubberChaplyginSystem(inertia, mass, radius, UnitVector::axis(inertia.n(), inertia.n() - 1)) {}

PhasePoint RubberChaplyginSystem::make_state(const Rotation& g, const SkewMatrix& omega) const {
  require_same_dimension(g.n(), n_, "RubberChaplyginSystem::make_state");
  require_same_dimension(omega.n(), n_, "RubberChaplyginSystem::make_state");
  PhasePoint x{{g.matrix()}, Eigen::VectorXd(N_ + n_)};
  x.coords << omega.coords(), g.matrix().transpose() * normal_.coords();
  validate(x);
  return x;
}

Eigen::MatrixXd RubberChaplyginSystem::total_inertia(const Eigen::VectorXd& gamma) const {
  return inertia_.matrix() + contact_inertia() * wedge_projection_matrix(gamma);
}

SkewMatrix RubberChaplyginSystem::contact_momentum(const PhasePoint& x) const {
  const Eigen::VectorXd gamma = x.coords.tail(n_);
  return SkewMatrix::from_coords(n_, total_inertia(gamma) * x.coords.head(N_));
}

PhaseRate RubberChaplyginSystem::rate(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  const Eigen::VectorXd gamma = x.coords.tail(n_);
  const SkewMatrix omega = SkewMatrix::from_coords(n_, w);
  const Eigen::MatrixXd& om = omega.matrix();
  const Eigen::MatrixXd K = total_inertia(gamma);
  const SkewMatrix k = SkewMatrix::from_coords(n_, K * w);

  const Eigen::VectorXd gamma_dot = -om * gamma;
  const Eigen::MatrixXd X = gamma * gamma.transpose();
  const Eigen::MatrixXd X_dot = X * om - om * X;

  // k' = [k, omega] + lambda_0 with k = K omega, so
  // K omega' = [k, omega] - m rho^2 (omega X' + X' omega) + lambda_0.
  const Eigen::VectorXd force =
      (bracket(k, omega) - SkewMatrix::skew_part(contact_inertia() * (om * X_dot + X_dot * om)))
          .coords();

  // lambda_0 lies in k^gamma and keeps pr_{k^gamma} omega = 0: with
  // P the projector onto R^n ^ gamma, <beta, omega'> = <beta, P' omega>.
  const SubspaceBasis twist = SubspaceBasis::wedge_complement(gamma);
  const Eigen::MatrixXd rows = twist.coords_matrix().transpose();
  const Eigen::MatrixXd dX = gamma_dot * gamma.transpose() + gamma * gamma_dot.transpose();
  const Eigen::VectorXd p_dot_omega = SkewMatrix::skew_part(om * dX + dX * om).coords();
  const ConstrainedAcceleration sol =
      solve_lagrange_dalembert(K, force, rows, rows * p_dot_omega);

  PhaseRate out{{om}, Eigen::VectorXd(x.coords.size())};
  out.coords << sol.acceleration, gamma_dot;
  return out;
}

double RubberChaplyginSystem::energy(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  return 0.5 * w.dot(total_inertia(x.coords.tail(n_)) * w);
}

std::vector<NamedValue> RubberChaplyginSystem::constraint_residuals(const PhasePoint& x) const {
  const Eigen::VectorXd gamma = x.coords.tail(n_);
  const SubspaceBasis twist = SubspaceBasis::wedge_complement(gamma);
  const double no_twist =
      twist.empty() ? 0.0 : (twist.coords_matrix().transpose() * x.coords.head(N_)).norm();
  const Eigen::VectorXd expected = x.frames[0].transpose() * normal_.coords();
  return {{"no_twist", no_twist},
          {"gamma_norm", gamma.norm() - 1.0},
          {"gamma_transport", (gamma - expected).cwiseAbs().maxCoeff()}};
}

// ---------------------------------------------------------------------------

namespace {

Layout gsr_layout(int n) {
  Layout layout;
  layout.add_skew("gamma", n).add_skew("omega", n);
  return layout;
}

}  // namespace

GsrSystem::GsrSystem(InertiaOperator inertia, double mass, double radius)
    : System(gsr_layout(inertia.n())),
      inertia_(std::move(inertia)),
      mass_(mass),
      radius_(radius),
      n_(inertia_.n()),
      N_(bivector_dim(inertia_.n())) {
  check_ball(mass_, radius_);
}

PhasePoint GsrSystem::make_state(const SkewMatrix& gamma, const SkewMatrix& omega) const {
  require_same_dimension(gamma.n(), n_, "GsrSystem::make_state");
  require_same_dimension(omega.n(), n_, "GsrSystem::make_state");
  PhasePoint x{{}, Eigen::VectorXd(2 * N_)};
  x.coords << gamma.coords(), omega.coords();
  validate(x);
  return x;
}

Eigen::MatrixXd GsrSystem::total_inertia(const SkewMatrix& gamma) const {
  // [[gamma, X], gamma] = -ad_gamma^2 X.
  const Eigen::MatrixXd ad = bracket_matrix(gamma);
  return inertia_.matrix() - contact_inertia() * ad * ad;
}

SkewMatrix GsrSystem::momentum(const PhasePoint& x) const {
  const SkewMatrix gamma = SkewMatrix::from_coords(n_, x.coords.head(N_));
  return SkewMatrix::from_coords(n_, total_inertia(gamma) * x.coords.tail(N_));
}

PhaseRate GsrSystem::rate(const PhasePoint& x) const {
  const SkewMatrix gamma = SkewMatrix::from_coords(n_, x.coords.head(N_));
  const SkewMatrix omega = SkewMatrix::from_coords(n_, x.coords.tail(N_));
  const Eigen::MatrixXd B = total_inertia(gamma);
  const SkewMatrix k = SkewMatrix::from_coords(n_, B * omega.coords());
  const SkewMatrix gamma_dot = bracket(gamma, omega);
  // k' = B omega' + m rho^2 ([[gamma', omega], gamma] + [[gamma, omega], gamma']).
  const SkewMatrix rhs =
      bracket(k, omega) - contact_inertia() * (bracket(bracket(gamma_dot, omega), gamma) +
                                              bracket(bracket(gamma, omega), gamma_dot));
  PhaseRate out{{}, Eigen::VectorXd(2 * N_)};
  out.coords << gamma_dot.coords(), factor_spd(B, "GsrSystem: total inertia").solve(rhs.coords());
  return out;
}

double GsrSystem::energy(const PhasePoint& x) const {
  return 0.5 * momentum(x).coords().dot(x.coords.tail(N_));
}

std::vector<std::string> GsrSystem::quantity_names() const {
  return {"energy", "constraints", "momentum_norm", "gamma_norm"};
}

Eigen::VectorXd GsrSystem::quantity(std::string_view name, const PhasePoint& x) const {
  if (name == "momentum_norm") return Eigen::VectorXd::Constant(1, momentum(x).coords().squaredNorm());
  if (name == "gamma_norm") return Eigen::VectorXd::Constant(1, x.coords.head(N_).squaredNorm());
  return System::quantity(name, x);
}

}  // namespace lrflow
