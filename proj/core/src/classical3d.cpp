#include "lrflow/classical3d.hpp"

#include "lrflow/multipliers.hpp"

namespace lrflow {

namespace {

Layout ball3_layout() {
  Layout layout;
  layout.add_vector("omega", 3).add_unit_vector("gamma", 3);
  return layout;
}

Eigen::Matrix3d contact_inertia_tensor(const Eigen::Matrix3d& inertia, double contact,
                                       const Eigen::Vector3d& gamma) {
  return inertia + contact * (Eigen::Matrix3d::Identity() - gamma * gamma.transpose());
}

void check_params(const Eigen::Matrix3d& inertia, double mass, double radius) {
  if (!(mass > 0.0) || !(radius > 0.0)) throw InvariantError("ball mass and radius must be positive");
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvariantError("inertia tensor must be symmetric");
  }
}

}  // namespace

ClassicalRubberBall3::ClassicalRubberBall3(Eigen::Matrix3d inertia, double mass, double radius)
    : System(ball3_layout()), inertia_(std::move(inertia)), contact_(mass * radius * radius) {
  check_params(inertia_, mass, radius);
}

PhasePoint ClassicalRubberBall3::make_state(const Eigen::Vector3d& omega,
                                            const Eigen::Vector3d& gamma) const {
  PhasePoint x{{}, Eigen::VectorXd(6)};
  x.coords << omega, gamma;
  validate(x);
  return x;
}

PhaseRate ClassicalRubberBall3::rate(const PhasePoint& x) const {
  const Eigen::Vector3d omega = x.coords.head<3>();
  const Eigen::Vector3d gamma = x.coords.tail<3>();
  const Eigen::Matrix3d J = contact_inertia_tensor(inertia_, contact_, gamma);
  const Eigen::Vector3d k = J * omega;
  const Eigen::Vector3d gamma_dot = gamma.cross(omega);
  // d/dt J omega = J omega' - m rho^2 ((gamma', omega) gamma + (gamma, omega) gamma').
  const Eigen::Vector3d force =
      k.cross(omega) + contact_ * (gamma_dot.dot(omega) * gamma + gamma.dot(omega) * gamma_dot);
  const Eigen::MatrixXd row = gamma.transpose();
  const ConstrainedAcceleration sol = solve_lagrange_dalembert(
      J, force, row, Eigen::VectorXd::Constant(1, -gamma_dot.dot(omega)));
  PhaseRate out{{}, Eigen::VectorXd(6)};
  out.coords << sol.acceleration, gamma_dot;
  return out;
}

double ClassicalRubberBall3::energy(const PhasePoint& x) const {
  const Eigen::Vector3d omega = x.coords.head<3>();
  const Eigen::Vector3d gamma = x.coords.tail<3>();
  return 0.5 * omega.dot(contact_inertia_tensor(inertia_, contact_, gamma) * omega);
}

std::vector<NamedValue> ClassicalRubberBall3::constraint_residuals(const PhasePoint& x) const {
  const Eigen::Vector3d omega = x.coords.head<3>();
  const Eigen::Vector3d gamma = x.coords.tail<3>();
  return {{"no_twist", gamma.dot(omega)}, {"gamma_norm", gamma.norm() - 1.0}};
}

ClassicalChaplyginBall3::ClassicalChaplyginBall3(Eigen::Matrix3d inertia, double mass, double radius)
    : System(ball3_layout()), inertia_(std::move(inertia)), contact_(mass * radius * radius) {
  check_params(inertia_, mass, radius);
}

PhasePoint ClassicalChaplyginBall3::make_state(const Eigen::Vector3d& omega,
                                               const Eigen::Vector3d& gamma) const {
  PhasePoint x{{}, Eigen::VectorXd(6)};
  x.coords << omega, gamma;
  validate(x);
  return x;
}

PhaseRate ClassicalChaplyginBall3::rate(const PhasePoint& x) const {
  const Eigen::Vector3d omega = x.coords.head<3>();
  const Eigen::Vector3d gamma = x.coords.tail<3>();
  const Eigen::Matrix3d J = contact_inertia_tensor(inertia_, contact_, gamma);
  const Eigen::Vector3d k = J * omega;
  const Eigen::Vector3d gamma_dot = gamma.cross(omega);
  const Eigen::Vector3d rhs =
      k.cross(omega) + contact_ * (gamma_dot.dot(omega) * gamma + gamma.dot(omega) * gamma_dot);
  PhaseRate out{{}, Eigen::VectorXd(6)};
  out.coords << J.llt().solve(rhs), gamma_dot;
  return out;
}

double ClassicalChaplyginBall3::energy(const PhasePoint& x) const {
  const Eigen::Vector3d omega = x.coords.head<3>();
  const Eigen::Vector3d gamma = x.coords.tail<3>();
  return 0.5 * omega.dot(contact_inertia_tensor(inertia_, contact_, gamma) * omega);
}

std::vector<NamedValue> ClassicalChaplyginBall3::constraint_residuals(const PhasePoint& x) const {
  return {{"gamma_norm", x.coords.tail<3>().norm() - 1.0}};
}

}  // namespace lrflow
