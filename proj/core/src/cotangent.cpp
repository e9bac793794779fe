#include <cmath>

#include "lrflow/chaplygin.hpp"

namespace lrflow {

namespace {

Layout sphere_layout(int n, const char* velocity) {
  Layout layout;
  layout.add_unit_vector("gamma", n).add_vector(velocity, n);
  return layout;
}

}  // namespace

CotangentSystem::CotangentSystem(InertiaOperator inertia, double mass, double radius)
    : System(sphere_layout(inertia.n(), "p")),
      inertia_(std::move(inertia)),
      mass_(mass),
      radius_(radius),
      n_(inertia_.n()) {
  if (!(mass_ > 0.0) || !(radius_ > 0.0)) {
    throw InvariantError("CotangentSystem: mass and radius must be positive");
  }
}

PhasePoint CotangentSystem::make_state(const UnitVector& gamma, const Eigen::VectorXd& p) const {
  require_same_dimension(gamma.n(), n_, "CotangentSystem::make_state");
  require_same_dimension(static_cast<int>(p.size()), n_, "CotangentSystem::make_state");
  PhasePoint x{{}, Eigen::VectorXd(2 * n_)};
  x.coords << gamma.coords(), p;
  validate(x);
  return x;
}

PhasePoint CotangentSystem::from_group(const RubberChaplyginSystem& ball, const PhasePoint& x) const {
  const Eigen::VectorXd gamma = x.coords.tail(n_);
  const Eigen::VectorXd p = -ball.contact_momentum(x).matrix() * gamma;
  return make_state(UnitVector::normalized(gamma), p);
}

Eigen::VectorXd CotangentSystem::velocity(const Eigen::VectorXd& gamma,
                                          const Eigen::VectorXd& p) const {
  const Eigen::MatrixXd t = tangent_basis(gamma);
  const int m = n_ - 1;
  Eigen::MatrixXd legendre(m, m);
  for (int k = 0; k < m; ++k) {
    const Eigen::VectorXd v = t.col(k);
    const Eigen::VectorXd image =
        contact_inertia() * v - inertia_.apply(wedge(gamma, v)).matrix() * gamma;
    legendre.col(k) = t.transpose() * image;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(legendre);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw SingularSystemError("CotangentSystem: Legendre map is singular at this gamma");
  }
  return t * lu.solve(t.transpose() * p);
}

Eigen::VectorXd CotangentSystem::chart_field(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd gamma = y.head(n_);
  const Eigen::VectorXd p = y.tail(n_);
  const Eigen::MatrixXd phi = wedge(gamma, velocity(gamma, p)).matrix();
  Eigen::VectorXd out(2 * n_);
  out << -phi * gamma, -phi * p;
  return out;
}

PhaseRate CotangentSystem::rate(const PhasePoint& x) const { return {{}, chart_field(x.coords)}; }

double CotangentSystem::energy(const PhasePoint& x) const {
  const Eigen::VectorXd gamma = x.coords.head(n_);
  const Eigen::VectorXd p = x.coords.tail(n_);
  return 0.5 * p.dot(velocity(gamma, p));
}

std::vector<NamedValue> CotangentSystem::constraint_residuals(const PhasePoint& x) const {
  const Eigen::VectorXd gamma = x.coords.head(n_);
  return {{"gamma_norm", gamma.norm() - 1.0}, {"gamma_p", gamma.dot(x.coords.tail(n_))}};
}

std::vector<std::string> CotangentSystem::quantity_names() const {
  return {"energy", "constraints", "measure_density"};
}

Eigen::VectorXd CotangentSystem::quantity(std::string_view name, const PhasePoint& x) const {
  if (name == "measure_density") return Eigen::VectorXd::Constant(1, measure_density(x.coords));
  return System::quantity(name, x);
}

double CotangentSystem::measure_density(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd gamma = y.head(n_);
  const Eigen::MatrixXd j =
      inertia_.matrix() + contact_inertia() * Eigen::MatrixXd::Identity(inertia_.dim(), inertia_.dim());
  return 1.0 / std::sqrt(restricted_det(j, SubspaceBasis::wedge_with(gamma)));
}

double CotangentSystem::special_measure_density(const Eigen::VectorXd& gamma) const {
  if (inertia_.kind() != InertiaOperator::Kind::kSpecial) {
    throw InvariantError("special_measure_density: inertia operator is not special");
  }
  const Eigen::VectorXd& axes = inertia_.special_axes();
  const double a = gamma.dot(axes.cwiseProduct(gamma));
  return std::pow(a, -0.5 * (n_ - 2));
}

// ---------------------------------------------------------------------------

LStarSystem::LStarSystem(Eigen::VectorXd axes, double conformal_exponent)
    : System(sphere_layout(static_cast<int>(axes.size()), "dgamma")),
      axes_(std::move(axes)),
      exponent_(conformal_exponent),
      n_(static_cast<int>(axes_.size())) {
  if (n_ < 2) throw DimensionError("LStarSystem: need n >= 2");
  if ((axes_.array() <= 0.0).any()) throw InvariantError("LStarSystem: axes must be positive");
}

PhasePoint LStarSystem::make_state(const UnitVector& gamma, const Eigen::VectorXd& velocity) const {
  require_same_dimension(gamma.n(), n_, "LStarSystem::make_state");
  require_same_dimension(static_cast<int>(velocity.size()), n_, "LStarSystem::make_state");
  PhasePoint x{{}, Eigen::VectorXd(2 * n_)};
  x.coords << gamma.coords(), velocity;
  validate(x);
  return x;
}

double LStarSystem::lagrangian(const Eigen::VectorXd& gamma, const Eigen::VectorXd& velocity) const {
  const Eigen::VectorXd ag = axes_.cwiseProduct(gamma);
  const double a = ag.dot(gamma);
  const double base = 0.5 * (velocity.dot(axes_.cwiseProduct(velocity)) * a -
                             std::pow(ag.dot(velocity), 2));
  return std::pow(a, exponent_) * base;
}

PhaseRate LStarSystem::rate(const PhasePoint& x) const {
  const Eigen::VectorXd gamma = x.coords.head(n_);
  const Eigen::VectorXd v = x.coords.tail(n_);
  const Eigen::VectorXd ag = axes_.cwiseProduct(gamma);
  const Eigen::VectorXd av = axes_.cwiseProduct(v);
  const Eigen::MatrixXd A = axes_.asDiagonal();
  const double a = ag.dot(gamma);
  const double a_dot = 2.0 * ag.dot(v);

  // Unweighted metric P with 2 L* = v^T P v, its time derivative, and the
  // gradient of L* in gamma.
  const Eigen::MatrixXd P = a * A - ag * ag.transpose();
  const Eigen::MatrixXd P_dot = ag.dot(v) * 2.0 * A - av * ag.transpose() - ag * av.transpose();
  const Eigen::VectorXd grad = v.dot(av) * ag - ag.dot(v) * av;
  const double lstar = 0.5 * v.dot(P * v);

  // Weight f = a^e: metric f P, d/dt(f P) = f' P + f P', gradient
  // f grad L* + L* grad f with grad a = 2 A gamma.
  const double f = std::pow(a, exponent_);
  const double f_dot = exponent_ * std::pow(a, exponent_ - 1.0) * a_dot;
  const Eigen::VectorXd grad_f = exponent_ * std::pow(a, exponent_ - 1.0) * 2.0 * ag;

  // Euler-Lagrange with the sphere constraint:
  //   f P gamma'' - nu gamma = grad L - (f P)' v,  (gamma, gamma'') = -|v|^2.
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n_ + 1, n_ + 1);
  kkt.topLeftCorner(n_, n_) = f * P;
  kkt.block(0, n_, n_, 1) = -gamma;
  kkt.block(n_, 0, 1, n_) = gamma.transpose();
  Eigen::VectorXd rhs(n_ + 1);
  rhs.head(n_) = f * grad + lstar * grad_f - (f_dot * P + f * P_dot) * v;
  rhs(n_) = -v.squaredNorm();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw SingularSystemError("LStarSystem: degenerate metric");
  const Eigen::VectorXd sol = lu.solve(rhs);

  PhaseRate out{{}, Eigen::VectorXd(2 * n_)};
  out.coords << v, sol.head(n_);
  return out;
}

double LStarSystem::energy(const PhasePoint& x) const {
  return lagrangian(x.coords.head(n_), x.coords.tail(n_));
}

std::vector<NamedValue> LStarSystem::constraint_residuals(const PhasePoint& x) const {
  const Eigen::VectorXd gamma = x.coords.head(n_);
  return {{"gamma_norm", gamma.norm() - 1.0}, {"tangency", gamma.dot(x.coords.tail(n_))}};
}

// ---------------------------------------------------------------------------

TimeRescaledSystem::TimeRescaledSystem(std::shared_ptr<const System> base,
                                       std::function<double(const PhasePoint&)> factor,
                                       std::string label)
    : System(base->layout()), base_(std::move(base)), factor_(std::move(factor)), label_(std::move(label)) {}

double TimeRescaledSystem::factor(const PhasePoint& x) const {
  const double f = factor_(x);
  if (!(f > 0.0) || !std::isfinite(f)) {
    throw InvariantError("TimeRescaledSystem: time factor must be positive, got " + std::to_string(f));
  }
  return f;
}

PhaseRate TimeRescaledSystem::rate(const PhasePoint& x) const {
  return scaled(base_->rate(x), factor(x));
}

std::function<double(const PhasePoint&)> chaplygin_time_factor(Eigen::VectorXd axes) {
  if ((axes.array() <= 0.0).any()) throw InvariantError("chaplygin_time_factor: axes must be positive");
  return [axes = std::move(axes)](const PhasePoint& x) {
    const Eigen::VectorXd gamma = x.coords.head(axes.size());
    const double a = gamma.dot(axes.cwiseProduct(gamma));
    if (!(a > 0.0)) throw InvariantError("chaplygin_time_factor: (A gamma, gamma) <= 0");
    return std::sqrt(a);
  };
}

}  // namespace lrflow
