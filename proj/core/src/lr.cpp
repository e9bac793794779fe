#include <cmath>
#include <string>

#include "lrflow/lr.hpp"
#include "lrflow/multipliers.hpp"

namespace lrflow {

namespace {

Layout lr_layout(int n, int k) {
  Layout layout;
  layout.add_frame("g", n).add_skew("omega", n);
  for (int i = 1; i <= k; ++i) layout.add_skew("alpha" + std::to_string(i), n);
  return layout;
}

}  // namespace

LRSystem::LRSystem(InertiaOperator inertia, SubspaceBasis constraints)
    : System(lr_layout(inertia.n(), constraints.size())),
      inertia_(std::move(inertia)),
      constraints_(std::move(constraints)),
      n_(inertia_.n()),
      N_(bivector_dim(inertia_.n())) {
  require_same_dimension(constraints_.n(), n_, "LRSystem: constraint subspace");
}

PhasePoint LRSystem::make_state(const Rotation& g, const SkewMatrix& omega) const {
  require_same_dimension(g.n(), n_, "LRSystem::make_state");
  require_same_dimension(omega.n(), n_, "LRSystem::make_state");
  PhasePoint x{{g.matrix()}, Eigen::VectorXd(layout_.coord_size())};
  x.coords.head(N_) = omega.coords();
  const Rotation ginv = g.inverse();
  for (int i = 0; i < constraint_count(); ++i) {
    x.coords.segment(N_ * (i + 1), N_) = adjoint_action(ginv, constraints_[i]).coords();
  }
  validate(x);
  return x;
}

Eigen::VectorXd LRSystem::chart_field(const Eigen::VectorXd& coords) const {
  const int k = constraint_count();
  const SkewMatrix omega = SkewMatrix::from_coords(n_, coords.head(N_));
  const SkewMatrix m = inertia_.apply(omega);
  Eigen::MatrixXd rows(k, N_);
  std::vector<SkewMatrix> alphas;
  alphas.reserve(k);
  for (int i = 0; i < k; ++i) {
    rows.row(i) = coords.segment(N_ * (i + 1), N_).transpose();
    alphas.push_back(SkewMatrix::from_coords(n_, coords.segment(N_ * (i + 1), N_)));
  }
  // d/dt <alpha, omega> = <[alpha, omega], omega> + <alpha, omega'> and the
  // first term vanishes by ad-invariance, so the constraint rhs is zero.
  const ConstrainedAcceleration sol = solve_lagrange_dalembert(
      inertia_.matrix(), bracket(m, omega).coords(), rows, Eigen::VectorXd::Zero(k));
  Eigen::VectorXd out(coords.size());
  out.head(N_) = sol.acceleration;
  for (int i = 0; i < k; ++i) out.segment(N_ * (i + 1), N_) = bracket(alphas[i], omega).coords();
  return out;
}

double LRSystem::measure_density(const Eigen::VectorXd& coords) const {
  const int k = constraint_count();
  if (k == 0) return 1.0;
  Eigen::MatrixXd a(N_, k);
  for (int i = 0; i < k; ++i) a.col(i) = coords.segment(N_ * (i + 1), N_);
  const Eigen::MatrixXd gram = a.transpose() * inertia_.solve_columns(a);
  return std::sqrt(gram.determinant());
}

PhaseRate LRSystem::rate(const PhasePoint& x) const {
  return {{SkewMatrix::from_coords(n_, x.coords.head(N_)).matrix()}, chart_field(x.coords)};
}

double LRSystem::energy(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  return 0.5 * w.dot(inertia_.apply(w));
}

std::vector<NamedValue> LRSystem::constraint_residuals(const PhasePoint& x) const {
  std::vector<NamedValue> out;
  const Eigen::VectorXd w = x.coords.head(N_);
  double gram_error = 0.0;
  for (int i = 0; i < constraint_count(); ++i) {
    const Eigen::VectorXd ai = x.coords.segment(N_ * (i + 1), N_);
    out.push_back({"Rconstr_" + std::to_string(i + 1), ai.dot(w)});
    for (int j = 0; j < constraint_count(); ++j) {
      const double target = i == j ? 1.0 : 0.0;
      gram_error =
          std::max(gram_error, std::abs(ai.dot(x.coords.segment(N_ * (j + 1), N_)) - target));
    }
  }
  if (constraint_count() > 0) out.push_back({"alpha_gram", gram_error});
  return out;
}

std::vector<std::string> LRSystem::quantity_names() const {
  return {"energy", "constraints", "measure_density"};
}

Eigen::VectorXd LRSystem::quantity(std::string_view name, const PhasePoint& x) const {
  if (name == "measure_density") return Eigen::VectorXd::Constant(1, measure_density(x.coords));
  return System::quantity(name, x);
}

}  // namespace lrflow
