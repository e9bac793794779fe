#include <cmath>

#include "lrflow/lr.hpp"

namespace lrflow {

namespace {

Layout lplusr_layout(int n) {
  Layout layout;
  layout.add_frame("g", n).add_skew("omega", n);
  return layout;
}

}  // namespace

LplusRSystem::LplusRSystem(InertiaOperator inertia, Eigen::MatrixXd right_inertia, Variant variant)
    : System(lplusr_layout(inertia.n())),
      inertia_(std::move(inertia)),
      pi0_(std::move(right_inertia)),
      variant_(variant),
      n_(inertia_.n()),
      N_(bivector_dim(inertia_.n())) {
  require_same_dimension(static_cast<int>(pi0_.rows()), N_, "LplusRSystem: right inertia");
  require_same_dimension(static_cast<int>(pi0_.cols()), N_, "LplusRSystem: right inertia");
  const double asym = (pi0_ - pi0_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, pi0_.cwiseAbs().maxCoeff())) {
    throw InvariantError("LplusRSystem: right inertia is not symmetric");
  }
  pi0_ = 0.5 * (pi0_ + pi0_.transpose());
  // B at g = Id; it is conjugate to B at any other g only when I is
  // isotropic, so this is a first check, not a guarantee.
  factor_spd(inertia_.matrix() + pi0_, "LplusRSystem: total inertia at identity");
}

PhasePoint LplusRSystem::make_state(const Rotation& g, const SkewMatrix& omega) const {
  require_same_dimension(g.n(), n_, "LplusRSystem::make_state");
  require_same_dimension(omega.n(), n_, "LplusRSystem::make_state");
  factor_spd(total_inertia(g.matrix()), "LplusRSystem: total inertia");
  PhasePoint x{{g.matrix()}, omega.coords()};
  validate(x);
  return x;
}

Eigen::MatrixXd LplusRSystem::conjugated_right_inertia(const Eigen::MatrixXd& g) const {
  const Eigen::MatrixXd r = congruence_matrix(g);
  return r.transpose() * pi0_ * r;
}

Eigen::MatrixXd LplusRSystem::total_inertia(const Eigen::MatrixXd& g) const {
  return inertia_.matrix() + conjugated_right_inertia(g);
}

Eigen::VectorXd LplusRSystem::acceleration(const Eigen::MatrixXd& pi,
                                           const Eigen::VectorXd& omega) const {
  const Eigen::MatrixXd b = inertia_.matrix() + pi;
  const SkewMatrix w = SkewMatrix::from_coords(n_, omega);
  const auto llt = factor_spd(b, "LplusRSystem: total inertia");
  if (variant_ == Variant::kNonholonomic) {
    return llt.solve(bracket(inertia_.apply(w), w).coords());
  }
  // d/dt(B w) = [B w, w] + [w, Pi w], and d/dt(B w) = B w' + Pi' w with
  // Pi' w = [Pi, ad_w] w = -[w, Pi w].
  const SkewMatrix bw = SkewMatrix::from_coords(n_, b * omega);
  const SkewMatrix piw = SkewMatrix::from_coords(n_, pi * omega);
  const SkewMatrix pi_dot_w = -bracket(w, piw);
  return llt.solve((bracket(bw, w) + bracket(w, piw) - pi_dot_w).coords());
}

PhaseRate LplusRSystem::rate(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  return {{SkewMatrix::from_coords(n_, w).matrix()},
          acceleration(conjugated_right_inertia(x.frames[0]), w)};
}

double LplusRSystem::energy(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  return 0.5 * w.dot(total_inertia(x.frames[0]) * w);
}

std::vector<std::string> LplusRSystem::quantity_names() const {
  return {"energy", "constraints", "momentum", "measure_density"};
}

Eigen::VectorXd LplusRSystem::quantity(std::string_view name, const PhasePoint& x) const {
  if (name == "momentum") {
    const Eigen::VectorXd bw = total_inertia(x.frames[0]) * x.coords.head(N_);
    return Eigen::VectorXd::Constant(1, bw.squaredNorm());
  }
  if (name == "measure_density") return Eigen::VectorXd::Constant(1, measure_density(chart_point(x)));
  return System::quantity(name, x);
}

Eigen::VectorXd LplusRSystem::chart_point(const PhasePoint& x) const {
  const Eigen::MatrixXd pi = conjugated_right_inertia(x.frames[0]);
  Eigen::VectorXd y(N_ + N_ * (N_ + 1) / 2);
  y.head(N_) = x.coords.head(N_);
  int k = N_;
  for (int i = 0; i < N_; ++i) {
    for (int j = i; j < N_; ++j) y(k++) = pi(i, j);
  }
  return y;
}

Eigen::MatrixXd LplusRSystem::chart_pi(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd pi(N_, N_);
  int k = N_;
  for (int i = 0; i < N_; ++i) {
    for (int j = i; j < N_; ++j) {
      pi(i, j) = y(k);
      pi(j, i) = y(k);
      ++k;
    }
  }
  return pi;
}

Eigen::VectorXd LplusRSystem::chart_field(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd w = y.head(N_);
  const Eigen::MatrixXd pi = chart_pi(y);
  const Eigen::MatrixXd ad = bracket_matrix(SkewMatrix::from_coords(n_, w));
  const Eigen::MatrixXd pi_dot = pi * ad - ad * pi;
  Eigen::VectorXd out(y.size());
  out.head(N_) = acceleration(pi, w);
  int k = N_;
  for (int i = 0; i < N_; ++i) {
    for (int j = i; j < N_; ++j) out(k++) = pi_dot(i, j);
  }
  return out;
}

double LplusRSystem::measure_density(const Eigen::VectorXd& y) const {
  return std::sqrt((inertia_.matrix() + chart_pi(y)).determinant());
}

}  // namespace lrflow
