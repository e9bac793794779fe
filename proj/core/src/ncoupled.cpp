#include <string>

#include "lrflow/coupled.hpp"
#include "lrflow/multipliers.hpp"

namespace lrflow {

namespace {

Layout ncoupled_layout(int n, std::size_t bodies) {
  Layout layout;
  layout.add_frame("g", n).add_skew("omega", n);
  for (std::size_t i = 1; i <= bodies; ++i) layout.add_skew("W" + std::to_string(i), n);
  return layout;
}

}  // namespace

NCoupledSystem::NCoupledSystem(InertiaOperator inertia, std::vector<CoupledBody> bodies)
    : System(ncoupled_layout(inertia.n(), bodies.size())),
      inertia_(std::move(inertia)),
      bodies_(std::move(bodies)),
      n_(inertia_.n()),
      N_(bivector_dim(inertia_.n())) {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const CoupledBody& b = bodies_[i];
    const std::string what = "NCoupledSystem: body " + std::to_string(i + 1);
    if (!(b.inertia > 0.0)) throw InvariantError(what + " needs positive inertia");
    require_same_dimension(static_cast<int>(b.A.cols()), N_, what.c_str());
    require_same_dimension(static_cast<int>(b.B.cols()), N_, what.c_str());
    require_same_dimension(static_cast<int>(b.A.rows()), static_cast<int>(b.B.rows()), what.c_str());
    const Eigen::MatrixXd c = b.B * b.B.transpose();
    const auto llt = factor_spd(c, (what + ": B B^T").c_str());
    gram_inverse_.push_back(llt.solve(Eigen::MatrixXd::Identity(c.rows(), c.cols())));
  }
}

std::vector<CoupledBody> NCoupledSystem::commutator_bodies(const std::vector<SkewMatrix>& gammas,
                                                           const std::vector<double>& rhos,
                                                           const std::vector<double>& inertias) {
  if (gammas.size() != rhos.size() || gammas.size() != inertias.size()) {
    throw DimensionError("commutator_bodies: gammas, rhos and inertias differ in length");
  }
  std::vector<CoupledBody> out;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const int N = bivector_dim(gammas[i].n());
    // [Omega, Gamma] = -ad_Gamma Omega.
    out.push_back({inertias[i], -bracket_matrix(gammas[i]),
                   rhos[i] * Eigen::MatrixXd::Identity(N, N)});
  }
  return out;
}

PhasePoint NCoupledSystem::make_state(const Rotation& g, const SkewMatrix& omega,
                                      const std::vector<SkewMatrix>& Ws) const {
  require_same_dimension(g.n(), n_, "NCoupledSystem::make_state");
  require_same_dimension(omega.n(), n_, "NCoupledSystem::make_state");
  require_same_dimension(static_cast<int>(Ws.size()), static_cast<int>(bodies_.size()),
                         "NCoupledSystem::make_state: W count");
  PhasePoint x{{g.matrix()}, Eigen::VectorXd(layout_.coord_size())};
  x.coords.head(N_) = omega.coords();
  for (std::size_t i = 0; i < Ws.size(); ++i) {
    require_same_dimension(Ws[i].n(), n_, "NCoupledSystem::make_state");
    x.coords.segment(N_ * static_cast<int>(i + 1), N_) = Ws[i].coords();
  }
  validate(x);
  return x;
}

PhasePoint NCoupledSystem::make_state(const Rotation& g, const SkewMatrix& omega) const {
  const Eigen::VectorXd space = congruence_matrix(g.matrix()) * omega.coords();
  std::vector<SkewMatrix> Ws;
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const CoupledBody& b = bodies_[i];
    Ws.push_back(SkewMatrix::from_coords(n_, -b.B.transpose() * (gram_inverse_[i] * (b.A * space))));
  }
  return make_state(g, omega, Ws);
}

Eigen::MatrixXd NCoupledSystem::reduced_inertia(const Eigen::MatrixXd& g) const {
  const Eigen::MatrixXd r = congruence_matrix(g);
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(N_, N_);
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const CoupledBody& b = bodies_[i];
    pi += b.inertia * b.A.transpose() * gram_inverse_[i] * b.A;
  }
  return inertia_.matrix() + r.transpose() * pi * r;
}

PhaseRate NCoupledSystem::rate(const PhasePoint& x) const {
  const int dim = layout_.coord_size();
  const SkewMatrix omega = SkewMatrix::from_coords(n_, x.coords.head(N_));
  const Eigen::MatrixXd r = congruence_matrix(x.frames[0]);

  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(dim, dim);
  mass.topLeftCorner(N_, N_) = inertia_.matrix();
  int rows_count = 0;
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const int off = N_ * static_cast<int>(i + 1);
    mass.block(off, off, N_, N_) = bodies_[i].inertia * Eigen::MatrixXd::Identity(N_, N_);
    rows_count += static_cast<int>(bodies_[i].A.rows());
  }
  Eigen::VectorXd force = Eigen::VectorXd::Zero(dim);
  force.head(N_) = bracket(inertia_.apply(omega), omega).coords();

  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(rows_count, dim);
  int row = 0;
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const CoupledBody& b = bodies_[i];
    const int k = static_cast<int>(b.A.rows());
    rows.block(row, 0, k, N_) = b.A * r;
    rows.block(row, N_ * static_cast<int>(i + 1), k, N_) = b.B;
    row += k;
  }
  const ConstrainedAcceleration sol =
      solve_lagrange_dalembert(mass, force, rows, Eigen::VectorXd::Zero(rows_count));
  return {{omega.matrix()}, sol.acceleration};
}

double NCoupledSystem::energy(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  double e = 0.5 * w.dot(inertia_.apply(w));
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    e += 0.5 * bodies_[i].inertia * x.coords.segment(N_ * static_cast<int>(i + 1), N_).squaredNorm();
  }
  return e;
}

std::vector<NamedValue> NCoupledSystem::constraint_residuals(const PhasePoint& x) const {
  const Eigen::VectorXd space = congruence_matrix(x.frames[0]) * x.coords.head(N_);
  std::vector<NamedValue> out;
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const CoupledBody& b = bodies_[i];
    const Eigen::VectorXd res =
        b.A * space + b.B * x.coords.segment(N_ * static_cast<int>(i + 1), N_);
    out.push_back({"cN_" + std::to_string(i + 1), res.size() ? res.cwiseAbs().maxCoeff() : 0.0});
  }
  return out;
}

}  // namespace lrflow
