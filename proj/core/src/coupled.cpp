#include <cmath>
#include <string>

#include "lrflow/coupled.hpp"
#include "lrflow/multipliers.hpp"

namespace lrflow {

namespace {

SubspaceBasis complement_of_union(int n, const std::vector<const SubspaceBasis*>& parts) {
  std::vector<SkewMatrix> gens;
  for (const SubspaceBasis* b : parts) gens.insert(gens.end(), b->elements().begin(), b->elements().end());
  return SubspaceBasis::orthonormalize(n, gens).complement();
}

// Orthonormal basis of Ad_{g^-1} h. g is orthogonal on the group but only
// approximately so at Runge-Kutta stages; re-orthonormalizing keeps the
// projector exact there.
SubspaceBasis body_subspace(const SubspaceBasis& h, const Eigen::MatrixXd& g) {
  const SubspaceBasis moved = h.transported(g.transpose());
  return SubspaceBasis::orthonormalize(h.n(), moved.elements());
}

}  // namespace

void CoupledData::check() const {
  const int dim = n();
  require_same_dimension(h0.n(), dim, "CoupledData: h0");
  if (!(peripheral_inertia > 0.0)) throw InvariantError("CoupledData: D must be positive");
  for (std::size_t i = 0; i < peripherals.size(); ++i) {
    const PeripheralSubspace& p = peripherals[i];
    require_same_dimension(p.subspace.n(), dim, "CoupledData: h_i");
    if (p.rho == 0.0) throw InvariantError("CoupledData: rho_i must be nonzero");
    for (std::size_t j = 0; j < i; ++j) {
      if (p.subspace.empty() || peripherals[j].subspace.empty()) continue;
      const double overlap =
          (p.subspace.coords_matrix().transpose() * peripherals[j].subspace.coords_matrix())
              .cwiseAbs()
              .maxCoeff();
      if (overlap > 1e-10) {
        throw InvariantError("CoupledData: h_" + std::to_string(j + 1) + " and h_" +
                             std::to_string(i + 1) + " are not orthogonal");
      }
    }
  }
}

SubspaceBasis CoupledData::free_peripheral_subspace() const {
  std::vector<const SubspaceBasis*> parts;
  for (const PeripheralSubspace& p : peripherals) parts.push_back(&p.subspace);
  return complement_of_union(n(), parts);
}

SubspaceBasis CoupledData::noether_subspace() const {
  std::vector<const SubspaceBasis*> parts{&h0};
  for (const PeripheralSubspace& p : peripherals) parts.push_back(&p.subspace);
  return complement_of_union(n(), parts);
}

Eigen::MatrixXd CoupledData::total_inertia(const Eigen::MatrixXd& g) const {
  const Eigen::MatrixXd r = congruence_matrix(g);
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(r.rows(), r.cols());
  for (const PeripheralSubspace& p : peripherals) {
    pi += (peripheral_inertia / (p.rho * p.rho)) * p.subspace.projector_matrix();
  }
  return inertia.matrix() + r.transpose() * pi * r;
}

// ---------------------------------------------------------------------------

namespace {

Layout coupled_full_layout(int n) {
  Layout layout;
  layout.add_frame("g", n).add_skew("omega", n).add_skew("W", n);
  return layout;
}

}  // namespace

CoupledFullSystem::CoupledFullSystem(CoupledData data)
    : System(coupled_full_layout(data.n())),
      data_(std::move(data)),
      k_(data_.n()),
      k0_(data_.n()),
      n_(data_.n()),
      N_(bivector_dim(data_.n())) {
  data_.check();
  k_ = data_.free_peripheral_subspace();
  k0_ = data_.noether_subspace();
}

PhasePoint CoupledFullSystem::make_state(const Rotation& g, const SkewMatrix& omega,
                                         const SkewMatrix& W) const {
  require_same_dimension(g.n(), n_, "CoupledFullSystem::make_state");
  require_same_dimension(omega.n(), n_, "CoupledFullSystem::make_state");
  require_same_dimension(W.n(), n_, "CoupledFullSystem::make_state");
  PhasePoint x{{g.matrix()}, Eigen::VectorXd(2 * N_)};
  x.coords << omega.coords(), W.coords();
  validate(x);
  return x;
}

PhaseRate CoupledFullSystem::rate(const PhasePoint& x) const {
  const Eigen::MatrixXd& g = x.frames[0];
  const Eigen::VectorXd w = x.coords.head(N_);
  const SkewMatrix omega = SkewMatrix::from_coords(n_, w);
  const Eigen::MatrixXd rt = congruence_matrix(g).transpose();

  int rows_count = data_.h0.size();
  for (const PeripheralSubspace& p : data_.peripherals) rows_count += p.subspace.size();

  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(2 * N_, 2 * N_);
  mass.topLeftCorner(N_, N_) = data_.inertia.matrix();
  mass.bottomRightCorner(N_, N_) = data_.peripheral_inertia * Eigen::MatrixXd::Identity(N_, N_);

  Eigen::VectorXd force = Eigen::VectorXd::Zero(2 * N_);
  force.head(N_) = bracket(data_.inertia.apply(omega), omega).coords();

  // Constraint <Ad_g omega, c> = 0 for c in h0 and
  // <Ad_g omega + rho_i W, c> = 0 for c in h_i. Since
  // d/dt Ad_g omega = Ad_g omega', the rows are (Ad_g^T c, rho_i c) and the
  // right-hand side vanishes.
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(rows_count, 2 * N_);
  int r = 0;
  for (const SkewMatrix& c : data_.h0.elements()) {
    rows.row(r++).head(N_) = (rt * c.coords()).transpose();
  }
  for (const PeripheralSubspace& p : data_.peripherals) {
    for (const SkewMatrix& c : p.subspace.elements()) {
      const Eigen::VectorXd cc = c.coords();
      rows.row(r).head(N_) = (rt * cc).transpose();
      rows.row(r).tail(N_) = p.rho * cc.transpose();
      ++r;
    }
  }
  const ConstrainedAcceleration sol =
      solve_lagrange_dalembert(mass, force, rows, Eigen::VectorXd::Zero(rows_count));
  return {{omega.matrix()}, sol.acceleration};
}

double CoupledFullSystem::energy(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  const Eigen::VectorXd W = x.coords.tail(N_);
  return 0.5 * w.dot(data_.inertia.apply(w)) + 0.5 * data_.peripheral_inertia * W.squaredNorm();
}

std::vector<NamedValue> CoupledFullSystem::constraint_residuals(const PhasePoint& x) const {
  const Eigen::VectorXd space = congruence_matrix(x.frames[0]) * x.coords.head(N_);
  const Eigen::VectorXd W = x.coords.tail(N_);
  std::vector<NamedValue> out;
  for (int k = 0; k < data_.h0.size(); ++k) {
    out.push_back({"c0_" + std::to_string(k + 1), data_.h0[k].coords().dot(space)});
  }
  for (std::size_t i = 0; i < data_.peripherals.size(); ++i) {
    const PeripheralSubspace& p = data_.peripherals[i];
    for (int k = 0; k < p.subspace.size(); ++k) {
      out.push_back({"cconstr_" + std::to_string(i + 1) + "_" + std::to_string(k + 1),
                     p.subspace[k].coords().dot(space + p.rho * W)});
    }
  }
  return out;
}

std::vector<std::string> CoupledFullSystem::quantity_names() const {
  return {"energy", "constraints", "noether_W", "noether_momentum"};
}

Eigen::VectorXd CoupledFullSystem::quantity(std::string_view name, const PhasePoint& x) const {
  if (name == "noether_W") return k_.coords_matrix().transpose() * x.coords.tail(N_);
  if (name == "noether_momentum") {
    const Eigen::VectorXd m = data_.inertia.apply(Eigen::VectorXd(x.coords.head(N_)));
    return k0_.coords_matrix().transpose() * (congruence_matrix(x.frames[0]) * m);
  }
  return System::quantity(name, x);
}

// ---------------------------------------------------------------------------

namespace {

Layout coupled_reduced_layout(int n) {
  Layout layout;
  layout.add_frame("g", n).add_skew("omega", n);
  return layout;
}

}  // namespace

CoupledReducedSystem::CoupledReducedSystem(CoupledData data)
    : System(coupled_reduced_layout(data.n())),
      data_(std::move(data)),
      k0_(data_.n()),
      n_(data_.n()),
      N_(bivector_dim(data_.n())) {
  data_.check();
  k0_ = data_.noether_subspace();
}

PhasePoint CoupledReducedSystem::make_state(const Rotation& g, const SkewMatrix& omega) const {
  require_same_dimension(g.n(), n_, "CoupledReducedSystem::make_state");
  require_same_dimension(omega.n(), n_, "CoupledReducedSystem::make_state");
  PhasePoint x{{g.matrix()}, omega.coords()};
  validate(x);
  return x;
}

PhaseRate CoupledReducedSystem::rate(const PhasePoint& x) const {
  const Eigen::MatrixXd& g = x.frames[0];
  const SkewMatrix omega = SkewMatrix::from_coords(n_, x.coords.head(N_));
  const InertiaOperator b = InertiaOperator::dense(n_, data_.total_inertia(g));

  const SkewMatrix bw = b.apply(omega);
  const SkewMatrix iw = data_.inertia.apply(omega);
  const SkewMatrix piw = bw - iw;
  // Pi^g = Ad_g^T Pi^0 Ad_g, hence Pi' = [Pi, ad_omega] and Pi' omega = -[omega, Pi omega].
  const SkewMatrix pi_dot_w = -bracket(omega, piw);

  SkewMatrix rhs = bracket(bw, omega) - pi_dot_w;
  if (!data_.h0.empty()) {
    const SubspaceBasis h0g = body_subspace(data_.h0, g);
    const SkewMatrix y = h0g.project(b.solve(bracket(iw, omega)));
    rhs -= restricted_operator_inverse(b, h0g, y);
  }
  return {{omega.matrix()}, b.solve(rhs).coords()};
}

double CoupledReducedSystem::energy(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  return 0.5 * w.dot(data_.total_inertia(x.frames[0]) * w);
}

std::vector<NamedValue> CoupledReducedSystem::constraint_residuals(const PhasePoint& x) const {
  const Eigen::VectorXd space = congruence_matrix(x.frames[0]) * x.coords.head(N_);
  std::vector<NamedValue> out;
  for (int k = 0; k < data_.h0.size(); ++k) {
    out.push_back({"c0_" + std::to_string(k + 1), data_.h0[k].coords().dot(space)});
  }
  return out;
}

std::vector<std::string> CoupledReducedSystem::quantity_names() const {
  return {"energy", "constraints", "noether_momentum"};
}

Eigen::VectorXd CoupledReducedSystem::quantity(std::string_view name, const PhasePoint& x) const {
  if (name == "noether_momentum") {
    const Eigen::VectorXd m = data_.inertia.apply(Eigen::VectorXd(x.coords.head(N_)));
    return k0_.coords_matrix().transpose() * (congruence_matrix(x.frames[0]) * m);
  }
  return System::quantity(name, x);
}

}  // namespace lrflow
