#include "lrflow/operators.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lrflow {

Eigen::LLT<Eigen::MatrixXd> factor_spd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() == 0) return Eigen::LLT<Eigen::MatrixXd>(m);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError(std::string(what) + ": matrix is not positive definite");
  }
  const double scale = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  const Eigen::MatrixXd L = llt.matrixL();
  const double min_pivot = L.diagonal().cwiseAbs2().minCoeff();
  if (min_pivot < 1e-12 * scale) {
    throw SingularSystemError(std::string(what) + ": pivot " + std::to_string(min_pivot) +
                              " below 1e-12 (singular)");
  }
  return llt;
}

InertiaOperator::InertiaOperator(int n, Kind kind, Eigen::MatrixXd m)
    : n_(n), kind_(kind), m_(std::move(m)) {
  require_same_dimension(static_cast<int>(m_.rows()), bivector_dim(n), "InertiaOperator");
  require_same_dimension(static_cast<int>(m_.cols()), bivector_dim(n), "InertiaOperator");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw InvariantError("InertiaOperator: matrix is not symmetric (" + std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m_ + m_.transpose());
  llt_ = factor_spd(m_, "InertiaOperator");
}

InertiaOperator InertiaOperator::identity(int n, double scale) {
  const int N = bivector_dim(n);
  return InertiaOperator(n, Kind::kDiagonal, scale * Eigen::MatrixXd::Identity(N, N));
}

InertiaOperator InertiaOperator::diagonal(int n, const Eigen::VectorXd& diag) {
  require_same_dimension(static_cast<int>(diag.size()), bivector_dim(n), "InertiaOperator::diagonal");
  return InertiaOperator(n, Kind::kDiagonal, diag.asDiagonal());
}

InertiaOperator InertiaOperator::dense(int n, const Eigen::MatrixXd& matrix) {
  return InertiaOperator(n, Kind::kDense, matrix);
}

InertiaOperator InertiaOperator::special(const Eigen::VectorXd& axes, double shift) {
  const int n = static_cast<int>(axes.size());
  if (n < 2) throw DimensionError("InertiaOperator::special: need n >= 2");
  if ((axes.array() <= 0.0).any()) {
    throw InvariantError("InertiaOperator::special: axes must be positive");
  }
  double min_product = std::numeric_limits<double>::infinity();
  Eigen::VectorXd diag(bivector_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      diag(k) = axes(i) * axes(j) - shift;
      min_product = std::min(min_product, axes(i) * axes(j));
    }
  }
  if (!(min_product > shift)) {
    throw InvariantError("InertiaOperator::special: min A_i A_j = " + std::to_string(min_product) +
                         " must exceed the shift " + std::to_string(shift));
  }
  InertiaOperator op(n, Kind::kSpecial, diag.asDiagonal());
  op.axes_ = axes;
  op.shift_ = shift;
  return op;
}

InertiaOperator InertiaOperator::projector_augmented(const InertiaOperator& base,
                                                     const std::vector<ProjectorTerm>& terms) {
  Eigen::MatrixXd m = base.matrix();
  for (const ProjectorTerm& t : terms) {
    require_same_dimension(t.gamma.n(), base.n(), "InertiaOperator::projector_augmented");
    m += t.coefficient * wedge_projection_matrix(t.gamma.coords());
  }
  return InertiaOperator(base.n(), Kind::kProjectorAugmented, std::move(m));
}

InertiaOperator InertiaOperator::from_tensor3(const Eigen::Matrix3d& tensor) {
  Eigen::MatrixXd m(3, 3);
  for (int k = 0; k < 3; ++k) {
    const auto [i, j] = bivector_pair(3, k);
    const Eigen::Vector3d v = iso3_inverse(SkewMatrix::basis(3, i, j));
    m.col(k) = iso3(tensor * v).coords();
  }
  return InertiaOperator(3, Kind::kDense, std::move(m));
}

SkewMatrix InertiaOperator::apply(const SkewMatrix& X) const {
  require_same_dimension(X.n(), n_, "InertiaOperator::apply");
  return SkewMatrix::from_coords(n_, m_ * X.coords());
}

Eigen::VectorXd InertiaOperator::apply(const Eigen::VectorXd& coords) const {
  require_same_dimension(static_cast<int>(coords.size()), dim(), "InertiaOperator::apply");
  return m_ * coords;
}

SkewMatrix InertiaOperator::solve(const SkewMatrix& Y) const {
  require_same_dimension(Y.n(), n_, "InertiaOperator::solve");
  return SkewMatrix::from_coords(n_, llt_.solve(Y.coords()));
}

Eigen::VectorXd InertiaOperator::solve(const Eigen::VectorXd& coords) const {
  require_same_dimension(static_cast<int>(coords.size()), dim(), "InertiaOperator::solve");
  return llt_.solve(coords);
}

Eigen::MatrixXd InertiaOperator::solve_columns(const Eigen::MatrixXd& columns) const {
  require_same_dimension(static_cast<int>(columns.rows()), dim(), "InertiaOperator::solve_columns");
  return llt_.solve(columns);
}

Eigen::MatrixXd InertiaOperator::inverse_matrix() const {
  return llt_.solve(Eigen::MatrixXd::Identity(dim(), dim()));
}

InertiaOperator InertiaOperator::plus_identity(double s) const {
  if (kind_ == Kind::kSpecial) return special(axes_, shift_ - s);
  InertiaOperator op(n_, kind_ == Kind::kDiagonal ? Kind::kDiagonal : Kind::kDense,
                     m_ + s * Eigen::MatrixXd::Identity(dim(), dim()));
  return op;
}

namespace {

Eigen::MatrixXd gram(const Eigen::MatrixXd& op, const SubspaceBasis& basis) {
  const Eigen::MatrixXd c = basis.coords_matrix();
  return c.transpose() * op * c;
}

}  // namespace

double restricted_inverse_det(const InertiaOperator& op, const SubspaceBasis& basis) {
  require_same_dimension(basis.n(), op.n(), "restricted_inverse_det");
  if (basis.empty()) return 1.0;
  const Eigen::MatrixXd c = basis.coords_matrix();
  const Eigen::MatrixXd g = c.transpose() * op.solve_columns(c);
  return g.determinant();
}

double restricted_det(const Eigen::MatrixXd& op, const SubspaceBasis& basis) {
  require_same_dimension(static_cast<int>(op.rows()), bivector_dim(basis.n()), "restricted_det");
  if (basis.empty()) return 1.0;
  return gram(op, basis).determinant();
}

SkewMatrix restricted_operator_inverse(const InertiaOperator& op, const SubspaceBasis& basis,
                                       const SkewMatrix& Y) {
  require_same_dimension(basis.n(), op.n(), "restricted_operator_inverse");
  require_same_dimension(Y.n(), op.n(), "restricted_operator_inverse");
  const SkewMatrix inside = basis.project(Y);
  const double outside = (Y - inside).norm();
  if (outside > 1e-10 * std::max(1.0, Y.norm())) {
    throw InvariantError("restricted_operator_inverse: argument leaves the subspace by " +
                         std::to_string(outside));
  }
  if (basis.empty()) return SkewMatrix::zero(op.n());
  const Eigen::MatrixXd c = basis.coords_matrix();
  const Eigen::MatrixXd g = c.transpose() * op.solve_columns(c);
  const Eigen::VectorXd y = c.transpose() * Y.coords();
  const Eigen::VectorXd x = factor_spd(g, "restricted_operator_inverse").solve(y);
  return SkewMatrix::from_coords(op.n(), c * x);
}

}  // namespace lrflow
