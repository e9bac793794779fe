#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrflow/liecore.hpp"

namespace lrflow {

/// Symmetric positive definite operator so(n) -> so(n), stored as a dense
/// matrix in the ordered bivector basis together with its Cholesky factor.
class InertiaOperator {
 public:
  enum class Kind { kDiagonal, kDense, kSpecial, kProjectorAugmented };

  /// coefficient * (X gamma gamma^T + gamma gamma^T X)
  struct ProjectorTerm {
    double coefficient;
    UnitVector gamma;
  };

  static InertiaOperator identity(int n, double scale = 1.0);
  static InertiaOperator diagonal(int n, const Eigen::VectorXd& diag);
  static InertiaOperator dense(int n, const Eigen::MatrixXd& matrix);
  /// I(X ^ Y) = AX ^ AY - shift X ^ Y for A = diag(axes). Requires
  /// min_{i<j} A_i A_j > shift.
  static InertiaOperator special(const Eigen::VectorXd& axes, double shift);
  /// base + sum_i c_i pr_{R^n ^ gamma_i}; the c_i may be negative as long as
  /// the sum stays positive definite.
  static InertiaOperator projector_augmented(const InertiaOperator& base,
                                             const std::vector<ProjectorTerm>& terms);
  /// The bivector operator with I(iso3 v) = iso3(J v) for a 3x3 tensor J.
  static InertiaOperator from_tensor3(const Eigen::Matrix3d& tensor);

  int n() const { return n_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  Kind kind() const { return kind_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  /// Axes A and shift of a special operator (empty / 0 otherwise).
  const Eigen::VectorXd& special_axes() const { return axes_; }
  double special_shift() const { return shift_; }

  SkewMatrix apply(const SkewMatrix& X) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& coords) const;
  SkewMatrix solve(const SkewMatrix& Y) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& coords) const;
  /// Column-wise solve.
  Eigen::MatrixXd solve_columns(const Eigen::MatrixXd& columns) const;
  Eigen::MatrixXd inverse_matrix() const;

  /// this + s * Id (keeps the special structure when present).
  InertiaOperator plus_identity(double s) const;

 private:
  InertiaOperator(int n, Kind kind, Eigen::MatrixXd m);

  int n_;
  Kind kind_;
  Eigen::MatrixXd m_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd axes_;
  double shift_ = 0.0;
};

/// Cholesky factorization that reports a pivot below 1e-12 (relative to the
/// largest diagonal entry) as SingularSystemError.
Eigen::LLT<Eigen::MatrixXd> factor_spd(const Eigen::MatrixXd& m, const char* what);

/// det( <I^{-1} e_i, e_j> ) over an orthonormal basis; 1 for the empty basis.
double restricted_inverse_det(const InertiaOperator& op, const SubspaceBasis& basis);

/// det( <op e_i, e_j> ) over an orthonormal basis; 1 for the empty basis.
double restricted_det(const Eigen::MatrixXd& op, const SubspaceBasis& basis);

/// Applies (pr o B^{-1} o pr |_span)^{-1} to Y, which must lie in span(basis).
SkewMatrix restricted_operator_inverse(const InertiaOperator& op, const SubspaceBasis& basis,
                                       const SkewMatrix& Y);

/// Density of an invariant measure on the flat chart of a system's
/// state space (see diagnostics for the charts in use).
struct MeasureDensity {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> density;

  double operator()(const Eigen::VectorXd& x) const { return density(x); }
};

}  // namespace lrflow
