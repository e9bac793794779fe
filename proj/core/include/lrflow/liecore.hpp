#pragma once

// Linear algebra on so(n) and SO(n).
//
// so(n) carries the Ad-invariant product <X, Y> = -1/2 tr(XY). The ordered
// bivector basis E_ij = e_i e_j^T - e_j e_i^T (i < j, lexicographic) is
// orthonormal for it, and the coordinate of X along E_ij is simply X(i, j).
// Every operator on so(n) in this library is a dense N x N matrix in that
// basis, N = n(n-1)/2.

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lrflow/error.hpp"

namespace lrflow {

inline constexpr double kSkewTolerance = 1e-12;
inline constexpr double kRotationTolerance = 1e-10;
inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kRankTolerance = 1e-10;

/// dim so(n) = n(n-1)/2.
constexpr int bivector_dim(int n) { return n * (n - 1) / 2; }

/// Position of E_ij (i < j) in the ordered bivector basis.
constexpr int bivector_index(int n, int i, int j) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

/// Inverse of bivector_index.
std::pair<int, int> bivector_pair(int n, int k);

/// n from N = n(n-1)/2; throws DimensionError if N is not triangular.
int dimension_from_bivector_dim(int N);

class SkewMatrix {
 public:
  SkewMatrix() = default;

  /// Checks m + m^T = 0 (relative tolerance) and stores the exact skew part.
  explicit SkewMatrix(const Eigen::MatrixXd& m, double tol = kSkewTolerance);

  static SkewMatrix zero(int n);
  /// E_ij = e_i ^ e_j.
  static SkewMatrix basis(int n, int i, int j);
  static SkewMatrix from_coords(int n, const Eigen::VectorXd& coords);
  /// (m - m^T) / 2 without checking.
  static SkewMatrix skew_part(const Eigen::MatrixXd& m);

  int n() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::VectorXd coords() const;
  double operator()(int i, int j) const { return m_(i, j); }

  /// Norm induced by inner().
  double norm() const;

  SkewMatrix& operator+=(const SkewMatrix& other);
  SkewMatrix& operator-=(const SkewMatrix& other);
  SkewMatrix& operator*=(double s);

  friend SkewMatrix operator+(SkewMatrix a, const SkewMatrix& b) { return a += b; }
  friend SkewMatrix operator-(SkewMatrix a, const SkewMatrix& b) { return a -= b; }
  friend SkewMatrix operator*(double s, SkewMatrix a) { return a *= s; }
  friend SkewMatrix operator*(SkewMatrix a, double s) { return a *= s; }
  friend SkewMatrix operator-(SkewMatrix a) { return a *= -1.0; }

 private:
  struct Unchecked {};
  SkewMatrix(Eigen::MatrixXd m, Unchecked) : m_(std::move(m)) {}

  Eigen::MatrixXd m_;
};

class Rotation {
 public:
  /// Checks g^T g = Id and det g = +1 within tol.
  explicit Rotation(const Eigen::MatrixXd& g, double tol = kRotationTolerance);

  static Rotation identity(int n);
  /// Nearest rotation (orthogonal polar factor). Throws SingularSystemError
  /// if m is (numerically) singular or orientation reversing.
  static Rotation project(const Eigen::MatrixXd& m);
  static Rotation exp(const SkewMatrix& X);

  int n() const { return static_cast<int>(g_.rows()); }
  const Eigen::MatrixXd& matrix() const { return g_; }
  Rotation inverse() const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& v) const;
  friend Rotation operator*(const Rotation& a, const Rotation& b);

 private:
  struct Unchecked {};
  Rotation(Eigen::MatrixXd g, Unchecked) : g_(std::move(g)) {}

  Eigen::MatrixXd g_;
};

class UnitVector {
 public:
  explicit UnitVector(const Eigen::VectorXd& v, double tol = kUnitTolerance);

  static UnitVector normalized(const Eigen::VectorXd& v);
  static UnitVector axis(int n, int i);

  int n() const { return static_cast<int>(v_.size()); }
  const Eigen::VectorXd& coords() const { return v_; }
  double operator[](int i) const { return v_(i); }

 private:
  Eigen::VectorXd v_;
};

/// Orthonormal list of elements of so(n) spanning a subspace.
class SubspaceBasis {
 public:
  explicit SubspaceBasis(int n) : n_(n) {}

  /// Gram-Schmidt in <.,.>. Generators whose residual falls below
  /// rank_tol * |generator| are dropped and counted in dropped_generators().
  static SubspaceBasis orthonormalize(int n, std::span<const SkewMatrix> generators,
                                      double rank_tol = kRankTolerance);
  /// R^n ^ gamma, completed from the Householder reflection taking e_n to gamma.
  static SubspaceBasis wedge_with(const Eigen::VectorXd& gamma);
  /// (R^n ^ gamma)^perp = so(gamma^perp).
  static SubspaceBasis wedge_complement(const Eigen::VectorXd& gamma);
  static SubspaceBasis whole(int n);

  int n() const { return n_; }
  int size() const { return static_cast<int>(elements_.size()); }
  bool empty() const { return elements_.empty(); }
  const std::vector<SkewMatrix>& elements() const { return elements_; }
  const SkewMatrix& operator[](int i) const { return elements_[i]; }
  int dropped_generators() const { return dropped_; }

  SubspaceBasis complement() const;
  /// Basis of Ad_g(span), i.e. {g e g^{-1}}.
  SubspaceBasis transported(const Eigen::MatrixXd& g) const;

  SkewMatrix project(const SkewMatrix& X) const;
  /// N x k matrix whose columns are the element coordinates.
  Eigen::MatrixXd coords_matrix() const;
  /// N x N orthogonal projector.
  Eigen::MatrixXd projector_matrix() const;

 private:
  int n_;
  int dropped_ = 0;
  std::vector<SkewMatrix> elements_;
};

SkewMatrix wedge(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
inline SkewMatrix wedge(const UnitVector& x, const Eigen::VectorXd& y) {
  return wedge(x.coords(), y);
}

double inner(const SkewMatrix& X, const SkewMatrix& Y);

/// [X, Y] = XY - YX.
SkewMatrix bracket(const SkewMatrix& X, const SkewMatrix& Y);

/// Ad_g X = g X g^{-1}.
SkewMatrix adjoint_action(const Rotation& g, const SkewMatrix& X);
/// m X m^T for an arbitrary square m; equals Ad_m when m is orthogonal.
SkewMatrix congruence(const Eigen::MatrixXd& m, const SkewMatrix& X);

/// Orthogonal projection onto R^n ^ gamma: X gamma gamma^T + gamma gamma^T X.
SkewMatrix project_onto_wedge(const UnitVector& gamma, const SkewMatrix& X);

/// Same formula for any vector; no normalization check. Used on the
/// extended (off-sphere) phase space and at integrator stages.
SkewMatrix wedge_projection(const Eigen::VectorXd& gamma, const SkewMatrix& X);

/// Matrix of the map X -> X g g^T + g g^T X in the bivector basis.
Eigen::MatrixXd wedge_projection_matrix(const Eigen::VectorXd& gamma);

/// Matrix of X -> m X m^T in the bivector basis (Ad_m for orthogonal m).
Eigen::MatrixXd congruence_matrix(const Eigen::MatrixXd& m);

/// Matrix of ad_X = [X, .] in the bivector basis.
Eigen::MatrixXd bracket_matrix(const SkewMatrix& X);

/// n x (n-1) orthonormal basis of gamma^perp: columns 1..n-1 of the
/// Householder reflection exchanging e_n and -gamma/|gamma|.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& gamma);

/// so(3) <-> R^3 with iso3(a x b) = [iso3(a), iso3(b)] (the hat map,
/// iso3(v)_ij = -eps_ijl v_l).
SkewMatrix iso3(const Eigen::Vector3d& v);
Eigen::Vector3d iso3_inverse(const SkewMatrix& X);

/// Matrix exponential by scaling and squaring with a degree-8 Pade approximant.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

void require_same_dimension(int a, int b, const char* what);

}  // namespace lrflow
