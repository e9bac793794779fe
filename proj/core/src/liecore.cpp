#include "lrflow/liecore.hpp"

#include <cmath>
#include <string>

namespace lrflow {

void require_same_dimension(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

std::pair<int, int> bivector_pair(int n, int k) {
  for (int i = 0; i < n - 1; ++i) {
    const int row = n - 1 - i;
    if (k < row) return {i, i + 1 + k};
    k -= row;
  }
  throw DimensionError("bivector index out of range");
}

int dimension_from_bivector_dim(int N) {
  for (int n = 2; bivector_dim(n) <= N; ++n) {
    if (bivector_dim(n) == N) return n;
  }
  throw DimensionError("no n with n(n-1)/2 = " + std::to_string(N));
}

// ---------------------------------------------------------------- SkewMatrix

SkewMatrix::SkewMatrix(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("SkewMatrix: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m + m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw InvariantError("SkewMatrix: |X + X^T| = " + std::to_string(asym));
  }
  m_ = 0.5 * (m - m.transpose());
}

SkewMatrix SkewMatrix::zero(int n) {
  return SkewMatrix(Eigen::MatrixXd::Zero(n, n), Unchecked{});
}

SkewMatrix SkewMatrix::basis(int n, int i, int j) {
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    throw DimensionError("SkewMatrix::basis: bad index pair");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m(i, j) = 1.0;
  m(j, i) = -1.0;
  return SkewMatrix(std::move(m), Unchecked{});
}

SkewMatrix SkewMatrix::from_coords(int n, const Eigen::VectorXd& coords) {
  require_same_dimension(static_cast<int>(coords.size()), bivector_dim(n),
                         "SkewMatrix::from_coords");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      m(i, j) = coords(k);
      m(j, i) = -coords(k);
    }
  }
  return SkewMatrix(std::move(m), Unchecked{});
}

SkewMatrix SkewMatrix::skew_part(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("SkewMatrix: matrix is not square");
  return SkewMatrix(0.5 * (m - m.transpose()), Unchecked{});
}

Eigen::VectorXd SkewMatrix::coords() const {
  const int dim = n();
  Eigen::VectorXd c(bivector_dim(dim));
  int k = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) c(k++) = m_(i, j);
  }
  return c;
}

double SkewMatrix::norm() const { return std::sqrt(inner(*this, *this)); }

SkewMatrix& SkewMatrix::operator+=(const SkewMatrix& other) {
  require_same_dimension(n(), other.n(), "SkewMatrix +");
  m_ += other.m_;
  return *this;
}

SkewMatrix& SkewMatrix::operator-=(const SkewMatrix& other) {
  require_same_dimension(n(), other.n(), "SkewMatrix -");
  m_ -= other.m_;
  return *this;
}

SkewMatrix& SkewMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

// ------------------------------------------------------------------ Rotation

Rotation::Rotation(const Eigen::MatrixXd& g, double tol) {
  if (g.rows() != g.cols()) throw DimensionError("Rotation: matrix is not square");
  const Eigen::MatrixXd gram = g.transpose() * g;
  const double orth = (gram - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  if (orth > tol) {
    throw InvariantError("Rotation: |g^T g - Id| = " + std::to_string(orth));
  }
  const double det = g.determinant();
  if (std::abs(det - 1.0) > tol) {
    throw InvariantError("Rotation: det g = " + std::to_string(det));
  }
  g_ = g;
}

Rotation Rotation::identity(int n) {
  return Rotation(Eigen::MatrixXd::Identity(n, n), Unchecked{});
}

Rotation Rotation::project(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("Rotation::project: matrix is not square");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < 1e-8 * std::max(1.0, sv(0))) {
    throw SingularSystemError("Rotation::project: singular polar factor");
  }
  Eigen::MatrixXd q = svd.matrixU() * svd.matrixV().transpose();
  if (q.determinant() < 0.0) {
    throw SingularSystemError("Rotation::project: orientation-reversing matrix");
  }
  return Rotation(std::move(q), Unchecked{});
}

Rotation Rotation::exp(const SkewMatrix& X) {
  return Rotation(expm(X.matrix()), Unchecked{});
}

Rotation Rotation::inverse() const {
  return Rotation(Eigen::MatrixXd(g_.transpose()), Unchecked{});
}

Eigen::VectorXd Rotation::operator*(const Eigen::VectorXd& v) const {
  require_same_dimension(n(), static_cast<int>(v.size()), "Rotation * vector");
  return g_ * v;
}

Rotation operator*(const Rotation& a, const Rotation& b) {
  require_same_dimension(a.n(), b.n(), "Rotation * Rotation");
  return Rotation(Eigen::MatrixXd(a.g_ * b.g_), Rotation::Unchecked{});
}

// ---------------------------------------------------------------- UnitVector

UnitVector::UnitVector(const Eigen::VectorXd& v, double tol) {
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > tol) {
    throw InvariantError("UnitVector: |v| = " + std::to_string(norm));
  }
  v_ = v / norm;
}

UnitVector UnitVector::normalized(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw InvariantError("UnitVector::normalized: zero vector");
  return UnitVector(v / norm);
}

UnitVector UnitVector::axis(int n, int i) {
  return UnitVector(Eigen::VectorXd::Unit(n, i));
}

// ------------------------------------------------------------ SubspaceBasis

SubspaceBasis SubspaceBasis::orthonormalize(int n, std::span<const SkewMatrix> generators,
                                            double rank_tol) {
  SubspaceBasis basis(n);
  for (const SkewMatrix& gen : generators) {
    require_same_dimension(gen.n(), n, "SubspaceBasis::orthonormalize");
    const double gen_norm = gen.norm();
    SkewMatrix v = gen;
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (const SkewMatrix& e : basis.elements_) v -= inner(v, e) * e;
    }
    const double res = v.norm();
    if (gen_norm == 0.0 || res < rank_tol * gen_norm) {
      ++basis.dropped_;
      continue;
    }
    basis.elements_.push_back((1.0 / res) * v);
  }
  return basis;
}

SubspaceBasis SubspaceBasis::wedge_with(const Eigen::VectorXd& gamma) {
  const int n = static_cast<int>(gamma.size());
  const Eigen::VectorXd g = gamma.normalized();
  const Eigen::MatrixXd t = tangent_basis(g);
  SubspaceBasis basis(n);
  for (int k = 0; k < n - 1; ++k) basis.elements_.push_back(wedge(t.col(k), g));
  return basis;
}

SubspaceBasis SubspaceBasis::wedge_complement(const Eigen::VectorXd& gamma) {
  const int n = static_cast<int>(gamma.size());
  const Eigen::MatrixXd t = tangent_basis(gamma);
  SubspaceBasis basis(n);
  for (int i = 0; i < n - 1; ++i) {
    for (int j = i + 1; j < n - 1; ++j) basis.elements_.push_back(wedge(t.col(i), t.col(j)));
  }
  return basis;
}

SubspaceBasis SubspaceBasis::whole(int n) {
  SubspaceBasis basis(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) basis.elements_.push_back(SkewMatrix::basis(n, i, j));
  }
  return basis;
}

SubspaceBasis SubspaceBasis::complement() const {
  std::vector<SkewMatrix> gens = elements_;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) gens.push_back(SkewMatrix::basis(n_, i, j));
  }
  const SubspaceBasis all = orthonormalize(n_, gens);
  SubspaceBasis out(n_);
  out.elements_.assign(all.elements_.begin() + size(), all.elements_.end());
  return out;
}

SubspaceBasis SubspaceBasis::transported(const Eigen::MatrixXd& g) const {
  SubspaceBasis out(n_);
  out.elements_.reserve(elements_.size());
  for (const SkewMatrix& e : elements_) out.elements_.push_back(congruence(g, e));
  return out;
}

SkewMatrix SubspaceBasis::project(const SkewMatrix& X) const {
  require_same_dimension(X.n(), n_, "SubspaceBasis::project");
  SkewMatrix out = SkewMatrix::zero(n_);
  for (const SkewMatrix& e : elements_) out += inner(X, e) * e;
  return out;
}

Eigen::MatrixXd SubspaceBasis::coords_matrix() const {
  Eigen::MatrixXd m(bivector_dim(n_), size());
  for (int k = 0; k < size(); ++k) m.col(k) = elements_[k].coords();
  return m;
}

Eigen::MatrixXd SubspaceBasis::projector_matrix() const {
  const Eigen::MatrixXd c = coords_matrix();
  return c * c.transpose();
}

// ------------------------------------------------------------------ algebra

SkewMatrix wedge(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  require_same_dimension(static_cast<int>(x.size()), static_cast<int>(y.size()), "wedge");
  return SkewMatrix::skew_part(2.0 * x * y.transpose());
}

double inner(const SkewMatrix& X, const SkewMatrix& Y) {
  require_same_dimension(X.n(), Y.n(), "inner");
  // -1/2 tr(XY) = 1/2 sum_ij X_ij Y_ij for skew X, Y.
  return 0.5 * X.matrix().cwiseProduct(Y.matrix()).sum();
}

SkewMatrix bracket(const SkewMatrix& X, const SkewMatrix& Y) {
  require_same_dimension(X.n(), Y.n(), "bracket");
  const Eigen::MatrixXd xy = X.matrix() * Y.matrix();
  return SkewMatrix::skew_part(xy - xy.transpose());
}

SkewMatrix adjoint_action(const Rotation& g, const SkewMatrix& X) {
  require_same_dimension(g.n(), X.n(), "adjoint_action");
  return congruence(g.matrix(), X);
}

SkewMatrix congruence(const Eigen::MatrixXd& m, const SkewMatrix& X) {
  require_same_dimension(static_cast<int>(m.rows()), X.n(), "congruence");
  return SkewMatrix::skew_part(m * X.matrix() * m.transpose());
}

SkewMatrix project_onto_wedge(const UnitVector& gamma, const SkewMatrix& X) {
  return wedge_projection(gamma.coords(), X);
}

SkewMatrix wedge_projection(const Eigen::VectorXd& gamma, const SkewMatrix& X) {
  require_same_dimension(static_cast<int>(gamma.size()), X.n(), "wedge_projection");
  const Eigen::VectorXd xg = X.matrix() * gamma;
  // (X g) ^ g
  return SkewMatrix::skew_part(2.0 * xg * gamma.transpose());
}

Eigen::MatrixXd wedge_projection_matrix(const Eigen::VectorXd& gamma) {
  const int n = static_cast<int>(gamma.size());
  const int N = bivector_dim(n);
  Eigen::MatrixXd P(N, N);
  int col = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l, ++col) {
      // E_kl gamma = e_k gamma_l - e_l gamma_k; image is (E_kl gamma) ^ gamma.
      int row = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++row) {
          const double xi = (i == k ? gamma(l) : 0.0) - (i == l ? gamma(k) : 0.0);
          const double xj = (j == k ? gamma(l) : 0.0) - (j == l ? gamma(k) : 0.0);
          P(row, col) = xi * gamma(j) - xj * gamma(i);
        }
      }
    }
  }
  return P;
}

Eigen::MatrixXd congruence_matrix(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  const int N = bivector_dim(n);
  Eigen::MatrixXd A(N, N);
  int col = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l, ++col) {
      int row = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++row) {
          A(row, col) = m(i, k) * m(j, l) - m(i, l) * m(j, k);
        }
      }
    }
  }
  return A;
}

Eigen::MatrixXd bracket_matrix(const SkewMatrix& X) {
  const int n = X.n();
  Eigen::MatrixXd A(bivector_dim(n), bivector_dim(n));
  int col = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l, ++col) {
      A.col(col) = bracket(X, SkewMatrix::basis(n, k, l)).coords();
    }
  }
  return A;
}

Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& gamma) {
  const int n = static_cast<int>(gamma.size());
  const double norm = gamma.norm();
  if (!(norm > 0.0)) throw InvariantError("tangent_basis: zero vector");
  Eigen::VectorXd u = gamma / norm;
  u(n - 1) += 1.0;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  const double uu = u.squaredNorm();
  if (uu < 1e-24) {
    // gamma = -e_n: the reflection through e_n^perp maps e_n to gamma.
    H(n - 1, n - 1) = -1.0;
  } else {
    H -= (2.0 / uu) * u * u.transpose();
  }
  return H.leftCols(n - 1);
}

SkewMatrix iso3(const Eigen::Vector3d& v) {
  Eigen::MatrixXd m(3, 3);
  m << 0.0, -v(2), v(1),
       v(2), 0.0, -v(0),
       -v(1), v(0), 0.0;
  return SkewMatrix(m);
}

Eigen::Vector3d iso3_inverse(const SkewMatrix& X) {
  if (X.n() != 3) throw DimensionError("iso3_inverse: requires so(3)");
  return Eigen::Vector3d(X(2, 1), X(0, 2), X(1, 0));
}

}  // namespace lrflow
