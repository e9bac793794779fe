#include <array>
#include <cmath>

#include "lrflow/liecore.hpp"

namespace lrflow {

namespace {

constexpr int kPadeDegree = 8;
// Backward error of the [8/8] approximant stays below double roundoff for
// |A|_1 <= 1.49 (Higham 2005); 1.0 leaves margin.
constexpr double kScaledNormBound = 1.0;

std::array<double, kPadeDegree + 1> pade_coefficients() {
  std::array<double, kPadeDegree + 1> c{};
  c[0] = 1.0;
  const int m = kPadeDegree;
  for (int k = 1; k <= m; ++k) {
    c[k] = c[k - 1] * static_cast<double>(m - k + 1) /
           (static_cast<double>(k) * static_cast<double>(2 * m - k + 1));
  }
  return c;
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw DimensionError("expm: matrix is not square");
  const Eigen::Index n = A.rows();
  if (n == 0) return A;

  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kScaledNormBound) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kScaledNormBound)));
  }
  const Eigen::MatrixXd X = A / std::ldexp(1.0, squarings);

  static const auto c = pade_coefficients();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd even = c[0] * I;
  Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd power = I;
  for (int k = 1; k <= kPadeDegree; ++k) {
    power = power * X;
    if (k % 2 == 0) {
      even += c[k] * power;
    } else {
      odd += c[k] * power;
    }
  }
  const Eigen::MatrixXd numer = even + odd;
  const Eigen::MatrixXd denom = even - odd;
  Eigen::MatrixXd result = denom.partialPivLu().solve(numer);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace lrflow
