#include "lrflow/multipliers.hpp"

#include "lrflow/liecore.hpp"
#include "lrflow/operators.hpp"

namespace lrflow {

ConstrainedAcceleration solve_lagrange_dalembert(const Eigen::MatrixXd& mass,
                                                 const Eigen::VectorXd& force,
                                                 const Eigen::MatrixXd& rows,
                                                 const Eigen::VectorXd& rhs) {
  require_same_dimension(static_cast<int>(mass.cols()), static_cast<int>(force.size()),
                         "solve_lagrange_dalembert: force");
  require_same_dimension(static_cast<int>(rows.rows()), static_cast<int>(rhs.size()),
                         "solve_lagrange_dalembert: rhs");
  const auto mass_llt = factor_spd(mass, "mass matrix");
  const Eigen::VectorXd free = mass_llt.solve(force);
  if (rows.rows() == 0) return {free, Eigen::VectorXd()};
  require_same_dimension(static_cast<int>(rows.cols()), static_cast<int>(mass.cols()),
                         "solve_lagrange_dalembert: rows");
  const Eigen::MatrixXd minv_rt = mass_llt.solve(rows.transpose());
  const Eigen::MatrixXd schur = rows * minv_rt;
  const Eigen::VectorXd lambda =
      factor_spd(schur, "constraint Gram matrix").solve(rhs - rows * free);
  return {free + minv_rt * lambda, lambda};
}

}  // namespace lrflow
