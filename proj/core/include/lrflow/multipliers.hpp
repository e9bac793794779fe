#pragma once

#include <Eigen/Dense>

namespace lrflow {

struct ConstrainedAcceleration {
  Eigen::VectorXd acceleration;
  Eigen::VectorXd multipliers;
};

/// Solves the Lagrange-d'Alembert system
///
///   mass * a = force + rows^T * lambda,   rows * a = rhs
///
/// through the SPD Schur complement rows mass^{-1} rows^T. mass must be SPD;
/// a rank-deficient set of constraint rows raises SingularSystemError.
ConstrainedAcceleration solve_lagrange_dalembert(const Eigen::MatrixXd& mass,
                                                 const Eigen::VectorXd& force,
                                                 const Eigen::MatrixXd& rows,
                                                 const Eigen::VectorXd& rhs);

}  // namespace lrflow
