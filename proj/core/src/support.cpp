#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "lrflow/multipliers.hpp"
#include "lrflow/support.hpp"

namespace lrflow {

namespace {

Layout support_layout(int n, std::size_t balls) {
  Layout layout;
  layout.add_frame("g", n).add_skew("omega", n);
  for (std::size_t i = 1; i <= balls; ++i) layout.add_unit_vector("gamma" + std::to_string(i), n);
  return layout;
}

}  // namespace

SupportSystem::SupportSystem(InertiaOperator inertia, std::vector<SupportBall> balls, bool rubber)
    : System(support_layout(inertia.n(), balls.size())),
      inertia_(std::move(inertia)),
      balls_(std::move(balls)),
      rubber_(rubber),
      n_(inertia_.n()),
      N_(bivector_dim(inertia_.n())) {
  double bound = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(inertia_.matrix()).eigenvalues()(0);
  bound += shift();
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    const SupportBall& b = balls_[i];
    const std::string what = "SupportSystem: ball " + std::to_string(i + 1);
    require_same_dimension(b.contact.n(), n_, what.c_str());
    if (!(b.inertia >= 0.0)) throw InvariantError(what + " needs inertia D >= 0");
    if (b.rho == 0.0) throw InvariantError(what + " needs nonzero rho");
    bound += std::min(coefficient(b), 0.0);
  }
  if (!(bound > 0.0)) {
    throw InvariantError("SupportSystem: total inertia may be indefinite (lower eigenvalue bound " +
                         std::to_string(bound) + ")");
  }
}

double SupportSystem::shift() const {
  if (!rubber_) return 0.0;
  double s = 0.0;
  for (const SupportBall& b : balls_) s += b.inertia;
  return s;
}

double SupportSystem::coefficient(const SupportBall& b) const {
  const double r2 = b.rho * b.rho;
  return rubber_ ? b.inertia * (1.0 - r2) / r2 : b.inertia / r2;
}

PhasePoint SupportSystem::make_state(const Rotation& g, const SkewMatrix& omega) const {
  require_same_dimension(g.n(), n_, "SupportSystem::make_state");
  require_same_dimension(omega.n(), n_, "SupportSystem::make_state");
  PhasePoint x{{g.matrix()}, Eigen::VectorXd(layout_.coord_size())};
  x.coords.head(N_) = omega.coords();
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    x.coords.segment(N_ + n_ * static_cast<int>(i), n_) =
        g.matrix().transpose() * balls_[i].contact.coords();
  }
  validate(x);
  return x;
}

Eigen::MatrixXd SupportSystem::total_inertia(const PhasePoint& x) const {
  Eigen::MatrixXd b = inertia_.matrix() + shift() * Eigen::MatrixXd::Identity(N_, N_);
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    b += coefficient(balls_[i]) *
         wedge_projection_matrix(x.coords.segment(N_ + n_ * static_cast<int>(i), n_));
  }
  return b;
}

PhaseRate SupportSystem::rate(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  const SkewMatrix omega = SkewMatrix::from_coords(n_, w);
  const Eigen::MatrixXd& om = omega.matrix();
  const Eigen::MatrixXd b = total_inertia(x);

  PhaseRate out{{om}, Eigen::VectorXd(x.coords.size())};
  Eigen::MatrixXd rhs = bracket(SkewMatrix::from_coords(n_, b * w), omega).matrix();
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    const int off = N_ + n_ * static_cast<int>(i);
    const Eigen::VectorXd gamma = x.coords.segment(off, n_);
    const Eigen::MatrixXd X = gamma * gamma.transpose();
    const Eigen::MatrixXd X_dot = X * om - om * X;
    rhs -= coefficient(balls_[i]) * (om * X_dot + X_dot * om);
    out.coords.segment(off, n_) = -om * gamma;
  }
  out.coords.head(N_) =
      factor_spd(b, "SupportSystem: total inertia").solve(SkewMatrix::skew_part(rhs).coords());
  return out;
}

double SupportSystem::energy(const PhasePoint& x) const {
  const Eigen::VectorXd w = x.coords.head(N_);
  return 0.5 * w.dot(total_inertia(x) * w);
}

std::vector<NamedValue> SupportSystem::constraint_residuals(const PhasePoint& x) const {
  std::vector<NamedValue> out;
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    const Eigen::VectorXd gamma = x.coords.segment(N_ + n_ * static_cast<int>(i), n_);
    const std::string tag = std::to_string(i + 1);
    out.push_back({"gamma" + tag + "_norm", gamma.norm() - 1.0});
    const Eigen::VectorXd expected = x.frames[0].transpose() * balls_[i].contact.coords();
    out.push_back({"gamma" + tag + "_transport", (gamma - expected).cwiseAbs().maxCoeff()});
  }
  return out;
}

std::vector<std::string> SupportSystem::quantity_names() const {
  return {"energy", "constraints", "trace_integrals"};
}

Eigen::VectorXd SupportSystem::quantity(std::string_view name, const PhasePoint& x) const {
  if (name == "trace_integrals") {
    const std::vector<TraceCoefficient> coeffs = trace_integrals(x);
    Eigen::VectorXd out(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i) out(static_cast<Eigen::Index>(i)) = coeffs[i].value;
    return out;
  }
  return System::quantity(name, x);
}

std::vector<TraceCoefficient> SupportSystem::trace_integrals(const PhasePoint& x) const {
  return trace_integrals(x, n_);
}

std::vector<TraceCoefficient> SupportSystem::trace_integrals(const PhasePoint& x,
                                                             int max_degree) const {
  const int letters = static_cast<int>(balls_.size()) + 1;
  std::vector<Eigen::MatrixXd> mats;
  const Eigen::VectorXd w = x.coords.head(N_);
  mats.push_back(SkewMatrix::from_coords(n_, total_inertia(x) * w).matrix());
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    const Eigen::VectorXd gamma = x.coords.segment(N_ + n_ * static_cast<int>(i), n_);
    mats.push_back(gamma * gamma.transpose());
  }

  std::vector<TraceCoefficient> out;
  for (int k = 1; k <= max_degree; ++k) {
    // Expand the k-th power word by word; each word contributes the trace of
    // its product to the monomial given by its letter counts.
    std::map<std::vector<int>, double> coeff;
    std::vector<int> word(k, 0);
    while (true) {
      Eigen::MatrixXd prod = mats[word[0]];
      for (int p = 1; p < k; ++p) prod = prod * mats[word[p]];
      std::vector<int> powers(letters - 1, 0);
      for (int letter : word) {
        if (letter > 0) ++powers[letter - 1];
      }
      coeff[powers] += prod.trace();
      int pos = k - 1;
      while (pos >= 0 && ++word[pos] == letters) word[pos--] = 0;
      if (pos < 0) break;
    }
    for (const auto& [powers, value] : coeff) out.push_back({k, powers, value});
  }
  return out;
}

Eigen::VectorXd SupportSystem::multiplier_acceleration(const PhasePoint& x) const {
  const int balls = static_cast<int>(balls_.size());
  const int dim = N_ * (1 + balls);
  const SkewMatrix omega = SkewMatrix::from_coords(n_, x.coords.head(N_));
  const Eigen::MatrixXd rt = congruence_matrix(x.frames[0]).transpose();

  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(dim, dim);
  mass.topLeftCorner(N_, N_) = inertia_.matrix();
  for (int i = 0; i < balls; ++i) {
    mass.block(N_ * (i + 1), N_ * (i + 1), N_, N_) =
        balls_[i].inertia * Eigen::MatrixXd::Identity(N_, N_);
  }
  Eigen::VectorXd force = Eigen::VectorXd::Zero(dim);
  force.head(N_) = bracket(inertia_.apply(omega), omega).coords();

  std::vector<Eigen::RowVectorXd> rows;
  for (int i = 0; i < balls; ++i) {
    const Eigen::VectorXd& contact = balls_[i].contact.coords();
    const SubspaceBasis rolling = SubspaceBasis::wedge_with(contact);
    for (const SkewMatrix& c : rolling.elements()) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
      row.head(N_) = (rt * c.coords()).transpose();
      row.segment(N_ * (i + 1), N_) = balls_[i].rho * c.coords().transpose();
      rows.push_back(row);
    }
    if (!rubber_) continue;
    const SubspaceBasis twisting = SubspaceBasis::wedge_complement(contact);
    for (const SkewMatrix& c : twisting.elements()) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
      row.head(N_) = (rt * c.coords()).transpose();
      row.segment(N_ * (i + 1), N_) = -c.coords().transpose();
      rows.push_back(row);
    }
  }
  Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) C.row(static_cast<Eigen::Index>(r)) = rows[r];
  const ConstrainedAcceleration sol =
      solve_lagrange_dalembert(mass, force, C, Eigen::VectorXd::Zero(C.rows()));
  return sol.acceleration.head(N_);
}

std::vector<SkewMatrix> SupportSystem::peripheral_velocities(
    const PhasePoint& x, const std::vector<SkewMatrix>& free_components) const {
  const SkewMatrix space = congruence(x.frames[0], SkewMatrix::from_coords(n_, x.coords.head(N_)));
  std::vector<SkewMatrix> out;
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    const SupportBall& b = balls_[i];
    const SkewMatrix h_part = project_onto_wedge(b.contact, space);
    SkewMatrix W = (-1.0 / b.rho) * h_part;
    if (rubber_) {
      W += space - h_part;
    } else if (i < free_components.size()) {
      W += free_components[i] - project_onto_wedge(b.contact, free_components[i]);
    }
    out.push_back(W);
  }
  return out;
}

}  // namespace lrflow
