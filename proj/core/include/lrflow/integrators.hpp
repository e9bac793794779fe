#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lrflow/phase.hpp"
#include "lrflow/system.hpp"

namespace lrflow {

enum class Method {
  kRk4Projected,  // classical RK4, then polar projection of frames and renormalization
  kLieRk4,        // Runge-Kutta-Munthe-Kaas on the frames, RK4 on the coordinates
};

std::string_view method_name(Method m);
/// Accepts "rk4-projected" and "lie-rk4"; throws std::invalid_argument.
Method parse_method(std::string_view name);

struct IntegratorConfig {
  Method method = Method::kRk4Projected;
  double step = 1e-3;
  long steps = 0;
  /// Project frames / renormalize unit vectors every this many steps.
  int renormalize_every = 1;

  void check() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
};

/// A step failed; carries everything integrated before the failing step.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, long step_index, Trajectory partial)
      : std::runtime_error(what), step_index_(step_index), partial_(std::move(partial)) {}

  long step_index() const { return step_index_; }
  const Trajectory& partial() const { return partial_; }

 private:
  long step_index_;
  Trajectory partial_;
};

/// One step of size h (h = 0 returns x unchanged). `project` controls the
/// final frame projection / unit renormalization.
PhasePoint step(const System& system, const PhasePoint& x, double h, Method method,
                bool project = true);

/// steps + 1 states at t0 + k h.
Trajectory integrate(const System& system, const PhasePoint& x0, const IntegratorConfig& cfg,
                     double t0 = 0.0);

/// Two routes to the trajectory of a system in the rescaled time
/// d tau = dt / sqrt((A gamma, gamma)), gamma being the first coordinate block.
struct ReparametrizedTrajectories {
  /// Integration of the rescaled field with step cfg.step in tau.
  Trajectory direct;
  /// Integration in t, tau(t) by cumulative quadrature of 1/sqrt((A gamma,gamma)).
  /// times hold tau values (not equally spaced).
  Trajectory converted;
  /// The converted trajectory interpolated (cubic Hermite in tau) onto the
  /// tau grid of `direct`, restricted to the common range.
  Trajectory converted_on_grid;
};

ReparametrizedTrajectories integrate_reparametrized(const System& system, const PhasePoint& x0,
                                                    const Eigen::VectorXd& axes,
                                                    const IntegratorConfig& cfg);

/// Nearest rotation (orthogonal polar factor); throws SingularSystemError.
Eigen::MatrixXd project_to_rotation(const Eigen::MatrixXd& m);

}  // namespace lrflow
