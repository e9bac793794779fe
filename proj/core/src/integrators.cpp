#include "lrflow/integrators.hpp"

#include <cmath>
#include <memory>

#include "lrflow/chaplygin.hpp"

namespace lrflow {

std::string_view method_name(Method m) {
  return m == Method::kLieRk4 ? "lie-rk4" : "rk4-projected";
}

Method parse_method(std::string_view name) {
  if (name == "rk4-projected") return Method::kRk4Projected;
  if (name == "lie-rk4") return Method::kLieRk4;
  throw std::invalid_argument("unknown integration method '" + std::string(name) +
                              "' (expected rk4-projected or lie-rk4)");
}

void IntegratorConfig::check() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("integrator step must be > 0");
  if (steps < 0) throw std::invalid_argument("integrator steps must be >= 0");
  if (renormalize_every < 1) throw std::invalid_argument("renormalize_every must be >= 1");
}

Eigen::MatrixXd project_to_rotation(const Eigen::MatrixXd& m) { return Rotation::project(m).matrix(); }

namespace {

void project_in_place(const System& system, PhasePoint& x) {
  for (Eigen::MatrixXd& g : x.frames) g = project_to_rotation(g);
  system.layout().normalize_units(x);
}

// Inverse of the left-trivialized derivative of exp, truncated after the
// terms that matter for a fourth-order method.
Eigen::MatrixXd dexp_inverse(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& xi) {
  const Eigen::MatrixXd b1 = theta * xi - xi * theta;
  const Eigen::MatrixXd b2 = theta * b1 - b1 * theta;
  return xi + 0.5 * b1 + (1.0 / 12.0) * b2;
}

PhasePoint rk4_step(const System& system, const PhasePoint& x, double h) {
  // Classical RK4 on g' = g xi: the frame slope at a stage is g_stage xi_stage.
  const PhaseRate k1 = system.rate(x);
  const PhasePoint s2 = advance_linear(x, k1, 0.5 * h);
  const PhaseRate k2 = system.rate(s2);
  PhasePoint s3{x.frames, x.coords + 0.5 * h * k2.coords};
  for (std::size_t i = 0; i < x.frames.size(); ++i) {
    s3.frames[i] = x.frames[i] + 0.5 * h * (s2.frames[i] * k2.frame_velocity[i]);
  }
  const PhaseRate k3 = system.rate(s3);
  PhasePoint s4{x.frames, x.coords + h * k3.coords};
  for (std::size_t i = 0; i < x.frames.size(); ++i) {
    s4.frames[i] = x.frames[i] + h * (s3.frames[i] * k3.frame_velocity[i]);
  }
  const PhaseRate k4 = system.rate(s4);

  PhasePoint out{x.frames, x.coords + (h / 6.0) * (k1.coords + 2.0 * k2.coords + 2.0 * k3.coords +
                                                  k4.coords)};
  for (std::size_t i = 0; i < x.frames.size(); ++i) {
    out.frames[i] += (h / 6.0) * (x.frames[i] * k1.frame_velocity[i] +
                                  2.0 * s2.frames[i] * k2.frame_velocity[i] +
                                  2.0 * s3.frames[i] * k3.frame_velocity[i] +
                                  s4.frames[i] * k4.frame_velocity[i]);
  }
  return out;
}

PhasePoint lie_rk4_step(const System& system, const PhasePoint& x, double h) {
  const std::size_t nf = x.frames.size();
  auto stage = [&](const std::vector<Eigen::MatrixXd>& thetas, const Eigen::VectorXd& coords) {
    PhasePoint s{x.frames, coords};
    for (std::size_t i = 0; i < nf; ++i) s.frames[i] = x.frames[i] * expm(thetas[i]);
    return s;
  };
  auto increments = [&](const std::vector<Eigen::MatrixXd>& thetas, const PhaseRate& r) {
    std::vector<Eigen::MatrixXd> out(nf);
    for (std::size_t i = 0; i < nf; ++i) out[i] = dexp_inverse(thetas[i], r.frame_velocity[i]);
    return out;
  };
  auto scale = [](const std::vector<Eigen::MatrixXd>& v, double s) {
    std::vector<Eigen::MatrixXd> out = v;
    for (Eigen::MatrixXd& m : out) m *= s;
    return out;
  };

  std::vector<Eigen::MatrixXd> zero(nf);
  for (std::size_t i = 0; i < nf; ++i) zero[i] = Eigen::MatrixXd::Zero(x.frames[i].rows(), x.frames[i].cols());

  const PhaseRate r1 = system.rate(x);
  const std::vector<Eigen::MatrixXd> f1 = increments(zero, r1);
  const std::vector<Eigen::MatrixXd> t2 = scale(f1, 0.5 * h);
  const PhaseRate r2 = system.rate(stage(t2, x.coords + 0.5 * h * r1.coords));
  const std::vector<Eigen::MatrixXd> f2 = increments(t2, r2);
  const std::vector<Eigen::MatrixXd> t3 = scale(f2, 0.5 * h);
  const PhaseRate r3 = system.rate(stage(t3, x.coords + 0.5 * h * r2.coords));
  const std::vector<Eigen::MatrixXd> f3 = increments(t3, r3);
  const std::vector<Eigen::MatrixXd> t4 = scale(f3, h);
  const PhaseRate r4 = system.rate(stage(t4, x.coords + h * r3.coords));
  const std::vector<Eigen::MatrixXd> f4 = increments(t4, r4);

  std::vector<Eigen::MatrixXd> theta(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    theta[i] = (h / 6.0) * (f1[i] + 2.0 * f2[i] + 2.0 * f3[i] + f4[i]);
    theta[i] = 0.5 * (theta[i] - theta[i].transpose());
  }
  return stage(theta, x.coords + (h / 6.0) * (r1.coords + 2.0 * r2.coords + 2.0 * r3.coords +
                                              r4.coords));
}

}  // namespace

PhasePoint step(const System& system, const PhasePoint& x, double h, Method method, bool project) {
  system.layout().check(x);
  if (h == 0.0) return x;
  PhasePoint out = method == Method::kLieRk4 ? lie_rk4_step(system, x, h) : rk4_step(system, x, h);
  if (project) project_in_place(system, out);
  if (!out.coords.allFinite()) throw SingularSystemError("step produced non-finite coordinates");
  return out;
}

Trajectory integrate(const System& system, const PhasePoint& x0, const IntegratorConfig& cfg,
                     double t0) {
  cfg.check();
  system.layout().check(x0);
  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  for (long k = 0; k < cfg.steps; ++k) {
    const bool project = (k + 1) % cfg.renormalize_every == 0;
    try {
      traj.states.push_back(step(system, traj.states.back(), cfg.step, cfg.method, project));
    } catch (const std::exception& e) {
      throw IntegrationError("step " + std::to_string(k) + ": " + e.what(), k, std::move(traj));
    }
    traj.times.push_back(t0 + static_cast<double>(k + 1) * cfg.step);
  }
  return traj;
}

namespace {

struct NonOwning {
  void operator()(const System*) const {}
};

PhasePoint hermite(const PhasePoint& a, const PhaseRate& da, const PhasePoint& b, const PhaseRate& db,
                   double delta, double s) {
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  PhasePoint out{a.frames, h00 * a.coords + h10 * delta * da.coords + h01 * b.coords +
                               h11 * delta * db.coords};
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    out.frames[i] = h00 * a.frames[i] + h10 * delta * (a.frames[i] * da.frame_velocity[i]) +
                    h01 * b.frames[i] + h11 * delta * (b.frames[i] * db.frame_velocity[i]);
  }
  return out;
}

}  // namespace

ReparametrizedTrajectories integrate_reparametrized(const System& system, const PhasePoint& x0,
                                                    const Eigen::VectorXd& axes,
                                                    const IntegratorConfig& cfg) {
  cfg.check();
  const auto factor = chaplygin_time_factor(axes);
  const std::shared_ptr<const System> base(&system, NonOwning{});
  const TimeRescaledSystem rescaled(base, factor, "tau");

  ReparametrizedTrajectories out;
  out.direct = integrate(rescaled, x0, cfg);
  const double tau_end = out.direct.times.back();

  // Integrate in t until the accumulated tau passes tau_end. The quadrature
  // is the trapezoid rule with the Euler-Maclaurin end correction
  // -h^2/12 (f'(t) - f'(0)), f = 1 / sqrt(a), which makes it fourth order.
  const int n = static_cast<int>(axes.size());
  auto inv_sqrt_a = [&](const PhasePoint& x) { return 1.0 / factor(x); };
  auto d_inv_sqrt_a = [&](const PhasePoint& x) {
    const Eigen::VectorXd gamma = x.coords.head(n);
    const Eigen::VectorXd gamma_dot = system.rate(x).coords.head(n);
    const double a = gamma.dot(axes.cwiseProduct(gamma));
    const double a_dot = 2.0 * gamma_dot.dot(axes.cwiseProduct(gamma));
    return -0.5 * std::pow(a, -1.5) * a_dot;
  };
  const double h = cfg.step;
  const double f0_dot = d_inv_sqrt_a(x0);
  double trapezoid = 0.0;
  PhasePoint x = x0;
  out.converted.times.push_back(0.0);
  out.converted.states.push_back(x0);
  const long max_steps = 1000L * std::max<long>(cfg.steps, 1) + 1000L;
  for (long k = 0; out.converted.times.back() < tau_end; ++k) {
    if (k >= max_steps) {
      throw IntegrationError("integrate_reparametrized: tau did not reach its end value", k,
                             out.converted);
    }
    const bool project = (k + 1) % cfg.renormalize_every == 0;
    PhasePoint next = step(system, x, h, cfg.method, project);
    trapezoid += 0.5 * h * (inv_sqrt_a(x) + inv_sqrt_a(next));
    const double tau = trapezoid - h * h / 12.0 * (d_inv_sqrt_a(next) - f0_dot);
    out.converted.times.push_back(tau);
    out.converted.states.push_back(next);
    x = std::move(next);
  }

  // Hermite interpolation onto the direct grid; derivatives in tau are the
  // rescaled field.
  std::size_t seg = 0;
  const Trajectory& conv = out.converted;
  for (std::size_t j = 0; j < out.direct.size(); ++j) {
    const double tau = out.direct.times[j];
    if (tau > conv.times.back()) break;
    while (seg + 2 < conv.size() && conv.times[seg + 1] < tau) ++seg;
    const double delta = conv.times[seg + 1] - conv.times[seg];
    const double s = (tau - conv.times[seg]) / delta;
    out.converted_on_grid.times.push_back(tau);
    out.converted_on_grid.states.push_back(hermite(conv.states[seg], rescaled.rate(conv.states[seg]),
                                                   conv.states[seg + 1],
                                                   rescaled.rate(conv.states[seg + 1]), delta, s));
  }
  return out;
}

}  // namespace lrflow
