#include "lrflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace lrflow {

const QuantityDrift& ConservationReport::at(const std::string& name) const& {
  for (const QuantityDrift& q : quantities) {
    if (q.name == name) return q;
  }
  throw std::out_of_range("ConservationReport: no quantity " + name);
}

QuantityDrift ConservationReport::at(const std::string& name) && {
  return std::as_const(*this).at(name);
}

ConservationReport conservation_report(const System& system, const Trajectory& traj,
                                       const std::vector<std::string>& quantities) {
  if (traj.empty()) throw std::invalid_argument("conservation_report: empty trajectory");
  const std::vector<std::string> known = system.quantity_names();
  ConservationReport report;
  for (const std::string& name : quantities) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw std::invalid_argument("quantity '" + name + "' is not defined for system " + system.kind());
    }
    QuantityDrift q;
    q.name = name;
    q.initial = system.quantity(name, traj.states.front());
    for (const PhasePoint& x : traj.states) {
      const Eigen::VectorXd v = system.quantity(name, x);
      if (v.size() == 0) continue;
      q.max_abs_drift = std::max(q.max_abs_drift, (v - q.initial).cwiseAbs().maxCoeff());
      q.max_abs_value = std::max(q.max_abs_value, v.cwiseAbs().maxCoeff());
    }
    const double scale = q.initial.size() ? q.initial.cwiseAbs().maxCoeff() : 0.0;
    q.max_rel_drift = q.max_abs_drift / (scale > 0.0 ? scale : 1.0);
    report.quantities.push_back(std::move(q));
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

double divergence_estimate(const FlatField& field, const MeasureDensity& density,
                           const Eigen::VectorXd& y, double eps) {
  double sum = 0.0;
  Eigen::VectorXd yp = y;
  Eigen::VectorXd ym = y;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    yp(i) = y(i) + eps;
    ym(i) = y(i) - eps;
    sum += (density(yp) * field(yp)(i) - density(ym) * field(ym)(i)) / (2.0 * eps);
    yp(i) = y(i);
    ym(i) = y(i);
  }
  return sum;
}

}  // namespace

DivergenceResult measure_divergence(const FlatField& field, const MeasureDensity& density,
                                    const Eigen::VectorXd& y, double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("measure_divergence: fd_step must be positive");
  DivergenceResult r;
  r.value = divergence_estimate(field, density, y, fd_step);
  r.halved_step_value = divergence_estimate(field, density, y, 0.5 * fd_step);
  // Truncation error drops by 4 when the step halves; roundoff grows by 2.
  // Agreement within a loose band means neither dominates.
  const double gap = std::abs(r.value - r.halved_step_value);
  const double band = 1e-6 + 0.5 * std::max(std::abs(r.value), std::abs(r.halved_step_value));
  if (gap > band) {
    r.consistent = false;
    r.warning = "fd_step " + std::to_string(fd_step) + " and its half disagree by " +
                std::to_string(gap) + "; cancellation or truncation dominates";
  }
  return r;
}

MeasureChart lr_measure_chart(const LRSystem& system, const PhasePoint& x) {
  const LRSystem* s = &system;
  return {[s](const Eigen::VectorXd& y) { return s->chart_field(y); },
          {"lr", [s](const Eigen::VectorXd& y) { return s->measure_density(y); }},
          x.coords};
}

MeasureChart lplusr_measure_chart(const LplusRSystem& system, const PhasePoint& x) {
  const LplusRSystem* s = &system;
  return {[s](const Eigen::VectorXd& y) { return s->chart_field(y); },
          {"lplusr", [s](const Eigen::VectorXd& y) { return s->measure_density(y); }},
          s->chart_point(x)};
}

MeasureChart cotangent_measure_chart(const CotangentSystem& system, const PhasePoint& x) {
  const CotangentSystem* s = &system;
  return {[s](const Eigen::VectorXd& y) { return s->chart_field(y); },
          {"cotangent", [s](const Eigen::VectorXd& y) { return s->measure_density(y); }},
          x.coords};
}

ChaplyginDensities chaplygin_measure_check(const CotangentSystem& system,
                                           const Eigen::VectorXd& gamma) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * gamma.size());
  y.head(gamma.size()) = gamma;
  ChaplyginDensities d{system.measure_density(y), std::numeric_limits<double>::quiet_NaN()};
  if (system.inertia().kind() == InertiaOperator::Kind::kSpecial) {
    d.special = system.special_measure_density(gamma);
  }
  return d;
}

double chaplygin_density_exponent(const CotangentSystem& system,
                                  const std::vector<Eigen::VectorXd>& gammas) {
  if (system.inertia().kind() != InertiaOperator::Kind::kSpecial) {
    throw InvariantError("chaplygin_density_exponent: needs a special inertia operator");
  }
  if (gammas.size() < 2) throw std::invalid_argument("chaplygin_density_exponent: need 2+ samples");
  const Eigen::VectorXd& axes = system.inertia().special_axes();
  const Eigen::Index m = static_cast<Eigen::Index>(gammas.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd target(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::VectorXd& g = gammas[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = std::log(g.dot(axes.cwiseProduct(g)));
    target(i) = std::log(chaplygin_measure_check(system, g).restricted);
  }
  return design.colPivHouseholderQr().solve(target)(1);
}

int jacobian_rank(const FlatField& f, const Eigen::VectorXd& y, double fd_step, double rel_tol) {
  const Eigen::VectorXd f0 = f(y);
  Eigen::MatrixXd jac(f0.size(), y.size());
  Eigen::VectorXd yp = y;
  Eigen::VectorXd ym = y;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    yp(i) = y(i) + fd_step;
    ym(i) = y(i) - fd_step;
    jac.col(i) = (f(yp) - f(ym)) / (2.0 * fd_step);
    yp(i) = y(i);
    ym(i) = y(i);
  }
  // Rows of very different scale (energy vs high-degree traces) would bias
  // the rank; normalize each nonzero row first.
  for (Eigen::Index r = 0; r < jac.rows(); ++r) {
    const double norm = jac.row(r).norm();
    if (norm > 0.0) jac.row(r) /= norm;
  }
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

FlatField support_integrals_map(const SupportSystem& system, const PhasePoint& x) {
  const SupportSystem* s = &system;
  return [s, frames = x.frames](const Eigen::VectorXd& y) {
    const PhasePoint p{frames, y};
    const Eigen::VectorXd traces = s->quantity("trace_integrals", p);
    Eigen::VectorXd out(traces.size() + 1);
    out << s->energy(p), traces;
    return out;
  };
}

// ---------------------------------------------------------------------------

std::vector<EpsilonLimitRow> epsilon_limit_study(const InertiaOperator& inertia,
                                                 const SubspaceBasis& constraints,
                                                 const SkewMatrix& omega0,
                                                 const std::vector<double>& epsilons, double T,
                                                 double h, Method method) {
  const int n = inertia.n();
  const Rotation g0 = Rotation::identity(n);
  IntegratorConfig cfg;
  cfg.method = method;
  cfg.step = h;
  cfg.steps = std::lround(T / h);

  const LRSystem lr(inertia, constraints);
  const Trajectory reference = integrate(lr, lr.make_state(g0, omega0), cfg);
  const int N = bivector_dim(n);
  const Eigen::MatrixXd a = constraints.coords_matrix();

  std::vector<EpsilonLimitRow> rows;
  for (double eps : epsilons) {
    const LplusRSystem lpr(inertia, eps * a * a.transpose());
    const Trajectory traj = integrate(lpr, lpr.make_state(g0, omega0), cfg);
    double err = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      err = std::max(err, (traj.states[k].coords.head(N) - reference.states[k].coords.head(N))
                              .cwiseAbs()
                              .maxCoeff());
    }
    rows.push_back({eps, err});
  }
  return rows;
}

double epsilon_limit_slope(const std::vector<EpsilonLimitRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("epsilon_limit_slope: need 2+ rows");
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd target(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::log(rows[static_cast<std::size_t>(i)].epsilon);
    target(i) = std::log(rows[static_cast<std::size_t>(i)].error);
  }
  return design.colPivHouseholderQr().solve(target)(1);
}

std::vector<Eigen::VectorXd> reconstruct_contact(const RubberChaplyginSystem& system,
                                                 const Trajectory& traj) {
  const int n = system.inertia().n();
  const int N = bivector_dim(n);
  auto velocity = [&](const PhasePoint& x) -> Eigen::VectorXd {
    const Eigen::MatrixXd& g = x.frames[0];
    const Eigen::MatrixXd omega = SkewMatrix::from_coords(n, x.coords.head(N)).matrix();
    return system.radius() * (g * omega * g.transpose() * system.normal().coords());
  };
  std::vector<Eigen::VectorXd> path;
  if (traj.empty()) return path;
  path.push_back(Eigen::VectorXd::Zero(n));
  Eigen::VectorXd prev = velocity(traj.states.front());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const Eigen::VectorXd cur = velocity(traj.states[k]);
    const double dt = traj.times[k] - traj.times[k - 1];
    path.push_back(path.back() + 0.5 * dt * (prev + cur));
    prev = cur;
  }
  return path;
}

std::vector<SkewMatrix> reconstruct_W(const CoupledData& data, const Trajectory& traj,
                                      const SkewMatrix& W0) {
  const int n = data.n();
  const int N = bivector_dim(n);
  const Eigen::MatrixXd pk = data.free_peripheral_subspace().projector_matrix();
  const Eigen::VectorXd kept = pk * W0.coords();
  std::vector<Eigen::MatrixXd> ph;
  for (const PeripheralSubspace& p : data.peripherals) ph.push_back(p.subspace.projector_matrix());

  std::vector<SkewMatrix> out;
  out.reserve(traj.size());
  for (const PhasePoint& x : traj.states) {
    const Eigen::VectorXd space = congruence_matrix(x.frames[0]) * x.coords.head(N);
    Eigen::VectorXd W = kept;
    for (std::size_t i = 0; i < ph.size(); ++i) W -= (1.0 / data.peripherals[i].rho) * (ph[i] * space);
    out.push_back(SkewMatrix::from_coords(n, W));
  }
  return out;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
  const std::size_t m = std::min(a.size(), b.size());
  double d = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const PhasePoint& x = a.states[k];
    const PhasePoint& y = b.states[k];
    if (x.coords.size() != y.coords.size() || x.frames.size() != y.frames.size()) {
      throw DimensionError("trajectory_distance: incompatible states");
    }
    if (x.coords.size()) d = std::max(d, (x.coords - y.coords).cwiseAbs().maxCoeff());
    for (std::size_t f = 0; f < x.frames.size(); ++f) {
      d = std::max(d, (x.frames[f] - y.frames[f]).cwiseAbs().maxCoeff());
    }
  }
  return d;
}

}  // namespace lrflow
