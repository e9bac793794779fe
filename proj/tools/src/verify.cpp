#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "lrflow_cli/scenario.hpp"

namespace lrflow::cli {
namespace {

struct CheckResult {
  bool pass = true;
  std::string detail;
};

struct Check {
  std::string name;
  std::function<bool(const Scenario&)> applies;
  std::function<CheckResult(const Scenario&, const Trajectory&, std::ostream&)> run;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool is(const Scenario& sc, std::initializer_list<const char*> names) {
  return std::any_of(names.begin(), names.end(), [&](const char* s) { return sc.system_name == s; });
}

bool has_quantity(const Scenario& sc, const std::string& q) {
  const auto names = sc.system->quantity_names();
  return std::find(names.begin(), names.end(), q) != names.end();
}

CheckResult drift_check(const Scenario& sc, const Trajectory& traj, const std::string& q, double tol,
                        bool absolute_value = false) {
  const QuantityDrift d = conservation_report(*sc.system, traj, {q}).at(q);
  const double v = absolute_value ? d.max_abs_value : d.max_rel_drift;
  return {v < tol, (absolute_value ? "max residual " : "max rel drift ") + sci(v) + " (tol " + sci(tol) + ")"};
}

IntegratorConfig capped(const Scenario& sc, double horizon) {
  IntegratorConfig cfg = sc.integrator;
  cfg.steps = std::min(cfg.steps, std::lround(horizon / cfg.step));
  return cfg;
}

SkewMatrix omega_of(const Scenario& sc, const PhasePoint& x) {
  return skew_block(x, sc.system->layout().block("omega"));
}

CheckResult reduction_check(const Scenario& sc) {
  const CoupledData& data = *sc.coupled;
  const Rotation g(sc.initial.frames[0]);
  const SkewMatrix omega = omega_of(sc, sc.initial);
  SkewMatrix W = SkewMatrix::zero(sc.n);
  if (sc.system->kind() == "coupled") {
    W = skew_block(sc.initial, sc.system->layout().block("W"));
  } else {
    const SkewMatrix space = adjoint_action(g, omega);
    for (const PeripheralSubspace& p : data.peripherals) W -= (1.0 / p.rho) * p.subspace.project(space);
  }
  const CoupledFullSystem full(data);
  const CoupledReducedSystem reduced(data);
  const IntegratorConfig cfg = capped(sc, 1.0);
  const Trajectory a = integrate(full, full.make_state(g, omega, W), cfg);
  const Trajectory b = integrate(reduced, reduced.make_state(g, omega), cfg);
  const Block& wa = full.layout().block("omega");
  const Block& wb = reduced.layout().block("omega");
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    gap = std::max(gap, (a.states[k].frames[0] - b.states[k].frames[0]).cwiseAbs().maxCoeff());
    gap = std::max(gap, (vector_block(a.states[k], wa) - vector_block(b.states[k], wb)).cwiseAbs().maxCoeff());
  }
  return {gap < 1e-6, "full vs reduced (g, omega) sup gap " + sci(gap) + " over t <= " +
                          format_double(cfg.step * static_cast<double>(cfg.steps)) + " (tol 1e-6)"};
}

CheckResult epsilon_check(const Scenario& sc, std::ostream& out) {
  const EpsilonSweep& sweep = *sc.epsilon_sweep;
  SkewMatrix omega0 = omega_of(sc, sc.initial);
  omega0 -= sweep.constraints.project(omega0);
  const auto rows = epsilon_limit_study(*sc.inertia, sweep.constraints, omega0, sweep.epsilons, sweep.horizon,
                                        sc.integrator.step, sc.integrator.method);
  out << "  epsilon        sup |omega_L+R - omega_LR|\n";
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof line, "  %-13.3e  %.6e\n", rows[i].epsilon, rows[i].error);
    out << line;
    if (i > 0 && !(rows[i].error < rows[i - 1].error)) decreasing = false;
  }
  CheckResult r{decreasing, decreasing ? "errors strictly decreasing" : "errors not strictly decreasing"};
  if (rows.size() >= 2) r.detail += ", slope " + sci(epsilon_limit_slope(rows));
  if (rows.back().epsilon >= 1e6) {
    r.pass = r.pass && rows.back().error < 1e-4;
    r.detail += ", final error " + sci(rows.back().error) + " (tol 1e-4)";
  }
  return r;
}

CheckResult measure_check(const Scenario& sc, const Trajectory& traj) {
  double worst = 0.0;
  int warnings = 0;
  for (const PhasePoint* x : {&traj.states.front(), &traj.states.back()}) {
    MeasureChart chart;
    if (sc.system_name == "lr") chart = lr_measure_chart(static_cast<const LRSystem&>(*sc.system), *x);
    if (sc.system_name == "lplusr") chart = lplusr_measure_chart(static_cast<const LplusRSystem&>(*sc.system), *x);
    if (sc.system_name == "cotangent") chart = cotangent_measure_chart(static_cast<const CotangentSystem&>(*sc.system), *x);
    const DivergenceResult d = measure_divergence(chart.field, chart.density, chart.point, 1e-5);
    worst = std::max(worst, std::abs(d.value));
    if (!d.consistent) ++warnings;
  }
  CheckResult r{worst < 1e-5, "|div(mu f)| " + sci(worst) + " at the first and last states (tol 1e-5)"};
  if (warnings) r.detail += "; " + std::to_string(warnings) + " step-halving warnings";
  return r;
}

CheckResult exponent_check(const Scenario& sc) {
  std::mt19937_64 engine(0);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> gammas;
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd v(sc.n);
    for (int k = 0; k < sc.n; ++k) v(k) = normal(engine);
    gammas.push_back(v.normalized());
  }
  const double e = chaplygin_density_exponent(static_cast<const CotangentSystem&>(*sc.system), gammas);
  const double expected = -0.5 * (sc.n - 2);
  return {std::abs(e - expected) < 1e-6,
          "density exponent " + format_double(e) + ", expected " + format_double(expected) + " (tol 1e-6)"};
}

CheckResult hamiltonization_check(const Scenario& sc) {
  const auto& cot = static_cast<const CotangentSystem&>(*sc.system);
  const Eigen::VectorXd& axes = *sc.special_axes;
  const int n = sc.n;
  const IntegratorConfig cfg = capped(sc, 1.0);
  const ReparametrizedTrajectories rt = integrate_reparametrized(cot, sc.initial, axes, cfg);
  const LStarSystem lstar(axes);
  const auto factor = chaplygin_time_factor(axes);
  auto tau_velocity = [&](const PhasePoint& x) {
    return Eigen::VectorXd(factor(x) * cot.velocity(x.coords.head(n), x.coords.tail(n)));
  };
  const Trajectory geo =
      integrate(lstar, lstar.make_state(UnitVector(sc.initial.coords.head(n)), tau_velocity(sc.initial)), cfg);
  double gap = 0.0;
  for (std::size_t k = 0; k < std::min(geo.size(), rt.direct.size()); ++k) {
    const PhasePoint& x = rt.direct.states[k];
    Eigen::VectorXd mine(2 * n);
    mine << x.coords.head(n), tau_velocity(x);
    gap = std::max(gap, (mine - geo.states[k].coords).cwiseAbs().maxCoeff());
  }
  const double energy = conservation_report(lstar, geo, {"energy"}).at("energy").max_rel_drift;
  return {gap < 1e-6 && energy < 1e-8, "sup gap to L* geodesics " + sci(gap) + " (tol 1e-6), L* energy drift " +
                                           sci(energy) + " (tol 1e-8)"};
}

CheckResult contact_check(const Scenario& sc, const Trajectory& traj) {
  const auto& ball = static_cast<const RubberChaplyginSystem&>(*sc.system);
  double worst = 0.0;
  for (const Eigen::VectorXd& r : reconstruct_contact(ball, traj)) {
    worst = std::max(worst, std::abs(r.dot(ball.normal().coords())));
  }
  return {worst < 1e-9, "max |normal component of r(t) - r(0)| " + sci(worst) + " (tol 1e-9)"};
}

Eigen::Matrix3d tensor_of(const InertiaOperator& inertia) {
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) J.col(k) = iso3_inverse(inertia.apply(iso3(Eigen::Vector3d::Unit(k))));
  return J;
}

bool classical_applies(const Scenario& sc) {
  if (sc.n != 3) return false;
  if (sc.system_name == "gsr") return true;
  if (sc.system_name != "rubber-chaplygin") return false;
  const auto& ball = static_cast<const RubberChaplyginSystem&>(*sc.system);
  return (ball.normal().coords() - Eigen::Vector3d::UnitZ()).norm() < 1e-14;
}

CheckResult classical_check(const Scenario& sc) {
  const Eigen::Matrix3d J = tensor_of(*sc.inertia);
  if (sc.system_name == "gsr") {
    const auto& field = static_cast<const GsrSystem&>(*sc.system);
    const Layout& la = field.layout();
    const SkewMatrix gamma = skew_block(sc.initial, la.block("gamma"));
    const SkewMatrix omega = skew_block(sc.initial, la.block("omega"));
    // Only m rho^2 enters the classical field.
    const double m = 1.0;
    const double rho = std::sqrt(field.contact_inertia());
    const ClassicalChaplyginBall3 sphere(J, m, rho);
    const PhasePoint xb = sphere.make_state(iso3_inverse(omega), iso3_inverse(gamma));
    const PhasePoint da{{}, field.rate(sc.initial).coords};
    const PhasePoint db{{}, sphere.rate(xb).coords};
    const double gap = std::max(
        (iso3_inverse(skew_block(da, la.block("omega"))) - vector_block(db, sphere.layout().block("omega"))).cwiseAbs().maxCoeff(),
        (iso3_inverse(skew_block(da, la.block("gamma"))) - vector_block(db, sphere.layout().block("gamma"))).cwiseAbs().maxCoeff());
    return {gap < 1e-10, "field vs classical Chaplygin sphere " + sci(gap) + " (tol 1e-10)"};
  }
  const auto& ball = static_cast<const RubberChaplyginSystem&>(*sc.system);
  const ClassicalRubberBall3 classic(J, ball.mass(), ball.radius());
  const Block& wa = ball.layout().block("omega");
  const Block& ga = ball.layout().block("gamma");
  const IntegratorConfig cfg = capped(sc, 1.0);
  const Trajectory a = integrate(ball, sc.initial, cfg);
  const Trajectory b = integrate(
      classic, classic.make_state(iso3_inverse(skew_block(sc.initial, wa)), vector_block(sc.initial, ga)), cfg);
  const Block& wb = classic.layout().block("omega");
  const Block& gb = classic.layout().block("gamma");
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    gap = std::max(gap, (iso3_inverse(skew_block(a.states[k], wa)) - vector_block(b.states[k], wb)).cwiseAbs().maxCoeff());
    gap = std::max(gap, (vector_block(a.states[k], ga) - vector_block(b.states[k], gb)).cwiseAbs().maxCoeff());
  }
  return {gap < 1e-8, "trajectory vs vector equations " + sci(gap) + " (tol 1e-8)"};
}

const std::vector<Check>& battery() {
  static const std::vector<Check> checks{
      {"energy", [](const Scenario& sc) { return sc.integrator.steps > 0; },
       [](const Scenario& sc, const Trajectory& t, std::ostream&) { return drift_check(sc, t, "energy", 1e-8); }},
      {"constraints", [](const Scenario& sc) { return sc.integrator.steps > 0 && has_quantity(sc, "constraints"); },
       [](const Scenario& sc, const Trajectory& t, std::ostream&) { return drift_check(sc, t, "constraints", 1e-8, true); }},
      {"momentum", [](const Scenario& sc) { return sc.integrator.steps > 0 && is(sc, {"lplusr"}); },
       [](const Scenario& sc, const Trajectory& t, std::ostream&) { return drift_check(sc, t, "momentum", 1e-8); }},
      {"trace-integrals", [](const Scenario& sc) { return sc.integrator.steps > 0 && is(sc, {"support", "rubber-support"}); },
       [](const Scenario& sc, const Trajectory& t, std::ostream&) { return drift_check(sc, t, "trace_integrals", 1e-8); }},
      {"integral-rank", [](const Scenario& sc) { return sc.n == 3 && is(sc, {"rubber-support"}); },
       [](const Scenario& sc, const Trajectory&, std::ostream&) {
         const auto& sys = static_cast<const SupportSystem&>(*sc.system);
         const FlatField f = support_integrals_map(sys, sc.initial);
         const Eigen::VectorXd y = sc.initial.coords;
         const int rank = jacobian_rank(f, y);
         return CheckResult{rank >= 4, "Jacobian rank of the integrals " + std::to_string(rank) + " (need >= 4)"};
       }},
      {"noether", [](const Scenario& sc) { return sc.integrator.steps > 0 && is(sc, {"coupled"}); },
       [](const Scenario& sc, const Trajectory& t, std::ostream&) {
         CheckResult r;
         for (const std::string q : {"noether_W", "noether_momentum"}) {
           if (!has_quantity(sc, q)) continue;
           const double d = conservation_report(*sc.system, t, {q}).at(q).max_abs_drift;
           r.pass = r.pass && d < 1e-8;
           r.detail += (r.detail.empty() ? "" : ", ") + q + " drift " + sci(d);
         }
         r.detail += " (tol 1e-8)";
         return r;
       }},
      {"reduction", [](const Scenario& sc) { return sc.integrator.steps > 0 && sc.coupled.has_value(); },
       [](const Scenario& sc, const Trajectory&, std::ostream&) { return reduction_check(sc); }},
      {"epsilon-limit", [](const Scenario& sc) { return sc.epsilon_sweep.has_value(); },
       [](const Scenario& sc, const Trajectory&, std::ostream& out) { return epsilon_check(sc, out); }},
      {"measure", [](const Scenario& sc) { return is(sc, {"lr", "lplusr", "cotangent"}); },
       [](const Scenario& sc, const Trajectory& t, std::ostream&) { return measure_check(sc, t); }},
      {"density-exponent", [](const Scenario& sc) { return sc.special_axes.has_value(); },
       [](const Scenario& sc, const Trajectory&, std::ostream&) { return exponent_check(sc); }},
      {"hamiltonization", [](const Scenario& sc) { return sc.integrator.steps > 0 && sc.special_axes.has_value(); },
       [](const Scenario& sc, const Trajectory&, std::ostream&) { return hamiltonization_check(sc); }},
      {"contact", [](const Scenario& sc) { return sc.integrator.steps > 0 && is(sc, {"rubber-chaplygin"}); },
       [](const Scenario& sc, const Trajectory& t, std::ostream&) { return contact_check(sc, t); }},
      {"classical-3d", classical_applies,
       [](const Scenario& sc, const Trajectory&, std::ostream&) { return classical_check(sc); }},
  };
  return checks;
}

}  // namespace

bool verify_scenario(const Scenario& sc, std::ostream& out) {
  std::vector<const Check*> selected;
  if (sc.checks) {
    for (const std::string& name : *sc.checks) {
      const auto it = std::find_if(battery().begin(), battery().end(), [&](const Check& c) { return c.name == name; });
      if (it == battery().end()) throw CliError(kParseError, "unknown check '" + name + "'");
      if (it->applies(sc)) {
        selected.push_back(&*it);
      } else {
        out << "SKIP " << name << ": not applicable to this scenario\n";
      }
    }
  } else {
    for (const Check& c : battery()) {
      if (c.applies(sc)) selected.push_back(&c);
    }
  }
  if (selected.empty()) {
    out << "no checks apply to this scenario\n";
    return true;
  }

  Trajectory traj;
  try {
    traj = integrate(*sc.system, sc.initial, sc.integrator);
  } catch (const IntegrationError& e) {
    throw CliError(kRuntimeError, describe(e));
  }

  int passed = 0;
  for (const Check* c : selected) {
    CheckResult r;
    try {
      r = c->run(sc, traj, out);
    } catch (const IntegrationError& e) {
      throw CliError(kRuntimeError, c->name + ": " + describe(e));
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    out << (r.pass ? "PASS " : "FAIL ") << c->name << ": " << r.detail << '\n';
    passed += r.pass ? 1 : 0;
  }
  out << passed << "/" << selected.size() << " checks passed\n";
  return passed == static_cast<int>(selected.size());
}

}  // namespace lrflow::cli
