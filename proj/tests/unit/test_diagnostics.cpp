#include <gtest/gtest.h>

#include <cmath>

#include "random_cases.hpp"

using namespace lrflow;
using lrflow::testing::Case;
using lrflow::testing::Random;

namespace {

IntegratorConfig config(double h, long steps) {
  IntegratorConfig cfg;
  cfg.step = h;
  cfg.steps = steps;
  return cfg;
}

MeasureDensity constant_density(double c) {
  return {"constant", [c](const Eigen::VectorXd&) { return c; }};
}

Trajectory prefix(const Trajectory& t, std::size_t count) {
  Trajectory out;
  out.times.assign(t.times.begin(), t.times.begin() + static_cast<long>(count));
  out.states.assign(t.states.begin(), t.states.begin() + static_cast<long>(count));
  return out;
}

}  // namespace

// ----- conservation reports ---------------------------------------------------

TEST(ConservationReport, SingleStateHasNoDrift) {
  const Case c = lrflow::testing::support_case(4, 1, true);
  Trajectory t;
  t.times = {0.0};
  t.states = {c.initial};
  const ConservationReport r = conservation_report(*c.system, t, c.system->quantity_names());
  ASSERT_EQ(r.quantities.size(), c.system->quantity_names().size());
  for (const QuantityDrift& q : r.quantities) {
    EXPECT_EQ(q.max_abs_drift, 0.0) << q.name;
    EXPECT_EQ(q.max_rel_drift, 0.0) << q.name;
  }
}

TEST(ConservationReport, RejectsUnknownQuantityAndEmptyTrajectory) {
  const Case c = lrflow::testing::lr_case(3, 2);
  const Trajectory t = integrate(*c.system, c.initial, config(1e-2, 3));
  EXPECT_THROW(conservation_report(*c.system, t, {"angular_momentum"}), std::invalid_argument);
  EXPECT_THROW(conservation_report(*c.system, Trajectory{}, {"energy"}), std::invalid_argument);
  const ConservationReport r = conservation_report(*c.system, t, {"energy"});
  EXPECT_THROW(r.at("momentum"), std::out_of_range);
}

TEST(ConservationReport, PrefixDriftNeverExceedsFullDrift) {
  const Case c = lrflow::testing::coupled_full_case(4, 3);
  const Trajectory t = integrate(*c.system, c.initial, config(1e-2, 200));
  const auto names = c.system->quantity_names();
  const ConservationReport full = conservation_report(*c.system, t, names);
  const ConservationReport part = conservation_report(*c.system, prefix(t, 80), names);
  for (const std::string& name : names) {
    EXPECT_LE(part.at(name).max_abs_drift, full.at(name).max_abs_drift) << name;
    EXPECT_LE(part.at(name).max_abs_value, full.at(name).max_abs_value) << name;
  }
}

// Residuals start at round-off, so their relative drift is meaningless and
// the absolute value is what gets checked.
TEST(ConservationReport, ConstraintResidualStaysSmall) {
  const Case c = lrflow::testing::lr_case(4, 4);
  const Trajectory t = integrate(*c.system, c.initial, config(1e-2, 50));
  const QuantityDrift q = conservation_report(*c.system, t, {"constraints"}).at("constraints");
  EXPECT_LT(q.max_abs_value, 1e-10);
  EXPECT_GE(q.max_abs_value, q.initial.cwiseAbs().maxCoeff());
}

TEST(ConservationReport, IsDeterministic) {
  const Case c = lrflow::testing::ncoupled_case(4, 5);
  const Trajectory t = integrate(*c.system, c.initial, config(1e-2, 100));
  const auto a = conservation_report(*c.system, t, {"energy"}).at("energy").max_abs_drift;
  const auto b = conservation_report(*c.system, t, {"energy"}).at("energy").max_abs_drift;
  EXPECT_EQ(a, b);
}

TEST(ConservationReport, FirstTraceCoefficientIsBallCount) {
  const Case c = lrflow::testing::support_case(4, 6, false);
  const auto& sys = static_cast<const SupportSystem&>(*c.system);
  const Trajectory t = integrate(sys, c.initial, config(1e-2, 300));
  for (const PhasePoint& x : {t.states.front(), t.states.back()}) {
    double linear = 0.0;
    for (const TraceCoefficient& tc : sys.trace_integrals(x, 1)) linear += tc.value;
    EXPECT_NEAR(linear, 2.0, 1e-12);
  }
  EXPECT_LT(conservation_report(sys, t, {"trace_integrals"}).at("trace_integrals").max_rel_drift, 1e-9);
}

// ----- divergence -------------------------------------------------------------

TEST(Divergence, FreeTopIsVolumePreserving) {
  Random rng(7);
  for (int n : {3, 4}) {
    const InertiaOperator inertia = rng.inertia(n);
    const FlatField euler = [&](const Eigen::VectorXd& y) {
      const SkewMatrix w = SkewMatrix::from_coords(n, y);
      return Eigen::VectorXd(inertia.solve(bracket(inertia.apply(w), w)).coords());
    };
    const DivergenceResult d = measure_divergence(euler, constant_density(1.0), rng.vector(bivector_dim(n)));
    EXPECT_LT(std::abs(d.value), 1e-6) << n;
    EXPECT_TRUE(d.consistent);
  }
}

TEST(Divergence, LplusRChartAtRandomPoints) {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const Case c = lrflow::testing::lplusr_case(3, seed);
    const MeasureChart chart = lplusr_measure_chart(static_cast<const LplusRSystem&>(*c.system), c.initial);
    EXPECT_LT(std::abs(measure_divergence(chart.field, chart.density, chart.point).value), 1e-5) << seed;
  }
}

TEST(Divergence, ScalesLinearlyWithDensity) {
  const FlatField dilation = [](const Eigen::VectorXd& y) { return Eigen::VectorXd(y); };
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(3, 0.2, 0.9);
  const double one = measure_divergence(dilation, constant_density(1.0), y).value;
  const double three = measure_divergence(dilation, constant_density(3.0), y).value;
  EXPECT_NEAR(one, 3.0, 1e-8);
  EXPECT_NEAR(three / one, 3.0, 1e-10);
}

TEST(Divergence, FlagsCancellation) {
  const FlatField wiggle = [](const Eigen::VectorXd& y) {
    return Eigen::VectorXd(1e8 * y.array().sin());
  };
  const DivergenceResult d = measure_divergence(wiggle, constant_density(1.0), Eigen::VectorXd::Constant(2, 1e3), 1e-13);
  EXPECT_FALSE(d.consistent);
  EXPECT_FALSE(d.warning.empty());
}

TEST(JacobianRank, DetectsDependentRows) {
  const FlatField f = [](const Eigen::VectorXd& y) {
    Eigen::VectorXd out(3);
    out << y(0), y(0) + y(1), 2.0 * y(0) + 2.0 * y(1);
    return out;
  };
  EXPECT_EQ(jacobian_rank(f, Eigen::Vector3d(0.1, 0.2, 0.3)), 2);
}

// ----- Chaplygin densities ----------------------------------------------------

TEST(ChaplyginDensity, IsotropicAxesGiveConstantDensities) {
  Random rng(20);
  const CotangentSystem sys(InertiaOperator::special(Eigen::VectorXd::Ones(3), 0.5), 1.0, std::sqrt(0.5));
  const ChaplyginDensities first = chaplygin_measure_check(sys, rng.unit(3).coords());
  for (int k = 0; k < 20; ++k) {
    const ChaplyginDensities d = chaplygin_measure_check(sys, rng.unit(3).coords());
    EXPECT_NEAR(d.restricted, first.restricted, 1e-13);
    EXPECT_NEAR(d.special, 1.0, 1e-14);
  }
}

TEST(ChaplyginDensity, RatioIsConstantForRandomAxes) {
  Eigen::VectorXd axes;
  const Case c = lrflow::testing::special_cotangent_case(3, 21, &axes);
  const auto& sys = static_cast<const CotangentSystem&>(*c.system);
  Random rng(22);
  std::vector<double> ratios;
  for (int k = 0; k < 100; ++k) {
    const ChaplyginDensities d = chaplygin_measure_check(sys, rng.unit(3).coords());
    ratios.push_back(d.restricted / d.special);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LT((*hi - *lo) / std::abs(*lo), 1e-8);
}

TEST(ChaplyginDensity, FourDimensionalExponent) {
  Eigen::VectorXd axes;
  const Case c = lrflow::testing::special_cotangent_case(4, 23, &axes);
  Random rng(24);
  std::vector<Eigen::VectorXd> gammas;
  for (int k = 0; k < 40; ++k) gammas.push_back(rng.unit(4).coords());
  EXPECT_NEAR(chaplygin_density_exponent(static_cast<const CotangentSystem&>(*c.system), gammas), -1.0, 1e-6);
}

TEST(ChaplyginDensity, SpecialIsNanWithoutSpecialInertia) {
  Random rng(25);
  const CotangentSystem sys(rng.inertia(3), 1.0, 0.7);
  EXPECT_TRUE(std::isnan(chaplygin_measure_check(sys, rng.unit(3).coords()).special));
}

// ----- epsilon limit ----------------------------------------------------------

TEST(EpsilonLimit, ErrorsDecreaseAtFirstOrder) {
  Random rng(30);
  const InertiaOperator inertia = rng.inertia(3);
  const SubspaceBasis constraints = SubspaceBasis::orthonormalize(3, std::vector<SkewMatrix>{rng.skew(3)});
  SkewMatrix omega0 = rng.skew(3);
  omega0 -= constraints.project(omega0);
  const auto rows = epsilon_limit_study(inertia, constraints, omega0, {1e2, 1e3, 1e4}, 1.0);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[1].error, rows[0].error);
  EXPECT_LT(rows[2].error, rows[1].error);
  EXPECT_NEAR(epsilon_limit_slope(rows), -1.0, 0.2);
}

TEST(EpsilonLimit, IsotropicBodyHasNoGap) {
  Random rng(31);
  const SubspaceBasis constraints = SubspaceBasis::orthonormalize(3, std::vector<SkewMatrix>{rng.skew(3)});
  SkewMatrix omega0 = rng.skew(3);
  omega0 -= constraints.project(omega0);
  const auto rows = epsilon_limit_study(InertiaOperator::identity(3), constraints, omega0, {1e2, 1e4}, 1.0);
  for (const auto& r : rows) EXPECT_LT(r.error, 1e-12) << r.epsilon;
}

// ----- reconstruction ---------------------------------------------------------

TEST(ContactPath, StillBallStaysPut) {
  Random rng(40);
  const RubberChaplyginSystem ball(rng.inertia(3), 1.0, 0.8);
  const PhasePoint x0 = ball.make_state(rng.rotation(3), SkewMatrix::zero(3));
  const Trajectory t = integrate(ball, x0, config(1e-2, 100));
  for (const Eigen::VectorXd& r : reconstruct_contact(ball, t)) EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ContactPath, NormalComponentStaysFlat) {
  for (int n : {3, 4}) {
    const Case c = lrflow::testing::rubber_chaplygin_case(n, 41);
    const auto& ball = static_cast<const RubberChaplyginSystem&>(*c.system);
    const auto path = reconstruct_contact(ball, integrate(ball, c.initial, config(1e-3, 2000)));
    ASSERT_EQ(path.size(), 2001u);
    for (const Eigen::VectorXd& r : path) EXPECT_LT(std::abs(r(n - 1)), 1e-9) << n;
  }
}

TEST(ContactPath, QuadratureIsSecondOrder) {
  const Case c = lrflow::testing::rubber_chaplygin_case(3, 42);
  const auto& ball = static_cast<const RubberChaplyginSystem&>(*c.system);
  auto endpoint = [&](double h) {
    return reconstruct_contact(ball, integrate(ball, c.initial, config(h, std::lround(1.0 / h)))).back();
  };
  const Eigen::VectorXd r1 = endpoint(0.02), r2 = endpoint(0.01), r4 = endpoint(0.005);
  const Eigen::VectorXd ref = (4.0 * r4 - r2) / 3.0;
  const double ratio = (r1 - ref).norm() / (r2 - ref).norm();
  EXPECT_GT(ratio, 2.0);
  EXPECT_LT(ratio, 4.5);
}

TEST(PeripheralVelocity, ReconstructionMatchesFullFlow) {
  for (int n : {3, 4}) {
    const Case c = lrflow::testing::coupled_full_case(n, 43);
    const auto& full = static_cast<const CoupledFullSystem&>(*c.system);
    const Block& wb = full.layout().block("W");
    const SkewMatrix W0 = skew_block(c.initial, wb);
    const Trajectory t = integrate(full, c.initial, config(1e-3, 1000));
    const auto W = reconstruct_W(full.data(), t, W0);
    ASSERT_EQ(W.size(), t.size());
    double gap = 0.0, residual = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      gap = std::max(gap, (W[k] - skew_block(t.states[k], wb)).matrix().cwiseAbs().maxCoeff());
      PhasePoint x = t.states[k];
      x.coords.segment(wb.offset, wb.size) = W[k].coords();
      for (const auto& r : full.constraint_residuals(x)) residual = std::max(residual, std::abs(r.value));
    }
    EXPECT_LT(gap, 1e-7) << n;
    EXPECT_LT(residual, 1e-12) << n;
  }
}

TEST(PeripheralVelocity, FreePartStaysZero) {
  const Case c = lrflow::testing::coupled_reduced_case(4, 44);
  const auto& reduced = static_cast<const CoupledReducedSystem&>(*c.system);
  const Trajectory t = integrate(reduced, c.initial, config(1e-2, 100));
  const SubspaceBasis k = reduced.data().free_peripheral_subspace();
  Random rng(45);
  SkewMatrix W0 = rng.skew(4);
  W0 -= k.project(W0);
  for (const SkewMatrix& W : reconstruct_W(reduced.data(), t, W0)) {
    EXPECT_LT(k.project(W).norm(), 1e-14);
  }
}

TEST(TrajectoryDistance, IdenticalIsZero) {
  const Case c = lrflow::testing::gsr_case(3, 46);
  const Trajectory t = integrate(*c.system, c.initial, config(1e-2, 20));
  EXPECT_EQ(trajectory_distance(t, t), 0.0);
}
