#include <gtest/gtest.h>

#include <functional>

#include "random_cases.hpp"

using namespace lrflow;
using lrflow::testing::Case;
using lrflow::testing::Random;

namespace {

// Fourth-order central difference of f along the flow, built from
// unprojected Lie RK4 micro-steps.
template <typename F>
auto flow_derivative(const System& sys, const PhasePoint& x, F f, double delta = 1e-4) {
  using Value = decltype(f(x));
  auto at = [&](double h) { return f(step(sys, x, h, Method::kLieRk4, false)); };
  return Value((8.0 * (at(delta) - at(-delta)) - (at(2.0 * delta) - at(-2.0 * delta))) / (12.0 * delta));
}

Eigen::VectorXd omega_rate(const System& sys, const PhasePoint& x) {
  const Block& b = sys.layout().block("omega");
  return sys.rate(x).coords.segment(b.offset, b.size);
}

SkewMatrix omega_of(const System& sys, const PhasePoint& x) {
  return skew_block(x, sys.layout().block("omega"));
}

// Euler-Poincare acceleration I^{-1}[I w, w].
Eigen::VectorXd euler_poincare(const InertiaOperator& I, const SkewMatrix& w) {
  return I.solve(bracket(I.apply(w), w)).coords();
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

// ----- generic properties over every system -----------------------------------

class AllSystems : public ::testing::TestWithParam<std::string> {};

TEST_P(AllSystems, EnergyIsConservedPointwise) {
  for (int n : {3, 4}) {
    const Case c = lrflow::testing::make_case(GetParam(), n, 11);
    const double scale = std::max(1.0, std::abs(c.system->energy(c.initial)));
    const double d = flow_derivative(*c.system, c.initial,
                                     [&](const PhasePoint& x) { return c.system->energy(x); });
    EXPECT_LT(std::abs(d) / scale, 1e-9) << GetParam() << " n=" << n;
  }
}

TEST_P(AllSystems, ConstraintsArePreservedToFirstOrder) {
  for (int n : {3, 4}) {
    const Case c = lrflow::testing::make_case(GetParam(), n, 12);
    c.system->validate(c.initial);
    const Eigen::VectorXd d = flow_derivative(*c.system, c.initial, [&](const PhasePoint& x) {
      return Eigen::VectorXd(c.system->quantity("constraints", x));
    });
    EXPECT_LT(max_abs(d), 1e-9) << GetParam() << " n=" << n;
  }
}

TEST_P(AllSystems, EvaluationIsDeterministic) {
  const Case c = lrflow::testing::make_case(GetParam(), 4, 13);
  const PhaseRate a = c.system->rate(c.initial);
  const PhaseRate b = c.system->rate(c.initial);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_EQ(c.system->kind(), GetParam());
}

INSTANTIATE_TEST_SUITE_P(Systems, AllSystems,
                         ::testing::Values("lr", "lplusr", "geodesic-lpr", "coupled", "coupled-reduced",
                                           "ncoupled", "support", "rubber-support", "rubber-chaplygin",
                                           "cotangent", "lstar-geodesic", "gsr"),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& ch : s) {
                             if (ch == '-') ch = '_';
                           }
                           return s;
                         });

// ----- LR ---------------------------------------------------------------------

TEST(LR, IsotropicTopIsFree) {
  Random rng(1);
  const SubspaceBasis a = SubspaceBasis::orthonormalize(4, std::vector<SkewMatrix>{rng.skew(4), rng.skew(4)});
  const LRSystem sys(InertiaOperator::identity(4), a);
  const Rotation g = rng.rotation(4);
  SkewMatrix w = rng.skew(4);
  w -= a.transported(g.inverse().matrix()).project(w);
  EXPECT_LT(max_abs(omega_rate(sys, sys.make_state(g, w))), 1e-14);
}

TEST(LR, NoConstraintsIsEulerPoincare) {
  Random rng(2);
  const InertiaOperator I = rng.inertia(3);
  const LRSystem sys(I, SubspaceBasis(3));
  const SkewMatrix w = rng.skew(3);
  const PhasePoint x = sys.make_state(rng.rotation(3), w);
  EXPECT_LT(max_abs(omega_rate(sys, x) - euler_poincare(I, w)), 1e-13);
  const double d = flow_derivative(sys, x, [&](const PhasePoint& y) {
    const SkewMatrix m = I.apply(omega_of(sys, y));
    return inner(m, m);
  });
  EXPECT_LT(std::abs(d), 1e-10);
}

TEST(LR, ConstraintDerivativeVanishes) {
  const Case c = lrflow::testing::lr_case(3, 3);
  const auto& sys = static_cast<const LRSystem&>(*c.system);
  const double d = flow_derivative(sys, c.initial, [&](const PhasePoint& y) {
    return inner(skew_block(y, sys.layout().block("alpha1")), omega_of(sys, y));
  });
  EXPECT_LT(std::abs(d), 1e-10);
}

TEST(LR, AlphaFollowsBracket) {
  const Case c = lrflow::testing::lr_case(4, 4);
  const auto& sys = static_cast<const LRSystem&>(*c.system);
  const PhaseRate r = sys.rate(c.initial);
  const Block& b = sys.layout().block("alpha2");
  const SkewMatrix alpha = skew_block(c.initial, b);
  const Eigen::VectorXd expected = bracket(alpha, omega_of(sys, c.initial)).coords();
  EXPECT_LT(max_abs(r.coords.segment(b.offset, b.size) - expected), 1e-13);
}

TEST(LR, RejectsViolatingState) {
  Random rng(5);
  const SubspaceBasis a = SubspaceBasis::orthonormalize(3, std::vector<SkewMatrix>{rng.skew(3)});
  const LRSystem sys(rng.inertia(3), a);
  EXPECT_THROW(sys.make_state(Rotation::identity(3), a[0]), ConstraintViolation);
}

// ----- L+R and geodesic ---------------------------------------------------------

TEST(LplusR, ZeroRightInertiaIsEulerPoincare) {
  Random rng(6);
  const InertiaOperator I = rng.inertia(4);
  for (auto v : {LplusRSystem::Variant::kNonholonomic, LplusRSystem::Variant::kGeodesic}) {
    const LplusRSystem sys(I, Eigen::MatrixXd::Zero(6, 6), v);
    const SkewMatrix w = rng.skew(4);
    EXPECT_LT(max_abs(omega_rate(sys, sys.make_state(rng.rotation(4), w)) - euler_poincare(I, w)), 1e-13);
  }
}

TEST(LplusR, IsotropicInertiaIsFree) {
  Random rng(7);
  const LplusRSystem sys(InertiaOperator::identity(3), 0.5 * rng.inertia(3).matrix());
  EXPECT_LT(max_abs(omega_rate(sys, sys.make_state(rng.rotation(3), rng.skew(3)))), 1e-14);
}

TEST(LplusR, ScalarOperatorsGiveConstantVelocityOnGeodesics) {
  Random rng(8);
  const LplusRSystem sys(InertiaOperator::identity(3, 1.7), 0.6 * Eigen::MatrixXd::Identity(3, 3),
                         LplusRSystem::Variant::kGeodesic);
  EXPECT_LT(max_abs(omega_rate(sys, sys.make_state(rng.rotation(3), rng.skew(3)))), 1e-14);
}

TEST(LplusR, MomentumIntegralDerivativeVanishes) {
  const Case c = lrflow::testing::lplusr_case(3, 9);
  const double d = flow_derivative(*c.system, c.initial, [&](const PhasePoint& x) {
    return c.system->quantity("momentum", x)(0);
  });
  EXPECT_LT(std::abs(d), 1e-9);
}

// d/dt(B w) against the right-hand sides of both variants.
TEST(LplusR, BalanceLaws) {
  for (auto v : {LplusRSystem::Variant::kNonholonomic, LplusRSystem::Variant::kGeodesic}) {
    Random rng(10);
    const int n = 4;
    const LplusRSystem sys(rng.inertia(n), 0.5 * rng.inertia(n).matrix(), v);
    const PhasePoint x = sys.make_state(rng.rotation(n), rng.skew(n));
    const Eigen::VectorXd lhs = flow_derivative(sys, x, [&](const PhasePoint& y) {
      return Eigen::VectorXd(sys.total_inertia(y.frames[0]) * omega_of(sys, y).coords());
    });
    const SkewMatrix w = omega_of(sys, x);
    const Eigen::MatrixXd pi = sys.conjugated_right_inertia(x.frames[0]);
    const SkewMatrix bw = SkewMatrix::from_coords(n, sys.total_inertia(x.frames[0]) * w.coords());
    SkewMatrix rhs = bracket(bw, w);
    if (v == LplusRSystem::Variant::kGeodesic) {
      rhs += bracket(w, SkewMatrix::from_coords(n, pi * w.coords()));
    }
    EXPECT_LT(max_abs(lhs - rhs.coords()), 1e-8);
  }
}

TEST(LplusR, IndefiniteTotalInertiaIsRejected) {
  Random rng(11);
  EXPECT_THROW(LplusRSystem(InertiaOperator::identity(3), -2.0 * Eigen::MatrixXd::Identity(3, 3)),
               SingularSystemError);
}

// ----- coupled ------------------------------------------------------------------

TEST(Coupled, NoSubspacesIsFreeFlow) {
  Random rng(12);
  const InertiaOperator I = rng.inertia(3);
  const CoupledFullSystem sys(CoupledData{I, 1.0, SubspaceBasis(3), {}});
  const SkewMatrix w = rng.skew(3);
  const PhasePoint x = sys.make_state(rng.rotation(3), w, rng.skew(3));
  const PhaseRate r = sys.rate(x);
  const Block& W = sys.layout().block("W");
  EXPECT_LT(max_abs(omega_rate(sys, x) - euler_poincare(I, w)), 1e-13);
  EXPECT_LT(max_abs(r.coords.segment(W.offset, W.size)), 1e-14);
}

TEST(Coupled, IsotropicBodyIsAtRest) {
  CoupledData data = lrflow::testing::coupled_data(4, 13);
  data.inertia = InertiaOperator::identity(4);
  data.h0 = SubspaceBasis(4);
  const CoupledFullSystem sys(data);
  Random rng(14);
  const Rotation g = rng.rotation(4);
  const SkewMatrix w = rng.skew(4);
  SkewMatrix W = rng.skew(4);
  const SkewMatrix space = adjoint_action(g, w);
  for (const auto& p : data.peripherals) {
    W -= p.subspace.project(W) + (1.0 / p.rho) * p.subspace.project(space);
  }
  const PhaseRate r = sys.rate(sys.make_state(g, w, W));
  EXPECT_LT(max_abs(r.coords), 1e-13);
}

// The full field against the closed forms of the reduction: B w' from the
// reduced field and D W' = -sum D / rho_i pr_{h_i} d/dt(Ad_g w).
TEST(Coupled, FullFieldMatchesClosedForms) {
  for (int n : {3, 4}) {
    const auto [full, reduced] = lrflow::testing::coupled_pair(n, 15);
    const auto& sys = static_cast<const CoupledFullSystem&>(*full.system);
    const int N = bivector_dim(n);
    const PhaseRate rf = sys.rate(full.initial);
    const PhaseRate rr = reduced.system->rate(reduced.initial);
    EXPECT_LT(max_abs(rf.coords.head(N) - rr.coords.head(N)), 1e-10) << n;

    const Eigen::MatrixXd Ad = congruence_matrix(full.initial.frames[0]);
    const Eigen::VectorXd space_acc = Ad * rf.coords.head(N);  // d/dt Ad_g w = Ad_g w'
    Eigen::VectorXd Wdot = Eigen::VectorXd::Zero(N);
    for (const auto& p : sys.data().peripherals) Wdot -= (1.0 / p.rho) * (p.subspace.projector_matrix() * space_acc);
    EXPECT_LT(max_abs(rf.coords.segment(N, N) - Wdot), 1e-10) << n;
  }
}

TEST(Coupled, NoInitialConstraintsReducesToLplusR) {
  CoupledData data = lrflow::testing::coupled_data(4, 16);
  data.h0 = SubspaceBasis(4);
  const CoupledReducedSystem reduced(data);
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(6, 6);
  for (const auto& p : data.peripherals) {
    pi += data.peripheral_inertia / (p.rho * p.rho) * p.subspace.projector_matrix();
  }
  const LplusRSystem lpr(data.inertia, pi);
  Random rng(17);
  const Rotation g = rng.rotation(4);
  const SkewMatrix w = rng.skew(4);
  EXPECT_LT(max_abs(reduced.rate(reduced.make_state(g, w)).coords - lpr.rate(lpr.make_state(g, w)).coords), 1e-12);
}

TEST(Coupled, ShortTrajectoriesAgree) {
  const auto [full, reduced] = lrflow::testing::coupled_pair(3, 18);
  IntegratorConfig cfg;
  cfg.steps = 200;
  const Trajectory a = integrate(*full.system, full.initial, cfg);
  const Trajectory b = integrate(*reduced.system, reduced.initial, cfg);
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d = std::max(d, (a.states[k].frames[0] - b.states[k].frames[0]).cwiseAbs().maxCoeff());
    d = std::max(d, max_abs(a.states[k].coords.head(3) - b.states[k].coords.head(3)));
  }
  EXPECT_LT(d, 1e-6);
}

TEST(Coupled, NoetherQuantitiesAreConstant) {
  const auto [full, reduced] = lrflow::testing::coupled_pair(4, 19);
  for (const Case* c : {&full, &reduced}) {
    for (const std::string& q : c->system->quantity_names()) {
      if (q.rfind("noether", 0) != 0) continue;
      const Eigen::VectorXd d = flow_derivative(*c->system, c->initial, [&](const PhasePoint& x) {
        return Eigen::VectorXd(c->system->quantity(q, x));
      });
      EXPECT_LT(max_abs(d), 1e-9) << c->system->kind() << " " << q;
    }
  }
}

TEST(Coupled, OverlappingPeripheralsAreRejected) {
  CoupledData data = lrflow::testing::coupled_data(4, 20);
  data.peripherals[1].subspace = data.peripherals[0].subspace;
  EXPECT_THROW(CoupledFullSystem{data}, InvariantError);
  data = lrflow::testing::coupled_data(4, 20);
  data.peripheral_inertia = 0.0;
  EXPECT_THROW(CoupledReducedSystem{data}, InvariantError);
}

// ----- N-coupled ----------------------------------------------------------------

TEST(NCoupled, ZeroConstraintsIsFreeFlow) {
  Random rng(21);
  const InertiaOperator I = rng.inertia(4);
  const NCoupledSystem sys(I, {CoupledBody{1.0, Eigen::MatrixXd::Zero(6, 6), Eigen::MatrixXd::Identity(6, 6)}});
  const SkewMatrix w = rng.skew(4);
  EXPECT_LT(max_abs(omega_rate(sys, sys.make_state(rng.rotation(4), w)) - euler_poincare(I, w)), 1e-13);
}

TEST(NCoupled, CommutatorBodiesMatchClosedForm) {
  Random rng(22);
  const int n = 4;
  const InertiaOperator I = rng.inertia(n);
  const std::vector<SkewMatrix> gammas{rng.skew(n), rng.skew(n)};
  const std::vector<double> rhos{0.7, -1.3}, ds{0.9, 1.4};
  const NCoupledSystem sys(I, NCoupledSystem::commutator_bodies(gammas, rhos, ds));
  const Rotation g = rng.rotation(n);
  const SkewMatrix w = rng.skew(n);
  const PhasePoint x = sys.make_state(g, w);

  Eigen::MatrixXd B = I.matrix();
  for (int i = 0; i < 2; ++i) {
    const Eigen::MatrixXd ad = bracket_matrix(adjoint_action(g.inverse(), gammas[i]));
    B += ds[i] / (rhos[i] * rhos[i]) * ad.transpose() * ad;  // [[gamma, X], gamma] = -ad^2 X = ad^T ad X
  }
  EXPECT_LT(max_abs(sys.reduced_inertia(g.matrix()) - B), 1e-12);
  const Eigen::VectorXd closed = B.llt().solve(bracket(I.apply(w), w).coords());
  EXPECT_LT(max_abs(omega_rate(sys, x) - closed), 1e-10);
}

TEST(NCoupled, SingularBodyIsRejected) {
  EXPECT_THROW(NCoupledSystem(InertiaOperator::identity(3),
                              {CoupledBody{1.0, Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(3, 3)}}),
               SingularSystemError);
}

// ----- GSR ------------------------------------------------------------------------

TEST(Gsr, CommutingVelocityWithIsotropicBodyIsSteady) {
  const GsrSystem sys(InertiaOperator::identity(4, 2.0), 1.0, 0.8);
  const PhasePoint x = sys.make_state(SkewMatrix::basis(4, 0, 1), 0.7 * SkewMatrix::basis(4, 2, 3));
  EXPECT_LT(max_abs(sys.rate(x).coords), 1e-15);
  EXPECT_LT((sys.momentum(x) - 1.4 * SkewMatrix::basis(4, 2, 3)).norm(), 1e-15);
}

TEST(Gsr, CasimirsAreConstant) {
  const Case c = lrflow::testing::gsr_case(4, 23);
  for (const char* q : {"gamma_norm", "momentum_norm"}) {
    const double d = flow_derivative(*c.system, c.initial, [&](const PhasePoint& x) {
      return c.system->quantity(q, x)(0);
    });
    EXPECT_LT(std::abs(d), 1e-10) << q;
  }
}

// ----- support ----------------------------------------------------------------

TEST(Support, NoBallsIsEulerPoincare) {
  Random rng(24);
  const InertiaOperator I = rng.inertia(4);
  const SupportSystem sys(I, {}, false);
  const SkewMatrix w = rng.skew(4);
  EXPECT_LT(max_abs(omega_rate(sys, sys.make_state(rng.rotation(4), w)) - euler_poincare(I, w)), 1e-13);
}

TEST(Support, ProjectorPoissonEquation) {
  const Case c = lrflow::testing::support_case(4, 25, false);
  const Block& b = c.system->layout().block("gamma2");
  const Eigen::MatrixXd dX = flow_derivative(*c.system, c.initial, [&](const PhasePoint& x) {
    const Eigen::VectorXd g = vector_block(x, b);
    return Eigen::MatrixXd(g * g.transpose());
  });
  const Eigen::VectorXd g = vector_block(c.initial, b);
  const Eigen::MatrixXd X = g * g.transpose();
  const Eigen::MatrixXd w = omega_of(*c.system, c.initial).matrix();
  EXPECT_LT((dX - (X * w - w * X)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Support, QuadraticTraceIntegralOverUnitTime) {
  const Case c = lrflow::testing::support_case(3, 26, false);
  const auto& sys = static_cast<const SupportSystem&>(*c.system);
  IntegratorConfig cfg;
  cfg.steps = 1000;
  const Trajectory traj = integrate(sys, c.initial, cfg);
  auto trace2 = [&](const PhasePoint& x, double mu) {
    const Eigen::VectorXd g = vector_block(x, sys.layout().block("gamma1"));
    const Eigen::MatrixXd M = SkewMatrix::from_coords(3, sys.total_inertia(x) * omega_of(sys, x).coords()).matrix() +
                              mu * g * g.transpose();
    return (M * M).trace();
  };
  for (double mu : {0.0, 1.0, 2.0}) {
    EXPECT_NEAR(trace2(traj.states.back(), mu), trace2(traj.states.front(), mu), 1e-8) << mu;
  }
}

TEST(Support, FirstTraceIsBallCount) {
  const Case c = lrflow::testing::support_case(4, 27, true);
  const auto& sys = static_cast<const SupportSystem&>(*c.system);
  for (const TraceCoefficient& t : sys.trace_integrals(c.initial, 1)) {
    if (t.degree == 1) {
      int total = 0;
      for (int p : t.powers) total += p;
      EXPECT_NEAR(t.value, total == 1 ? 1.0 : 0.0, 1e-14);
    }
  }
}

TEST(Support, MultiplierFormulationAgrees) {
  for (bool rubber : {false, true}) {
    for (int n : {3, 4}) {
      const Case c = lrflow::testing::support_case(n, 28, rubber);
      const auto& sys = static_cast<const SupportSystem&>(*c.system);
      EXPECT_LT(max_abs(sys.multiplier_acceleration(c.initial) - omega_rate(sys, c.initial)), 1e-10)
          << rubber << " " << n;
    }
  }
}

TEST(Support, UnitRadiusRubberIsShiftedTop) {
  Random rng(29);
  const InertiaOperator I = rng.inertia(4);
  const SupportSystem sys(I, {{0.8, 1.0, rng.unit(4)}, {0.5, 1.0, rng.unit(4)}}, true);
  const PhasePoint x = sys.make_state(rng.rotation(4), rng.skew(4));
  EXPECT_LT(max_abs(sys.total_inertia(x) - (I.matrix() + 1.3 * Eigen::MatrixXd::Identity(6, 6))), 1e-14);
  const SkewMatrix w = omega_of(sys, x);
  EXPECT_LT(max_abs(omega_rate(sys, x) - euler_poincare(I.plus_identity(1.3), w)), 1e-12);
}

TEST(Support, DetachedBallsGiveFreeFlow) {
  Random rng(30);
  const InertiaOperator I = rng.inertia(3);
  const SupportSystem sys(I, {{0.0, 0.7, rng.unit(3)}}, true);
  const SkewMatrix w = rng.skew(3);
  EXPECT_LT(max_abs(omega_rate(sys, sys.make_state(rng.rotation(3), w)) - euler_poincare(I, w)), 1e-13);
}

// D (Id - P) + D / rho^2 P is positive semidefinite for every rho, so large
// radius ratios never make the rubber operator indefinite.
TEST(Support, LargeRadiusRatioKeepsRubberInertiaDefinite) {
  Random rng(44);
  const SupportSystem sys(InertiaOperator::identity(3), {{5.0, 3.0, UnitVector::axis(3, 2)}}, true);
  const PhasePoint x = sys.make_state(rng.rotation(3), rng.skew(3));
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sys.total_inertia(x)).eigenvalues();
  EXPECT_NEAR(eig.minCoeff(), 1.0 + 5.0 / 9.0, 1e-12);
}

TEST(Support, InvalidBallsAreRejected) {
  EXPECT_THROW(SupportSystem(InertiaOperator::identity(3), {{-1.0, 0.5, UnitVector::axis(3, 2)}}, false),
               InvariantError);
  EXPECT_THROW(SupportSystem(InertiaOperator::identity(3), {{1.0, 0.0, UnitVector::axis(3, 2)}}, true),
               InvariantError);
  EXPECT_THROW(SupportSystem(InertiaOperator::identity(3), {{1.0, 0.5, UnitVector::axis(4, 2)}}, true),
               DimensionError);
}

TEST(Support, FourIndependentIntegralsForThreeDimensionalRubber) {
  const Case c = lrflow::testing::support_case(3, 31, true);
  const auto& sys = static_cast<const SupportSystem&>(*c.system);
  EXPECT_GE(jacobian_rank(support_integrals_map(sys, c.initial), c.initial.coords), 4);
}

// ----- rubber Chaplygin ball -----------------------------------------------------

TEST(RubberChaplygin, RestIsEquilibrium) {
  Random rng(32);
  const RubberChaplyginSystem sys(rng.inertia(4), 1.0, 0.7);
  const PhaseRate r = sys.rate(sys.make_state(rng.rotation(4), SkewMatrix::zero(4)));
  EXPECT_LT(max_abs(r.coords), 1e-15);
  EXPECT_LT(r.frame_velocity[0].cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RubberChaplygin, MomentumOnConstraintSet) {
  const Case c = lrflow::testing::rubber_chaplygin_case(4, 33);
  const auto& sys = static_cast<const RubberChaplyginSystem&>(*c.system);
  const SkewMatrix w = omega_of(sys, c.initial);
  const SkewMatrix expected = sys.inertia().apply(w) + sys.contact_inertia() * w;
  EXPECT_LT((sys.contact_momentum(c.initial) - expected).norm(), 1e-13);
}

TEST(RubberChaplygin, MatchesVectorEquationsInThreeDimensions) {
  Random rng(34);
  const Eigen::Matrix3d J = rng.tensor3();
  const RubberChaplyginSystem ball(InertiaOperator::from_tensor3(J), 1.1, 0.6);
  const ClassicalRubberBall3 classic(J, 1.1, 0.6);
  const Rotation g = rng.rotation(3);
  const Eigen::Vector3d gamma = g.matrix().transpose() * Eigen::Vector3d::UnitZ();
  const SkewMatrix w = wedge(rng.vector(3), gamma);
  const PhaseRate a = ball.rate(ball.make_state(g, w));
  const PhaseRate b = classic.rate(classic.make_state(iso3_inverse(w), gamma));
  const PhasePoint da{{}, a.coords};
  EXPECT_LT((iso3_inverse(skew_block(da, ball.layout().block("omega"))) - b.coords.head(3)).norm(), 1e-12);
  EXPECT_LT((a.coords.tail(3) - b.coords.tail(3)).norm(), 1e-12);
}

TEST(RubberChaplygin, NoTwistSurvivesIntegration) {
  const Case c = lrflow::testing::rubber_chaplygin_case(4, 35);
  IntegratorConfig cfg;
  cfg.steps = 2000;
  const Trajectory traj = integrate(*c.system, c.initial, cfg);
  for (const NamedValue& v : c.system->constraint_residuals(traj.states.back())) {
    EXPECT_LT(std::abs(v.value), 1e-8) << v.name;
  }
}

TEST(RubberChaplygin, RejectsTwistingVelocity) {
  Random rng(36);
  const RubberChaplyginSystem sys(rng.inertia(3), 1.0, 0.5);
  // With gamma = e3 at g = Id, E_12 spins about the normal.
  EXPECT_THROW(sys.make_state(Rotation::identity(3), SkewMatrix::basis(3, 0, 1)), ConstraintViolation);
}

// ----- cotangent and L* --------------------------------------------------------------

TEST(Cotangent, ZeroMomentumIsFixedPoint) {
  Random rng(37);
  const CotangentSystem sys(rng.inertia(4), 1.0, 0.8);
  EXPECT_LT(max_abs(sys.rate(sys.make_state(rng.unit(4), Eigen::VectorXd::Zero(4))).coords), 1e-15);
}

TEST(Cotangent, IsotropicInertiaGivesGreatCircles) {
  Random rng(38);
  const double c = 1.5, m = 1.2, rho = 0.5;
  const CotangentSystem sys(InertiaOperator::identity(3, c), m, rho);
  const UnitVector gamma = rng.unit(3);
  Eigen::VectorXd v = rng.vector(3);
  v -= v.dot(gamma.coords()) * gamma.coords();
  const Eigen::VectorXd p = (m * rho * rho + c) * v;
  EXPECT_LT((sys.velocity(gamma.coords(), p) - v).norm(), 1e-13);

  IntegratorConfig cfg;
  cfg.steps = 1000;
  const Trajectory traj = integrate(sys, sys.make_state(gamma, p), cfg);
  const Eigen::Vector3d normal = Eigen::Vector3d(gamma.coords()).cross(Eigen::Vector3d(v)).normalized();
  for (const PhasePoint& x : traj.states) {
    const Eigen::VectorXd g = x.coords.head(3);
    EXPECT_LT(std::abs(g.dot(normal)), 1e-10);
    EXPECT_NEAR(sys.velocity(g, x.coords.tail(3)).norm(), v.norm(), 1e-10);
  }
}

TEST(Cotangent, ProjectionOfGroupFlow) {
  Random rng(39);
  const InertiaOperator I = rng.inertia(4);
  const RubberChaplyginSystem ball(I, 0.9, 0.7);
  const CotangentSystem cot(I, 0.9, 0.7);
  const Rotation g = rng.rotation(4);
  const Eigen::VectorXd gamma = g.matrix().transpose() * ball.normal().coords();
  const PhasePoint x0 = ball.make_state(g, wedge(rng.vector(4), gamma));
  IntegratorConfig cfg;
  cfg.steps = 1000;
  const Trajectory a = integrate(ball, x0, cfg);
  const Trajectory b = integrate(cot, cot.from_group(ball, x0), cfg);
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d = std::max(d, max_abs(cot.from_group(ball, a.states[k]).coords - b.states[k].coords));
  }
  EXPECT_LT(d, 1e-7);
}

TEST(Cotangent, RejectsMomentumOffTangentSpace) {
  const CotangentSystem sys(InertiaOperator::identity(3), 1.0, 1.0);
  EXPECT_THROW(sys.make_state(UnitVector::axis(3, 0), Eigen::Vector3d(1.0, 0.0, 0.0)), ConstraintViolation);
}

TEST(LStar, RoundSphereGivesGreatCircles) {
  Random rng(40);
  const LStarSystem sys(Eigen::VectorXd::Ones(4));
  const UnitVector gamma = rng.unit(4);
  Eigen::VectorXd v = rng.vector(4);
  v -= v.dot(gamma.coords()) * gamma.coords();
  const PhasePoint x = sys.make_state(gamma, v);
  EXPECT_NEAR(sys.energy(x), 0.5 * v.squaredNorm(), 1e-14);
  const Eigen::VectorXd acc = sys.rate(x).coords.tail(4);
  EXPECT_LT((acc + v.squaredNorm() * gamma.coords()).norm(), 1e-12);
}

TEST(LStar, EnergyFlatOverTenThousandSteps) {
  const Case c = lrflow::testing::lstar_case(3, 41);
  IntegratorConfig cfg;
  cfg.steps = 10000;
  const Trajectory traj = integrate(*c.system, c.initial, cfg);
  EXPECT_LT(conservation_report(*c.system, traj, {"energy"}).at("energy").max_rel_drift, 1e-9);
}

TEST(LStar, RejectsNonPositiveAxes) {
  EXPECT_THROW(LStarSystem(Eigen::Vector3d(1.0, 0.0, 2.0)), InvariantError);
}

TEST(TimeRescaled, ScalesTheField) {
  Eigen::VectorXd axes;
  const Case c = lrflow::testing::special_cotangent_case(3, 42, &axes);
  const auto factor = chaplygin_time_factor(axes);
  const TimeRescaledSystem sys(c.system, factor, "tau");
  EXPECT_EQ(sys.kind(), "cotangent-tau");
  EXPECT_LT(max_abs(sys.rate(c.initial).coords - factor(c.initial) * c.system->rate(c.initial).coords), 1e-15);
}
