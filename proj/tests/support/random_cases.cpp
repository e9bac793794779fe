#include "random_cases.hpp"

#include <stdexcept>

namespace lrflow::testing {

double Random::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Random::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

Eigen::VectorXd Random::vector(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Eigen::VectorXd Random::uniform_vector(int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
  return v;
}

UnitVector Random::unit(int n) { return UnitVector::normalized(vector(n)); }

SkewMatrix Random::skew(int n) { return SkewMatrix::from_coords(n, vector(bivector_dim(n))); }

Rotation Random::rotation(int n) { return Rotation::project(expm(2.0 * skew(n).matrix())); }

namespace {

Eigen::MatrixXd random_orthogonal(Random& rng, int m) {
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i) a.col(i) = rng.vector(m);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

}  // namespace

InertiaOperator Random::inertia(int n) {
  const int N = bivector_dim(n);
  const Eigen::MatrixXd q = random_orthogonal(*this, N);
  const Eigen::VectorXd d = uniform_vector(N, 1.0, 3.0);
  return InertiaOperator::dense(n, q * d.asDiagonal() * q.transpose());
}

Eigen::Matrix3d Random::tensor3() {
  const Eigen::MatrixXd q = random_orthogonal(*this, 3);
  const Eigen::VectorXd d = uniform_vector(3, 1.0, 2.0);
  return q * d.asDiagonal() * q.transpose();
}

SubspaceBasis Random::rotated_whole(int n) {
  std::vector<SkewMatrix> gens;
  for (int k = 0; k < bivector_dim(n); ++k) gens.push_back(skew(n));
  return SubspaceBasis::orthonormalize(n, gens);
}

namespace {

SubspaceBasis pick(const SubspaceBasis& whole, std::initializer_list<int> indices) {
  std::vector<SkewMatrix> gens;
  for (int i : indices) gens.push_back(whole[i]);
  return SubspaceBasis::orthonormalize(whole.n(), gens);
}

}  // namespace

Case lr_case(int n, std::uint64_t seed) {
  Random rng(seed);
  const InertiaOperator inertia = rng.inertia(n);
  const SubspaceBasis whole = rng.rotated_whole(n);
  const SubspaceBasis constraints = n == 3 ? pick(whole, {0}) : pick(whole, {0, 1});
  auto sys = std::make_shared<LRSystem>(inertia, constraints);
  const Rotation g = rng.rotation(n);
  SkewMatrix omega = rng.skew(n);
  omega -= constraints.transported(g.inverse().matrix()).project(omega);
  return {sys, sys->make_state(g, omega)};
}

namespace {

Case lplusr_variant(int n, std::uint64_t seed, LplusRSystem::Variant variant) {
  Random rng(seed);
  const InertiaOperator inertia = rng.inertia(n);
  const Eigen::MatrixXd pi0 = 0.5 * rng.inertia(n).matrix();
  auto sys = std::make_shared<LplusRSystem>(inertia, pi0, variant);
  return {sys, sys->make_state(rng.rotation(n), rng.skew(n))};
}

}  // namespace

Case lplusr_case(int n, std::uint64_t seed) {
  return lplusr_variant(n, seed, LplusRSystem::Variant::kNonholonomic);
}

Case geodesic_case(int n, std::uint64_t seed) {
  return lplusr_variant(n, seed, LplusRSystem::Variant::kGeodesic);
}

CoupledData coupled_data(int n, std::uint64_t seed) {
  Random rng(seed);
  InertiaOperator inertia = rng.inertia(n);
  const SubspaceBasis whole = rng.rotated_whole(n);
  const double D = rng.uniform(0.5, 1.5);
  // Negative coupling ratios are exercised in dimension three only.
  const double sign = n == 3 && rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
  std::vector<PeripheralSubspace> peripherals;
  if (n == 3) {
    peripherals.push_back({pick(whole, {1}), sign * rng.uniform(0.5, 1.5)});
  } else {
    peripherals.push_back({pick(whole, {1, 2}), rng.uniform(0.5, 1.5)});
    peripherals.push_back({pick(whole, {3}), rng.uniform(0.5, 1.5)});
  }
  return {std::move(inertia), D, pick(whole, {0}), std::move(peripherals)};
}

std::pair<Case, Case> coupled_pair(int n, std::uint64_t seed) {
  const CoupledData data = coupled_data(n, seed);
  Random rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const Rotation g = rng.rotation(n);
  SkewMatrix space = rng.skew(n);
  space -= data.h0.project(space);
  const SkewMatrix omega = adjoint_action(g.inverse(), space);
  SkewMatrix W = data.free_peripheral_subspace().project(rng.skew(n));
  for (const PeripheralSubspace& p : data.peripherals) W -= (1.0 / p.rho) * p.subspace.project(space);

  auto full = std::make_shared<CoupledFullSystem>(data);
  auto reduced = std::make_shared<CoupledReducedSystem>(data);
  return {{full, full->make_state(g, omega, W)}, {reduced, reduced->make_state(g, omega)}};
}

Case coupled_full_case(int n, std::uint64_t seed) { return coupled_pair(n, seed).first; }
Case coupled_reduced_case(int n, std::uint64_t seed) { return coupled_pair(n, seed).second; }

Case ncoupled_case(int n, std::uint64_t seed) {
  Random rng(seed);
  const InertiaOperator inertia = rng.inertia(n);
  const int bodies = n == 3 ? 1 : 2;
  std::vector<SkewMatrix> gammas;
  std::vector<double> rhos;
  std::vector<double> ds;
  for (int i = 0; i < bodies; ++i) {
    gammas.push_back(rng.skew(n));
    rhos.push_back(rng.uniform(0.5, 1.5));
    ds.push_back(rng.uniform(0.5, 1.5));
  }
  auto sys = std::make_shared<NCoupledSystem>(inertia, NCoupledSystem::commutator_bodies(gammas, rhos, ds));
  return {sys, sys->make_state(rng.rotation(n), rng.skew(n))};
}

Case support_case(int n, std::uint64_t seed, bool rubber) {
  Random rng(seed);
  const InertiaOperator inertia = rng.inertia(n);
  const int count = n == 3 ? 1 : 2;
  std::vector<SupportBall> balls;
  for (int i = 0; i < count; ++i) {
    balls.push_back({rng.uniform(0.5, 1.5), rng.uniform(0.6, 1.4), rng.unit(n)});
  }
  auto sys = std::make_shared<SupportSystem>(inertia, balls, rubber);
  return {sys, sys->make_state(rng.rotation(n), rng.skew(n))};
}

Case rubber_chaplygin_case(int n, std::uint64_t seed) {
  Random rng(seed);
  const InertiaOperator inertia = rng.inertia(n);
  auto sys = std::make_shared<RubberChaplyginSystem>(inertia, rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.0));
  const Rotation g = rng.rotation(n);
  const Eigen::VectorXd gamma = g.matrix().transpose() * sys->normal().coords();
  return {sys, sys->make_state(g, wedge(rng.vector(n), gamma))};
}

namespace {

Eigen::VectorXd tangent(Random& rng, const Eigen::VectorXd& gamma) {
  Eigen::VectorXd v = rng.vector(static_cast<int>(gamma.size()));
  return v - v.dot(gamma) * gamma;
}

Eigen::VectorXd legendre(const InertiaOperator& inertia, double contact, const Eigen::VectorXd& gamma,
                         const Eigen::VectorXd& v) {
  return contact * v - inertia.apply(wedge(gamma, v)).matrix() * gamma;
}

}  // namespace

Case cotangent_case(int n, std::uint64_t seed) {
  Random rng(seed);
  const InertiaOperator inertia = rng.inertia(n);
  auto sys = std::make_shared<CotangentSystem>(inertia, rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.0));
  const UnitVector gamma = rng.unit(n);
  const Eigen::VectorXd v = tangent(rng, gamma.coords());
  return {sys, sys->make_state(gamma, legendre(inertia, sys->contact_inertia(), gamma.coords(), v))};
}

Case special_cotangent_case(int n, std::uint64_t seed, Eigen::VectorXd* axes) {
  Random rng(seed);
  const Eigen::VectorXd a = rng.uniform_vector(n, 1.0, 2.0);
  const double mass = 1.0;
  const double radius = std::sqrt(0.5);
  const InertiaOperator inertia = InertiaOperator::special(a, mass * radius * radius);
  auto sys = std::make_shared<CotangentSystem>(inertia, mass, radius);
  const UnitVector gamma = rng.unit(n);
  const Eigen::VectorXd v = tangent(rng, gamma.coords());
  if (axes != nullptr) *axes = a;
  return {sys, sys->make_state(gamma, legendre(inertia, sys->contact_inertia(), gamma.coords(), v))};
}

Case lstar_case(int n, std::uint64_t seed) {
  Random rng(seed);
  auto sys = std::make_shared<LStarSystem>(rng.uniform_vector(n, 1.0, 2.0));
  const UnitVector gamma = rng.unit(n);
  return {sys, sys->make_state(gamma, tangent(rng, gamma.coords()))};
}

Case gsr_case(int n, std::uint64_t seed) {
  Random rng(seed);
  const InertiaOperator inertia = rng.inertia(n);
  auto sys = std::make_shared<GsrSystem>(inertia, rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.0));
  const SkewMatrix gamma = rng.skew(n);
  return {sys, sys->make_state((1.0 / gamma.norm()) * gamma, rng.skew(n))};
}

const std::vector<std::string>& energy_case_names() {
  static const std::vector<std::string> names{
      "lr",      "lplusr",         "geodesic-lpr",     "coupled-reduced", "support",
      "rubber-support", "rubber-chaplygin", "cotangent", "lstar-geodesic", "gsr"};
  return names;
}

Case make_case(const std::string& name, int n, std::uint64_t seed) {
  if (name == "lr") return lr_case(n, seed);
  if (name == "lplusr") return lplusr_case(n, seed);
  if (name == "geodesic-lpr") return geodesic_case(n, seed);
  if (name == "coupled") return coupled_full_case(n, seed);
  if (name == "coupled-reduced") return coupled_reduced_case(n, seed);
  if (name == "ncoupled") return ncoupled_case(n, seed);
  if (name == "support") return support_case(n, seed, false);
  if (name == "rubber-support") return support_case(n, seed, true);
  if (name == "rubber-chaplygin") return rubber_chaplygin_case(n, seed);
  if (name == "cotangent") return cotangent_case(n, seed);
  if (name == "lstar-geodesic") return lstar_case(n, seed);
  if (name == "gsr") return gsr_case(n, seed);
  throw std::invalid_argument("make_case: unknown case " + name);
}

}  // namespace lrflow::testing
