#include "lrflow_cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace lrflow::cli {
namespace {

const std::vector<std::string>& known_systems() {
  static const std::vector<std::string> names{
      "lr",      "lplusr",          "geodesic-lpr",     "coupled",   "ncoupled",       "support",
      "rubber-support", "rubber-chaplygin", "cotangent", "lstar-geodesic", "gsr"};
  return names;
}

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) return "";
  return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

[[noreturn]] void parse_fail(const YAML::Node& node, const std::string& what) {
  const std::string at = where(node);
  throw CliError(kParseError, at.empty() ? what : at + ": " + what);
}

[[noreturn]] void invalid(const std::string& what) { throw CliError(kValidationError, what); }

// Wraps a mapping so missing keys report the position of the enclosing map.
class Section {
 public:
  Section(YAML::Node node, std::string name) : node_(std::move(node)), name_(std::move(name)) {
    if (!node_.IsMap()) parse_fail(node_, "'" + name_ + "' must be a mapping");
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node get(const std::string& key) const {
    YAML::Node v = node_[key];
    if (!v) parse_fail(node_, "'" + name_ + "' is missing required key '" + key + "'");
    return v;
  }

  YAML::Node optional(const std::string& key) const { return node_[key]; }
  const YAML::Node& node() const { return node_; }
  const std::string& name() const { return name_; }

  Section sub(const std::string& key) const { return Section(get(key), name_ + "." + key); }

 private:
  YAML::Node node_;
  std::string name_;
};

double as_double(const YAML::Node& node) {
  if (!node.IsScalar()) parse_fail(node, "expected a number");
  return node.as<double>();
}

long as_long(const YAML::Node& node) {
  if (!node.IsScalar()) parse_fail(node, "expected an integer");
  return node.as<long>();
}

std::string as_string(const YAML::Node& node) {
  if (!node.IsScalar()) parse_fail(node, "expected a string");
  return node.as<std::string>();
}

Eigen::VectorXd as_vector(const YAML::Node& node) {
  if (!node.IsSequence()) parse_fail(node, "expected a list of numbers");
  Eigen::VectorXd v(static_cast<int>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v(static_cast<int>(i)) = as_double(node[i]);
  return v;
}

Eigen::VectorXd as_vector(const YAML::Node& node, int size, const std::string& what) {
  Eigen::VectorXd v = as_vector(node);
  if (v.size() != size) {
    invalid(what + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(size));
  }
  return v;
}

Eigen::MatrixXd as_matrix(const YAML::Node& node, int rows, int cols, const std::string& what) {
  if (!node.IsSequence()) parse_fail(node, "expected a list of rows");
  if (static_cast<int>(node.size()) != rows) {
    invalid(what + " has " + std::to_string(node.size()) + " rows, expected " + std::to_string(rows));
  }
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) m.row(i) = as_vector(node[i], cols, what + " row " + std::to_string(i + 1));
  return m;
}

bool is_nested(const YAML::Node& node) { return node.IsSequence() && node.size() > 0 && node[0].IsSequence(); }

// Skew matrices: bivector coordinates in E_12, E_13, ... order, a full
// matrix, or {wedge: [x, y]}.
SkewMatrix as_skew(const YAML::Node& node, int n, const std::string& what) {
  if (node.IsMap()) {
    const Section s(node, what);
    const YAML::Node pair = s.get("wedge");
    if (!pair.IsSequence() || pair.size() != 2) parse_fail(pair, "'wedge' needs two vectors");
    return wedge(as_vector(pair[0], n, what + " wedge factor"), as_vector(pair[1], n, what + " wedge factor"));
  }
  if (is_nested(node)) {
    const Eigen::MatrixXd m = as_matrix(node, n, n, what);
    try {
      return SkewMatrix(m);
    } catch (const InvariantError&) {
      invalid(what + " is not skew-symmetric");
    }
  }
  return SkewMatrix::from_coords(n, as_vector(node, bivector_dim(n), what));
}

Rotation as_rotation(const YAML::Node& node, int n, const std::string& what) {
  if (!node || (node.IsScalar() && node.as<std::string>() == "identity")) return Rotation::identity(n);
  if (node.IsMap()) return Rotation::exp(as_skew(Section(node, what).get("exp"), n, what + ".exp"));
  const Eigen::MatrixXd m = as_matrix(node, n, n, what);
  try {
    return Rotation(m);
  } catch (const InvariantError&) {
    invalid(what + " is not a rotation (orthogonal with determinant 1)");
  }
}

UnitVector as_unit(const YAML::Node& node, int n, const std::string& what) {
  const Eigen::VectorXd v = as_vector(node, n, what);
  try {
    return UnitVector(v);
  } catch (const InvariantError&) {
    invalid(what + " is not a unit vector");
  }
}

// One subspace entry: {generators: [[x, y], ...]}, {wedge-with: G}, or the
// string "wedge-with(g1, g2, ...)".
std::vector<SkewMatrix> subspace_entry(const YAML::Node& node, int n, const std::string& what) {
  if (node.IsScalar()) {
    static const std::regex pattern(R"(\s*wedge-with\s*\((.*)\)\s*)");
    std::smatch match;
    const std::string text = node.as<std::string>();
    if (!std::regex_match(text, match, pattern)) parse_fail(node, "unknown subspace family '" + text + "'");
    std::vector<double> entries;
    std::stringstream list(match[1].str());
    std::string item;
    while (std::getline(list, item, ',')) {
      try {
        std::size_t used = 0;
        entries.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        parse_fail(node, "bad number '" + item + "' in " + text);
      }
    }
    if (static_cast<int>(entries.size()) != n) invalid(what + ": wedge-with needs " + std::to_string(n) + " entries");
    const Eigen::VectorXd gamma = Eigen::Map<Eigen::VectorXd>(entries.data(), n);
    return SubspaceBasis::wedge_with(gamma.normalized()).elements();
  }
  const Section s(node, what);
  if (s.has("wedge-with")) {
    const Eigen::VectorXd gamma = as_vector(s.get("wedge-with"), n, what + ".wedge-with");
    if (gamma.norm() == 0.0) invalid(what + ".wedge-with is the zero vector");
    return SubspaceBasis::wedge_with(gamma.normalized()).elements();
  }
  if (s.has("generators")) {
    const YAML::Node gens = s.get("generators");
    if (!gens.IsSequence()) parse_fail(gens, "'generators' must be a list of vector pairs");
    std::vector<SkewMatrix> out;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (!gens[i].IsSequence() || gens[i].size() != 2) parse_fail(gens[i], "each generator is a pair of vectors");
      out.push_back(wedge(as_vector(gens[i][0], n, what + " generator"), as_vector(gens[i][1], n, what + " generator")));
    }
    return out;
  }
  if (s.has("skew")) return {as_skew(s.get("skew"), n, what + ".skew")};
  parse_fail(node, what + " needs 'generators', 'wedge-with' or 'skew'");
}

// A subspace is a single entry or a list of entries, spanned together.
SubspaceBasis as_subspace(const YAML::Node& node, int n, const std::string& what) {
  std::vector<SkewMatrix> gens;
  if (!node || node.IsNull()) return SubspaceBasis(n);
  if (node.IsSequence()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      for (SkewMatrix& g : subspace_entry(node[i], n, what)) gens.push_back(std::move(g));
    }
  } else {
    gens = subspace_entry(node, n, what);
  }
  return SubspaceBasis::orthonormalize(n, gens);
}

InertiaOperator as_inertia(const YAML::Node& node, int n) {
  if (!node) return InertiaOperator::identity(n);
  const Section s(node, "inertia");
  const std::string kind = as_string(s.get("kind"));
  const int N = bivector_dim(n);
  if (kind == "identity") {
    return InertiaOperator::identity(n, s.has("scale") ? as_double(s.get("scale")) : 1.0);
  }
  if (kind == "diagonal") return InertiaOperator::diagonal(n, as_vector(s.get("values"), N, "inertia.values"));
  if (kind == "mass-tensor") {
    // Rigid body with principal mass moments d: E_ij -> (d_i + d_j) E_ij.
    const Eigen::VectorXd d = as_vector(s.get("values"), n, "inertia.values");
    Eigen::VectorXd diag(N);
    int k = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) diag(k++) = d(i) + d(j);
    }
    return InertiaOperator::diagonal(n, diag);
  }
  if (kind == "dense") return InertiaOperator::dense(n, as_matrix(s.get("matrix"), N, N, "inertia.matrix"));
  if (kind == "special") {
    return InertiaOperator::special(as_vector(s.get("axes"), n, "inertia.axes"),
                                    s.has("shift") ? as_double(s.get("shift")) : 0.0);
  }
  if (kind == "tensor3") {
    if (n != 3) invalid("inertia kind tensor3 needs n = 3");
    const YAML::Node t = s.get("values");
    const Eigen::Matrix3d J = is_nested(t) ? Eigen::Matrix3d(as_matrix(t, 3, 3, "inertia.values"))
                                           : Eigen::Matrix3d(as_vector(t, 3, "inertia.values").asDiagonal());
    return InertiaOperator::from_tensor3(J);
  }
  parse_fail(s.get("kind"), "unknown inertia kind '" + kind + "'");
}

Eigen::MatrixXd right_inertia(const YAML::Node& node, int n) {
  const int N = bivector_dim(n);
  if (!node) return Eigen::MatrixXd::Zero(N, N);
  const Section s(node, "right_inertia");
  if (s.has("matrix")) return as_matrix(s.get("matrix"), N, N, "right_inertia.matrix");
  // eps * sum a_i a_i^T over an orthonormal basis of the given subspace.
  const double eps = as_double(s.get("epsilon"));
  const SubspaceBasis basis = as_subspace(s.get("subspace"), n, "right_inertia.subspace");
  return eps * basis.projector_matrix();
}

void apply_integrator(Scenario& sc, const YAML::Node& node, const Overrides& o) {
  std::optional<double> horizon;
  std::optional<long> steps;
  if (node) {
    const Section s(node, "integrator");
    if (s.has("method")) {
      try {
        sc.integrator.method = parse_method(as_string(s.get("method")));
      } catch (const std::invalid_argument& e) {
        parse_fail(s.get("method"), e.what());
      }
    }
    if (s.has("h")) sc.integrator.step = as_double(s.get("h"));
    if (s.has("steps")) steps = as_long(s.get("steps"));
    if (s.has("T")) horizon = as_double(s.get("T"));
    if (s.has("renormalize_every")) sc.integrator.renormalize_every = static_cast<int>(as_long(s.get("renormalize_every")));
  }
  if (o.method) {
    try {
      sc.integrator.method = parse_method(*o.method);
    } catch (const std::invalid_argument& e) {
      throw CliError(kParseError, std::string("--method: ") + e.what());
    }
  }
  if (o.step) sc.integrator.step = *o.step;
  if (o.steps) steps = *o.steps;
  if (sc.integrator.step <= 0.0 || !std::isfinite(sc.integrator.step)) invalid("integrator step h must be positive");
  if (steps) {
    sc.integrator.steps = *steps;
  } else if (horizon) {
    sc.integrator.steps = std::lround(*horizon / sc.integrator.step);
  } else {
    sc.integrator.steps = 1000;
  }
  if (sc.integrator.steps < 0) invalid("integrator steps must be non-negative");
  if (sc.integrator.renormalize_every < 1) invalid("integrator renormalize_every must be at least 1");
}

std::vector<std::string> as_string_list(const YAML::Node& node) {
  if (!node.IsSequence()) parse_fail(node, "expected a list of names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(as_string(node[i]));
  return out;
}

Eigen::VectorXd legendre(const InertiaOperator& inertia, double contact, const Eigen::VectorXd& gamma,
                         const Eigen::VectorXd& v) {
  return contact * v - inertia.apply(wedge(gamma, v)).matrix() * gamma;
}

// ----- per-system builders ----------------------------------------------------

void build(Scenario& sc, const Section& root) {
  const int n = sc.n;
  const std::string& name = sc.system_name;
  const YAML::Node init_node = root.get("initial");
  const Section init(init_node, "initial");

  if (name == "lr") {
    sc.inertia = as_inertia(root.optional("inertia"), n);
    auto sys = std::make_shared<LRSystem>(*sc.inertia, as_subspace(root.optional("constraints"), n, "constraints"));
    sc.initial = sys->make_state(as_rotation(init.optional("g"), n, "initial.g"), as_skew(init.get("omega"), n, "initial.omega"));
    sc.system = sys;
  } else if (name == "lplusr" || name == "geodesic-lpr") {
    sc.inertia = as_inertia(root.optional("inertia"), n);
    auto sys = std::make_shared<LplusRSystem>(
        *sc.inertia, right_inertia(root.optional("right_inertia"), n),
        name == "lplusr" ? LplusRSystem::Variant::kNonholonomic : LplusRSystem::Variant::kGeodesic);
    sc.initial = sys->make_state(as_rotation(init.optional("g"), n, "initial.g"), as_skew(init.get("omega"), n, "initial.omega"));
    sc.system = sys;
    if (root.has("epsilon_limit")) {
      const Section e = root.sub("epsilon_limit");
      EpsilonSweep sweep;
      const Eigen::VectorXd eps = as_vector(e.get("epsilons"));
      sweep.epsilons.assign(eps.data(), eps.data() + eps.size());
      if (sweep.epsilons.empty()) invalid("epsilon_limit.epsilons is empty");
      for (double v : sweep.epsilons) {
        if (!(v > 0.0)) invalid("epsilon_limit.epsilons must be positive");
      }
      sweep.constraints = as_subspace(e.get("constraints"), n, "epsilon_limit.constraints");
      if (e.has("T")) sweep.horizon = as_double(e.get("T"));
      sc.epsilon_sweep = sweep;
    }
  } else if (name == "coupled") {
    const Section c = root.sub("coupled");
    CoupledData data{as_inertia(root.optional("inertia"), n), as_double(c.get("peripheral_inertia")),
                     as_subspace(c.optional("h0"), n, "coupled.h0"), {}};
    const YAML::Node list = c.get("peripherals");
    if (!list.IsSequence()) parse_fail(list, "'peripherals' must be a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Section p(list[i], "coupled.peripherals[" + std::to_string(i) + "]");
      data.peripherals.push_back({as_subspace(p.get("subspace"), n, p.name() + ".subspace"), as_double(p.get("rho"))});
    }
    data.check();
    sc.inertia = data.inertia;
    sc.coupled = data;
    const Rotation g = as_rotation(init.optional("g"), n, "initial.g");
    const SkewMatrix omega = as_skew(init.get("omega"), n, "initial.omega");
    const bool reduced = root.has("reduced") && root.get("reduced").as<bool>();
    if (reduced) {
      auto sys = std::make_shared<CoupledReducedSystem>(data);
      sc.initial = sys->make_state(g, omega);
      sc.system = sys;
    } else {
      SkewMatrix W = SkewMatrix::zero(n);
      if (init.has("W")) {
        W = as_skew(init.get("W"), n, "initial.W");
      } else {
        const SkewMatrix space = adjoint_action(g, omega);
        for (const PeripheralSubspace& p : data.peripherals) W -= (1.0 / p.rho) * p.subspace.project(space);
      }
      auto sys = std::make_shared<CoupledFullSystem>(data);
      sc.initial = sys->make_state(g, omega, W);
      sc.system = sys;
    }
  } else if (name == "ncoupled") {
    sc.inertia = as_inertia(root.optional("inertia"), n);
    const YAML::Node list = root.get("bodies");
    if (!list.IsSequence()) parse_fail(list, "'bodies' must be a list");
    std::vector<SkewMatrix> gammas;
    std::vector<double> rhos, inertias;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Section b(list[i], "bodies[" + std::to_string(i) + "]");
      gammas.push_back(as_skew(b.get("gamma"), n, b.name() + ".gamma"));
      rhos.push_back(as_double(b.get("rho")));
      inertias.push_back(as_double(b.get("inertia")));
    }
    auto sys = std::make_shared<NCoupledSystem>(*sc.inertia, NCoupledSystem::commutator_bodies(gammas, rhos, inertias));
    sc.initial = sys->make_state(as_rotation(init.optional("g"), n, "initial.g"), as_skew(init.get("omega"), n, "initial.omega"));
    sc.system = sys;
  } else if (name == "support" || name == "rubber-support") {
    sc.inertia = as_inertia(root.optional("inertia"), n);
    const YAML::Node list = root.get("balls");
    if (!list.IsSequence()) parse_fail(list, "'balls' must be a list");
    std::vector<SupportBall> balls;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Section b(list[i], "balls[" + std::to_string(i) + "]");
      balls.push_back({as_double(b.get("inertia")), as_double(b.get("rho")), as_unit(b.get("contact"), n, b.name() + ".contact")});
    }
    auto sys = std::make_shared<SupportSystem>(*sc.inertia, balls, name == "rubber-support");
    sc.initial = sys->make_state(as_rotation(init.optional("g"), n, "initial.g"), as_skew(init.get("omega"), n, "initial.omega"));
    sc.system = sys;
  } else if (name == "rubber-chaplygin") {
    sc.inertia = as_inertia(root.optional("inertia"), n);
    const double m = as_double(root.get("mass")), rho = as_double(root.get("radius"));
    auto sys = root.has("normal")
                   ? std::make_shared<RubberChaplyginSystem>(*sc.inertia, m, rho, as_unit(root.get("normal"), n, "normal"))
                   : std::make_shared<RubberChaplyginSystem>(*sc.inertia, m, rho);
    sc.initial = sys->make_state(as_rotation(init.optional("g"), n, "initial.g"), as_skew(init.get("omega"), n, "initial.omega"));
    sc.system = sys;
  } else if (name == "cotangent") {
    sc.inertia = as_inertia(root.optional("inertia"), n);
    auto sys = std::make_shared<CotangentSystem>(*sc.inertia, as_double(root.get("mass")), as_double(root.get("radius")));
    // The time change and density exponent need I = A ^ A - m rho^2.
    if (sc.inertia->kind() == InertiaOperator::Kind::kSpecial &&
        std::abs(sc.inertia->special_shift() - sys->contact_inertia()) <= 1e-12 * std::max(1.0, sys->contact_inertia())) {
      sc.special_axes = sc.inertia->special_axes();
    }
    const UnitVector gamma = as_unit(init.get("gamma"), n, "initial.gamma");
    Eigen::VectorXd p;
    if (init.has("p")) {
      p = as_vector(init.get("p"), n, "initial.p");
    } else {
      p = legendre(*sc.inertia, sys->contact_inertia(), gamma.coords(), as_vector(init.get("velocity"), n, "initial.velocity"));
    }
    sc.initial = sys->make_state(gamma, p);
    sc.system = sys;
  } else if (name == "lstar-geodesic") {
    const Eigen::VectorXd axes = as_vector(root.get("axes"), n, "axes");
    auto sys = std::make_shared<LStarSystem>(axes, root.has("conformal_exponent") ? as_double(root.get("conformal_exponent")) : 0.0);
    sc.initial = sys->make_state(as_unit(init.get("gamma"), n, "initial.gamma"), as_vector(init.get("velocity"), n, "initial.velocity"));
    sc.system = sys;
  } else if (name == "gsr") {
    sc.inertia = as_inertia(root.optional("inertia"), n);
    auto sys = std::make_shared<GsrSystem>(*sc.inertia, as_double(root.get("mass")), as_double(root.get("radius")));
    sc.initial = sys->make_state(as_skew(init.get("gamma"), n, "initial.gamma"), as_skew(init.get("omega"), n, "initial.omega"));
    sc.system = sys;
  }
}

}  // namespace

Scenario load_scenario(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw CliError(kParseError, "cannot open scenario file '" + path + "'");
  Scenario sc;
  sc.path = path;
  try {
    const YAML::Node doc = YAML::Load(in);
    const Section root(doc, "scenario");
    const YAML::Node system = root.get("system");
    sc.system_name = as_string(system);
    if (std::find(known_systems().begin(), known_systems().end(), sc.system_name) == known_systems().end()) {
      parse_fail(system, "unknown system '" + sc.system_name + "'");
    }
    const long n = as_long(root.get("n"));
    if (n < 2 || n > 64) invalid("n = " + std::to_string(n) + " is out of range");
    if (sc.system_name == "gsr" || sc.system_name == "rubber-chaplygin" || sc.system_name == "cotangent") {
      if (n < 3) invalid(sc.system_name + " needs n >= 3");
    }
    sc.n = static_cast<int>(n);
    apply_integrator(sc, root.optional("integrator"), overrides);
    build(sc, root);

    const std::vector<std::string> known = sc.system->quantity_names();
    sc.quantities = known;
    if (root.has("report")) {
      sc.quantities = as_string_list(root.get("report"));
      for (const std::string& q : sc.quantities) {
        if (std::find(known.begin(), known.end(), q) == known.end()) {
          parse_fail(root.get("report"), "system '" + sc.system_name + "' has no quantity '" + q + "'");
        }
      }
    }
    if (root.has("checks")) {
      const YAML::Node checks = root.get("checks");
      sc.checks = checks.IsNull() ? std::vector<std::string>{} : as_string_list(checks);
    }
  } catch (const CliError&) {
    throw;
  } catch (const YAML::Exception& e) {
    const std::string at = e.mark.is_null()
                               ? std::string()
                               : "line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1) + ": ";
    throw CliError(kParseError, at + e.msg);
  } catch (const ConstraintViolation& e) {
    throw CliError(kValidationError, std::string("initial state rejected: ") + e.what());
  } catch (const std::exception& e) {
    // DimensionError, InvariantError, SingularSystemError from the builders.
    throw CliError(kValidationError, e.what());
  }
  return sc;
}

}  // namespace lrflow::cli
