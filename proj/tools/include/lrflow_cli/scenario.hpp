#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <lrflow/lrflow.hpp>

namespace lrflow::cli {

enum ExitCode : int {
  kOk = 0,
  kChecksFailed = 1,
  kParseError = 2,
  kValidationError = 3,
  kRuntimeError = 4,
};

/// Any failure the command line reports; `code` is the process exit status.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

/// Command line values that replace the integrator section of the file.
struct Overrides {
  std::optional<double> step;
  std::optional<long> steps;
  std::optional<std::string> method;
};

struct EpsilonSweep {
  std::vector<double> epsilons;
  SubspaceBasis constraints{3};
  double horizon = 1.0;
};

/// A parsed and validated scenario, ready to integrate.
struct Scenario {
  std::string path;
  std::string system_name;
  int n = 0;
  std::shared_ptr<const System> system;
  PhasePoint initial;
  IntegratorConfig integrator;
  /// Quantities written to the report (defaults to everything the system tracks).
  std::vector<std::string> quantities;
  /// Checks requested for verify; unset means every applicable one.
  std::optional<std::vector<std::string>> checks;

  // What verify needs beyond the system itself.
  std::optional<InertiaOperator> inertia;
  std::optional<CoupledData> coupled;
  std::optional<Eigen::VectorXd> special_axes;
  std::optional<EpsilonSweep> epsilon_sweep;

  double horizon() const { return integrator.step * static_cast<double>(integrator.steps); }
};

/// Throws CliError with kParseError (with line and column) for malformed
/// files and unknown names, kValidationError for inconsistent data.
Scenario load_scenario(const std::string& path, const Overrides& overrides = {});

/// Integrates and writes trajectory.csv, report.txt and report.json to out_dir.
void run_scenario(const Scenario& scenario, const std::string& out_dir, std::ostream& log);

/// Runs the applicable diagnostic battery; returns true iff every check passed.
bool verify_scenario(const Scenario& scenario, std::ostream& out);

/// "integration failed at step k: <cause>" for a runtime failure.
std::string describe(const IntegrationError& e);

/// Formats a double with 17 significant digits, independent of the locale.
std::string format_double(double value);

/// Full command line entry point; returns the exit status.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lrflow::cli
