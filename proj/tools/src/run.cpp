#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lrflow_cli/scenario.hpp"

namespace lrflow::cli {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string describe(const IntegrationError& e) {
  std::string cause = e.what();
  const std::string prefix = "step " + std::to_string(e.step_index()) + ": ";
  if (cause.rfind(prefix, 0) == 0) cause.erase(0, prefix.size());
  return "integration failed at step " + std::to_string(e.step_index()) + ": " + cause;
}

namespace {

void write_csv(const Scenario& sc, const Trajectory& traj, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw CliError(kRuntimeError, "cannot write " + file.string());
  const Layout& layout = sc.system->layout();
  out << "t";
  for (const std::string& name : layout.column_names()) out << ',' << name;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    const Eigen::VectorXd row = layout.flatten(traj.states[k]);
    for (Eigen::Index i = 0; i < row.size(); ++i) out << ',' << format_double(row(i));
    out << '\n';
  }
  if (!out) throw CliError(kRuntimeError, "error while writing " + file.string());
}

nlohmann::json to_json(const Scenario& sc, const Trajectory& traj, const ConservationReport& report) {
  nlohmann::json j;
  j["scenario"] = std::filesystem::path(sc.path).filename().string();
  j["system"] = sc.system_name;
  j["n"] = sc.n;
  j["method"] = std::string(method_name(sc.integrator.method));
  j["h"] = sc.integrator.step;
  j["steps"] = sc.integrator.steps;
  j["t_final"] = traj.times.back();
  nlohmann::json q = nlohmann::json::object();
  for (const QuantityDrift& d : report.quantities) {
    q[d.name] = {{"initial", std::vector<double>(d.initial.data(), d.initial.data() + d.initial.size())},
                 {"max_abs_drift", d.max_abs_drift},
                 {"max_rel_drift", d.max_rel_drift},
                 {"max_abs_value", d.max_abs_value}};
  }
  j["quantities"] = q;
  return j;
}

void write_text(const Scenario& sc, const Trajectory& traj, const ConservationReport& report,
                const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw CliError(kRuntimeError, "cannot write " + file.string());
  out << "scenario: " << std::filesystem::path(sc.path).filename().string() << '\n'
      << "system: " << sc.system_name << " (n = " << sc.n << ")\n"
      << "integrator: " << method_name(sc.integrator.method) << ", h = " << format_double(sc.integrator.step)
      << ", steps = " << sc.integrator.steps << ", t_final = " << format_double(traj.times.back()) << "\n\n";
  for (const QuantityDrift& d : report.quantities) {
    out << d.name << ":\n"
        << "  max abs drift: " << format_double(d.max_abs_drift) << '\n'
        << "  max rel drift: " << format_double(d.max_rel_drift) << '\n'
        << "  max abs value: " << format_double(d.max_abs_value) << '\n';
  }
}

}  // namespace

void run_scenario(const Scenario& sc, const std::string& out_dir, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw CliError(kRuntimeError, "cannot create output directory '" + out_dir + "': " + ec.message());

  Trajectory traj;
  try {
    traj = integrate(*sc.system, sc.initial, sc.integrator);
  } catch (const IntegrationError& e) {
    // Keep what was computed so the failure can be inspected.
    if (!e.partial().empty()) write_csv(sc, e.partial(), std::filesystem::path(out_dir) / "trajectory.csv");
    throw CliError(kRuntimeError, describe(e));
  }
  const ConservationReport report = conservation_report(*sc.system, traj, sc.quantities);
  const std::filesystem::path dir(out_dir);
  write_csv(sc, traj, dir / "trajectory.csv");
  write_text(sc, traj, report, dir / "report.txt");
  std::ofstream json(dir / "report.json", std::ios::binary);
  json << to_json(sc, traj, report).dump(2) << '\n';
  if (!json) throw CliError(kRuntimeError, "cannot write report.json");

  log << sc.system_name << ": " << traj.size() << " samples written to " << out_dir << '\n';
  for (const QuantityDrift& d : report.quantities) {
    log << "  " << d.name << " max rel drift " << format_double(d.max_rel_drift) << '\n';
  }
}

}  // namespace lrflow::cli
