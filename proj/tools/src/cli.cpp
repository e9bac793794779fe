#include <ostream>

#include <CLI11.hpp>

#include "lrflow_cli/scenario.hpp"

namespace lrflow::cli {

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and verify nonholonomic rigid-body flows on SO(n)"};
  app.require_subcommand(1);
  // -h would shadow the --h step option.
  app.set_help_flag("--help", "Print this help message and exit");

  Overrides overrides;
  std::string scenario_path;
  std::string out_dir;
  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "Scenario file (YAML)")->required();
    cmd->add_option("--h", overrides.step, "Step size");
    cmd->add_option("--steps", overrides.steps, "Number of steps");
    cmd->add_option("--method", overrides.method, "rk4-projected or lie-rk4");
  };
  CLI::App* run = app.add_subcommand("run", "Integrate a scenario and write CSV and reports");
  add_overrides(run);
  run->add_option("--out", out_dir, "Output directory")->required();
  CLI::App* verify = app.add_subcommand("verify", "Run the diagnostic checks that apply to a scenario");
  add_overrides(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  try {
    const Scenario sc = load_scenario(scenario_path, overrides);
    if (run->parsed()) {
      run_scenario(sc, out_dir, out);
      return kOk;
    }
    return verify_scenario(sc, out) ? kOk : kChecksFailed;
  } catch (const CliError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace lrflow::cli
