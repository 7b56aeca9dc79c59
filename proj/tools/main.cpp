#include <iostream>

#include <CLI11.hpp>

#include "glharm/errors.hpp"
#include "glharm/scenarios.hpp"

namespace sc = glharm::scenarios;

int main(int argc, char** argv) {
  CLI::App app{"Run generalized-Lagrange harmonic map scenarios and write a report."};
  std::string config, out = "out";
  std::optional<int> grid;
  std::optional<double> tol;
  bool emit_plots = false;
  int threads = 1;
  app.add_option("--config", config, "scenario YAML file")->required();
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--grid", grid, "nodes per axis for every meshed scenario");
  app.add_option("--tol", tol, "replace every tolerance with this value");
  app.add_flag("--emit-plots", emit_plots, "also write trajectory CSVs for plotting");
  app.add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::Range(1, 1024));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? sc::kPass : sc::kConfigError;
  }

  try {
    const auto configs = sc::load_config(config, sc::Overrides{grid, tol});
    const sc::Report report = sc::run(configs, glharm::Parallelism{threads});
    sc::write_report(report, out, emit_plots);
    std::cout << sc::report_text(report);
    return report.passed() ? sc::kPass : sc::kVerdictFailed;
  } catch (const glharm::ConfigError& e) {
    std::cerr << config << ":" << (e.line() ? std::to_string(*e.line()) + ":" : "") << " error: " << e.what() << "\n";
    return sc::kConfigError;
  } catch (const glharm::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return sc::kNumericalError;
  } catch (const std::invalid_argument& e) {
    std::cerr << config << ": error: " << e.what() << "\n";
    return sc::kConfigError;
  }
}
