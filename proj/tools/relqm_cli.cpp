#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "relqm/scenario.hpp"

namespace {

int run_command(const std::string& ref, const std::string& out_dir,
                const relqm::scenario::RunOptions& opts) {
  using relqm::scenario::Scenario;
  Scenario scenario = [&] {
    const std::string text = relqm::scenario::load_scenario_text(ref);
    return Scenario::parse_text(text);
  }();

  const auto result = scenario.run(out_dir, opts);
  for (const auto& action : result.actions) {
    std::cout << (action.pass ? "[PASS] " : "[FAIL] ") << "action "
              << action.index << " (" << action.type << ", "
              << action.checks.size() << " checks)\n";
    for (const auto& check : action.checks)
      if (!check.pass)
        std::cout << "       failed: " << check.name
                  << " (value " << check.value << ", tolerance "
                  << check.tolerance << ")\n";
  }
  std::cout << (result.pass ? "PASS" : "FAIL") << ": scenario '" << result.name
            << "', reports in " << out_dir << "\n";
  return result.pass ? 0 : 1;
}

int list_command() {
  const auto& bundled = relqm::scenario::bundled_scenarios();
  for (const auto& b : bundled)
    std::cout << b.name << "\n    " << b.description << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "relqm - quantum mechanics relative to finite-mass observers:\n"
      "symbolic verification of the modified operator algebra and a spectral\n"
      "lattice backend for states, frame changes, dynamics and measurement\n"
      "protocols"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::string out_dir = "relqm-out";
  std::uint64_t seed = 1;
  double hbar = 0.0;
  std::size_t grid_n = 0;
  double grid_length = 0.0;

  auto* run = app.add_subcommand(
      "run", "Run a scenario file (or bundled scenario name)");
  run->add_option("scenario", scenario_ref,
                  "Path to a scenario JSON file or a bundled name")
      ->required();
  run->add_option("--out", out_dir, "Report output directory");
  run->add_option("--seed", seed, "Seed for randomized property checks");
  run->add_option("--hbar", hbar, "Override the scenario's hbar");
  run->add_option("--grid-n", grid_n, "Override lattice points per axis");
  run->add_option("--grid-L", grid_length, "Override lattice box length");

  auto* list =
      app.add_subcommand("list", "List bundled scenarios with descriptions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) return list_command();
    relqm::scenario::RunOptions opts;
    opts.seed = seed;
    if (hbar > 0.0) opts.hbar = hbar;
    if (grid_n > 0) opts.grid_n = grid_n;
    if (grid_length > 0.0) opts.grid_length = grid_length;
    return run_command(scenario_ref, out_dir, opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
