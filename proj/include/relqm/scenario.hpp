#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "relqm/algebra.hpp"
#include "relqm/dynamics.hpp"
#include "relqm/lattice.hpp"

namespace relqm::scenario {

struct RunOptions {
  std::uint64_t seed = 1;
  std::optional<double> hbar;
  std::optional<std::size_t> grid_n;
  std::optional<double> grid_length;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct ActionResult {
  std::size_t index = 0;
  std::string type;
  bool pass = false;
  std::vector<CheckResult> checks;
  nlohmann::json report;
  std::vector<std::string> output_files;
};

struct RunResult {
  std::string name;
  bool pass = false;
  std::vector<ActionResult> actions;
};

// ---------------------------------------------------------------------------
// parsed declarations

struct ComponentDecl {
  std::string coord;
  bool is_delta = false;
  double center = 0.0;
  double width = 1.0;
  double momentum = 0.0;
};

struct StateDecl {
  std::string id;
  std::string frame_id;
  std::vector<ComponentDecl> components;
};

struct HamiltonianDecl {
  std::string kind;  // "free" | "two_body" | "single_body_effective"
  std::string body_a;
  std::string body_b;
  double stiffness = 0.0;
  // exact form, required by the symbolic galilean-check action
  std::optional<Rational> stiffness_exact;
};

struct VerifyAlgebraAction {
  std::string frame_id;
  std::string exchange_with;
  std::size_t random_triples = 0;
};

struct AngularMomentumAction {
  std::string frame_id;
  std::string body;
  bool check_classical_limit = true;
};

struct GalileanAction {
  std::string frame_id;
  HamiltonianDecl hamiltonian;
  std::vector<std::pair<std::string, bool>> expect;  // body -> symmetric?
};

struct TransformAction {
  std::string state_id;
  std::string new_observer;
  std::optional<std::string> second_state;
  bool dump_state = false;
  bool check_localized_translation = false;
};

struct EvolveAction {
  std::string state_id;
  HamiltonianDecl hamiltonian;
  double dt = 0.0;
  std::size_t steps = 0;
  bool check_ehrenfest = false;
  double xdot_tolerance = 1e-6;
  double pdot_tolerance = 1e-8;
  double force_tolerance = 1e-5;
  bool dump_state = false;
};

struct UncertaintyAction {
  std::string state_id;
  double tolerance = 1e-8;
};

struct DeltaCAction {
  Rational mass_ratio{1, 10000};
  std::size_t random_states = 10;
  std::vector<Rational> sweep;
  double tolerance = 1e-8;
};

struct WignerAction {
  std::complex<double> alpha;
  std::complex<double> beta;
  std::optional<double> expect_violation;
  bool check_classical = true;
  bool check_toy = true;
};

struct ReducedMassAction {
  Rational m_i{1};
  Rational m_s{1};
  double sigma0 = 2.0;
  double t_total = 4.0;
  double tolerance = 1e-6;
  bool check_role_swap = true;
};

using Action =
    std::variant<VerifyAlgebraAction, AngularMomentumAction, GalileanAction,
                 TransformAction, EvolveAction, UncertaintyAction,
                 DeltaCAction, WignerAction, ReducedMassAction>;

/// Declarative description of one run: frames, shared lattice geometry,
/// initial states, and an ordered action list. Everything is validated
/// before any action executes; errors carry the offending field path.
class Scenario {
 public:
  static Scenario parse_text(const std::string& text);
  static Scenario parse(const nlohmann::json& doc);

  RunResult run(const std::filesystem::path& out_dir,
                const RunOptions& opts = {}) const;

  const std::string& name() const { return name_; }
  const std::string& description() const { return description_; }

 private:
  Scenario() = default;
  static Scenario parse_impl(const nlohmann::json& doc);
  void validate() const;

  std::string name_ = "scenario";
  std::string description_;
  double hbar_ = 1.0;
  std::size_t grid_n_ = 128;
  double grid_length_ = 40.0;
  std::map<std::string, algebra::FrameSpec> frames_;
  std::vector<StateDecl> states_;
  std::vector<Action> actions_;
};

struct BundledScenario {
  std::string name;
  std::string description;
  std::string text;
};

/// Built-in scenario files, sorted by name.
const std::vector<BundledScenario>& bundled_scenarios();

/// Resolves `ref` as a filesystem path first, then as a bundled scenario
/// name (with or without the .json suffix).
std::string load_scenario_text(const std::string& ref);

}  // namespace relqm::scenario

namespace relqm::scenario::detail {
// implemented by the generated bundled-scenario table
const std::vector<std::pair<const char*, const char*>>& bundled_table();
}  // namespace relqm::scenario::detail
