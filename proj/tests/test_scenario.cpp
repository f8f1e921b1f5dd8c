#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "relqm/scenario.hpp"

using namespace relqm::scenario;

namespace {

std::string minimal_scenario(const std::string& actions) {
  return R"({
    "schema_version": 1,
    "name": "test",
    "frames": [
      {"id": "s", "observer": "s", "observer_mass": [2, 1],
       "bodies": [{"id": "i", "mass": [1, 1]}, {"id": "sp", "mass": [3, 1]}]}
    ],
    "states": [
      {"id": "psi", "frame": "s", "components": [
        {"coord": "i", "kind": "gaussian", "center": 0.0, "width": 2.0},
        {"coord": "sp", "kind": "gaussian", "center": 1.0, "width": 2.0}
      ]}
    ],
    "actions": [)" +
         actions + R"(]
  })";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
  return std::filesystem::temp_directory_path() / ("relqm_test_" + tag);
}

}  // namespace

TEST_CASE("scenario parses and runs a transform action") {
  auto s = Scenario::parse_text(minimal_scenario(
      R"({"type": "transform", "state": "psi", "new_observer": "sp"})"));
  const auto out = temp_dir("transform");
  auto result = s.run(out);
  CHECK(result.pass);
  CHECK(result.actions.size() == 1);
  CHECK(std::filesystem::exists(out / "summary.json"));
  CHECK(std::filesystem::exists(out / "0_transform.json"));
  std::filesystem::remove_all(out);
}

TEST_CASE("undeclared references are rejected with a field path") {
  CHECK_THROWS_WITH_AS(
      Scenario::parse_text(minimal_scenario(
          R"({"type": "transform", "state": "ghost", "new_observer": "sp"})")),
      doctest::Contains("actions[0].state"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Scenario::parse_text(minimal_scenario(
          R"({"type": "transform", "state": "psi", "new_observer": "nope"})")),
      doctest::Contains("new_observer"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Scenario::parse_text(minimal_scenario(
          R"({"type": "verify-algebra", "frame": "missing",
             "exchange_with": "sp"})")),
      doctest::Contains("actions[0].frame"), std::invalid_argument);
}

TEST_CASE("schema violations carry their location") {
  CHECK_THROWS_WITH_AS(Scenario::parse_text("{\"schema_version\": 2}"),
                       doctest::Contains("schema_version"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(Scenario::parse_text("not json"),
                       doctest::Contains("invalid JSON"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Scenario::parse_text(minimal_scenario(
          R"({"type": "no-such-action"})")),
      doctest::Contains("actions[0].type"), std::invalid_argument);
}

TEST_CASE("identical scenario and seed give byte-identical reports") {
  auto s = Scenario::parse_text(minimal_scenario(
      R"({"type": "delta-c", "mass_ratio": [1, 10000], "random_states": 3},
         {"type": "wigner", "alpha": [0.6, 0.0], "beta": [0.8, 0.0]})"));
  const auto out1 = temp_dir("det1");
  const auto out2 = temp_dir("det2");
  RunOptions opts;
  opts.seed = 42;
  s.run(out1, opts);
  s.run(out2, opts);
  CHECK(read_file(out1 / "summary.json") == read_file(out2 / "summary.json"));
  CHECK(read_file(out1 / "0_delta_c.json") ==
        read_file(out2 / "0_delta_c.json"));
  // the timestamp lives outside the deterministic reports
  CHECK(std::filesystem::exists(out1 / "run_meta.json"));
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
}

TEST_CASE("bundled scenarios: present, unique, described") {
  const auto& bundled = bundled_scenarios();
  CHECK(bundled.size() >= 5);
  std::set<std::string> names;
  for (const auto& b : bundled) {
    CHECK(names.insert(b.name).second);
    CHECK_FALSE(b.description.empty());
  }
  for (const char* required :
       {"covariance", "wigner", "ligo", "reduced-mass", "ehrenfest"})
    CHECK(names.count(required) == 1);
  // stable ordering
  for (std::size_t k = 1; k < bundled.size(); ++k)
    CHECK(bundled[k - 1].name < bundled[k].name);
}

TEST_CASE("bundled scenario text resolves by name with or without suffix") {
  CHECK(load_scenario_text("covariance") ==
        load_scenario_text("covariance.json"));
  CHECK_THROWS_AS(load_scenario_text("no-such-scenario"),
                  std::runtime_error);
}

TEST_CASE("wigner scenario action checks the violation value") {
  auto s = Scenario::parse_text(minimal_scenario(
      R"({"type": "wigner", "alpha": [0.7071067811865476, 0.0],
          "beta": [0.7071067811865476, 0.0],
          "expect_violation": 0.2071067811865476})"));
  const auto out = temp_dir("wigner");
  auto result = s.run(out);
  CHECK(result.pass);
  std::filesystem::remove_all(out);
}

TEST_CASE("galilean scenario rejects a floating-point stiffness") {
  CHECK_THROWS_WITH_AS(
      Scenario::parse_text(minimal_scenario(
          R"({"type": "galilean-check", "frame": "s",
             "hamiltonian": {"kind": "two_body", "body_a": "i",
                             "body_b": "sp", "stiffness": 0.1},
             "expect": [{"body": "i", "symmetric": false}]})")),
      doctest::Contains("stiffness"), std::invalid_argument);
}
