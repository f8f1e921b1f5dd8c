#include "relqm/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "relqm/algebra_json.hpp"
#include "relqm/frames.hpp"
#include "relqm/protocols.hpp"
#include "relqm/wigner.hpp"

namespace relqm::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw std::invalid_argument(path + ": " + message);
}

const json& field(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number_at(const json& j, const std::string& path, const char* key) {
  const json& v = field(j, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

std::string string_at(const json& j, const std::string& path,
                      const char* key) {
  const json& v = field(j, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Rational rational_at(const json& j, const std::string& path, const char* key) {
  const json& v = field(j, path, key);
  try {
    return algebra::rational_from_json(v);
  } catch (const std::exception& e) {
    fail(path + "." + key, e.what());
  }
}

std::complex<double> complex_at(const json& j, const std::string& path,
                                const char* key) {
  const json& v = field(j, path, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number())
    fail(path + "." + key, "expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

HamiltonianDecl hamiltonian_at(const json& j, const std::string& path,
                               const char* key) {
  const json& v = field(j, path, key);
  const std::string hpath = path + "." + key;
  HamiltonianDecl decl;
  if (v.is_string()) {
    decl.kind = v.get<std::string>();
  } else if (v.is_object()) {
    decl.kind = string_at(v, hpath, "kind");
    if (decl.kind == "two_body") {
      decl.body_a = string_at(v, hpath, "body_a");
      decl.body_b = string_at(v, hpath, "body_b");
      const json& s = field(v, hpath, "stiffness");
      if (s.is_array()) {
        decl.stiffness_exact = algebra::rational_from_json(s);
        decl.stiffness = decl.stiffness_exact->to_double();
      } else if (s.is_number()) {
        decl.stiffness = s.get<double>();
      } else {
        fail(hpath + ".stiffness", "expected a number or [num, den]");
      }
    }
  } else {
    fail(hpath, "expected a string kind or an object");
  }
  if (decl.kind != "free" && decl.kind != "two_body" &&
      decl.kind != "single_body_effective")
    fail(hpath, "unknown Hamiltonian kind '" + decl.kind + "'");
  return decl;
}

std::string slug(std::string type) {
  std::replace(type.begin(), type.end(), '-', '_');
  return type;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

json check_to_json(const CheckResult& c) {
  return json{{"name", c.name},
              {"pass", c.pass},
              {"value", c.value},
              {"tolerance", c.tolerance}};
}

// The runtime context shared by the action handlers.
struct Runtime {
  const std::map<std::string, algebra::FrameSpec>& frames;
  const std::vector<StateDecl>& states;
  lattice::PhysConstants consts;
  std::size_t grid_n;
  double grid_length;
  std::filesystem::path out_dir;
  std::mt19937_64 rng;

  const algebra::FrameSpec& frame(const std::string& id) const {
    return frames.at(id);
  }

  const StateDecl& state_decl(const std::string& id) const {
    for (const auto& s : states)
      if (s.id == id) return s;
    throw std::invalid_argument("unknown state '" + id + "'");
  }

  lattice::Lattice lattice_for(const algebra::FrameSpec& frame) const {
    return lattice::Lattice(frame.bodies(), grid_n, grid_length);
  }

  lattice::LatticeState build_state(const StateDecl& decl) const {
    const algebra::FrameSpec& f = frame(decl.frame_id);
    std::vector<lattice::ProductComponent> comps;
    for (const auto& body : f.bodies()) {
      const ComponentDecl* found = nullptr;
      for (const auto& c : decl.components)
        if (c.coord == body) found = &c;
      if (!found)
        throw std::invalid_argument("state '" + decl.id +
                                    "' has no component for body '" + body +
                                    "'");
      if (found->is_delta)
        comps.push_back(lattice::DeltaComponent{found->center});
      else
        comps.push_back(lattice::GaussianComponent{found->center, found->width,
                                                   found->momentum});
    }
    return lattice::product_state(lattice_for(f), f, comps, consts);
  }
};

// ---------------------------------------------------------------------------
// action handlers

algebra::FrameSpec exchanged_frame(const algebra::FrameSpec& frame,
                                   const std::string& body) {
  std::vector<std::pair<std::string, Rational>> bodies;
  for (const auto& label : frame.bodies()) {
    if (label == body)
      bodies.emplace_back(frame.observer_id(), frame.observer_mass());
    else
      bodies.emplace_back(label, frame.mass_of(label));
  }
  return algebra::FrameSpec(body, frame.mass_of(body), std::move(bodies),
                            frame.axes());
}

void run_verify_algebra(const VerifyAlgebraAction& a, Runtime& rt,
                        ActionResult& out) {
  const algebra::FrameSpec& frame_s = rt.frame(a.frame_id);
  const algebra::FrameSpec frame_sp = exchanged_frame(frame_s, a.exchange_with);
  const auto report = algebra::verify_covariance(frame_s, frame_sp);
  out.checks.push_back({"declared frame pair covariant", report.all_pass,
                        report.all_pass ? 1.0 : 0.0, 0.0});

  std::size_t passes = 0;
  std::uniform_int_distribution<std::int64_t> v(1, 60);
  for (std::size_t t = 0; t < a.random_triples; ++t) {
    const Rational m_i(v(rt.rng), v(rt.rng));
    const Rational m_s(v(rt.rng), v(rt.rng));
    const Rational m_sp(v(rt.rng), v(rt.rng));
    algebra::FrameSpec s("s", m_s, {{"i", m_i}, {"sp", m_sp}});
    algebra::FrameSpec sp("sp", m_sp, {{"i", m_i}, {"s", m_s}});
    if (algebra::verify_covariance(s, sp).all_pass) ++passes;
  }
  if (a.random_triples > 0)
    out.checks.push_back(
        {"random rational mass triples covariant",
         passes == a.random_triples, static_cast<double>(passes), 0.0});
  out.report["identities"] = algebra::to_json(report)["identities"];
  out.report["random_triples"] = a.random_triples;
}

void run_angular(const AngularMomentumAction& a, Runtime& rt,
                 ActionResult& out) {
  const algebra::FrameSpec& frame = rt.frame(a.frame_id);
  const auto report = algebra::angular_momentum_check(frame, a.body);
  out.checks.push_back({"modified so(3) identities hold", report.all_pass,
                        report.factor.to_double(), 0.0});
  if (a.check_classical_limit) {
    const auto canonical = algebra::angular_momentum_check(
        frame, a.body, algebra::CommutationMatrix::canonical(
                           frame.body_count()));
    out.checks.push_back({"canonical so(3) recovered at zero mass ratio",
                          canonical.all_pass &&
                              canonical.factor == Rational(1),
                          canonical.factor.to_double(), 0.0});
  }
  out.report = algebra::to_json(report);
}

void run_galilean(const GalileanAction& a, Runtime& rt, ActionResult& out) {
  const algebra::FrameSpec& frame = rt.frame(a.frame_id);
  algebra::AlgebraElement h = algebra::free_hamiltonian(frame);
  if (a.hamiltonian.kind == "two_body") {
    if (!a.hamiltonian.stiffness_exact)
      throw std::invalid_argument(
          "galilean-check requires an exact [num, den] stiffness");
    h += algebra::harmonic_interaction(frame, a.hamiltonian.body_a,
                                       a.hamiltonian.body_b,
                                       *a.hamiltonian.stiffness_exact);
  }
  json bodies = json::array();
  for (const auto& [body, expected] : a.expect) {
    const auto check = algebra::galilean_symmetry_check(h, body);
    out.checks.push_back({"[H, p_" + body + "] symmetry as expected",
                          check.symmetric == expected,
                          check.symmetric ? 1.0 : 0.0, 0.0});
    bodies.push_back({{"body", body},
                      {"symmetric", check.symmetric},
                      {"expected", expected}});
  }
  out.report["bodies"] = bodies;
  out.report["hamiltonian"] = a.hamiltonian.kind;
}

void run_transform(const TransformAction& a, Runtime& rt, ActionResult& out) {
  const StateDecl& decl = rt.state_decl(a.state_id);
  const auto psi = rt.build_state(decl);
  frames::FrameMap map(psi.lattice(), psi.frame(), a.new_observer);
  const auto mapped = frames::transform_state(psi, map);

  out.checks.push_back({"norm preserved exactly",
                        std::abs(mapped.norm() - psi.norm()) < 1e-12,
                        std::abs(mapped.norm() - psi.norm()), 1e-12});

  if (a.second_state) {
    const auto phi = rt.build_state(rt.state_decl(*a.second_state));
    const auto check = frames::amplitude_preservation_check(phi, psi, map);
    out.checks.push_back({"transition amplitude preserved",
                          check.abs_difference < 1e-12, check.abs_difference,
                          1e-12});
    out.report["amplitude"] = {
        {"source", {check.source_amplitude.real(),
                    check.source_amplitude.imag()}},
        {"target", {check.target_amplitude.real(),
                    check.target_amplitude.imag()}}};
  }

  // round trip through the inverse permutation is exact
  const auto back = frames::transform_state(mapped, map.inverse());
  double round_trip = 0.0;
  for (std::size_t k = 0; k < psi.amplitudes().size(); ++k)
    round_trip = std::max(round_trip,
                          std::abs(psi.amplitudes()[k] - back.amplitudes()[k]));
  out.checks.push_back(
      {"inverse round trip exact", round_trip == 0.0, round_trip, 0.0});

  if (a.check_localized_translation) {
    const ComponentDecl* delta = nullptr;
    for (const auto& c : decl.components)
      if (c.is_delta) delta = &c;
    if (!delta || decl.components.size() != 2 ||
        delta->coord != a.new_observer)
      throw std::invalid_argument(
          "localized-translation check needs a two-coordinate state with a "
          "delta on the new observer");
    const lattice::Lattice& lat = psi.lattice();
    const std::size_t n = lat.points_per_axis();
    const double c = delta->center;
    const std::size_t kc = lat.nearest_index(c);
    const std::size_t kcp = lat.nearest_index(-c);
    const bool delta_second = decl.components[1].is_delta;
    double max_err = 0.0;
    for (std::size_t a_idx = 0; a_idx < n; ++a_idx) {
      const std::size_t shifted = lat.nearest_index(lat.position(a_idx) + c);
      for (std::size_t b_idx = 0; b_idx < n; ++b_idx) {
        const std::complex<double> got = mapped.amplitudes()[a_idx * n + b_idx];
        std::complex<double> expected{0.0, 0.0};
        if (b_idx == kcp)
          expected = delta_second ? psi.amplitudes()[shifted * n + kc]
                                  : psi.amplitudes()[kc * n + shifted];
        max_err = std::max(max_err, std::abs(got - expected));
      }
    }
    out.checks.push_back({"pure translation by c' = -c (pointwise)",
                          max_err < 1e-12, max_err, 1e-12});
  }

  if (a.dump_state) {
    const auto bin = rt.out_dir / (std::to_string(out.index) + "_state.bin");
    lattice::export_binary(mapped, bin.string());
    out.output_files.push_back(bin.filename().string());
    const auto csv = rt.out_dir / (std::to_string(out.index) + "_state.csv");
    std::ofstream os(csv);
    lattice::export_csv(mapped, os);
    out.output_files.push_back(csv.filename().string());
  }
  out.report["target_frame"] = algebra::to_json(map.target_frame());
}

void run_evolve(const EvolveAction& a, Runtime& rt, ActionResult& out) {
  const StateDecl& decl = rt.state_decl(a.state_id);
  const auto psi = rt.build_state(decl);
  const algebra::FrameSpec& frame = psi.frame();

  dynamics::HamiltonianSpec spec = [&] {
    if (a.hamiltonian.kind == "free")
      return dynamics::HamiltonianSpec::free_n(frame);
    if (a.hamiltonian.kind == "single_body_effective")
      return dynamics::HamiltonianSpec::single_body_effective(frame);
    return dynamics::HamiltonianSpec::two_body(
        frame, dynamics::HarmonicPotential{a.hamiltonian.body_a,
                                           a.hamiltonian.body_b,
                                           a.hamiltonian.stiffness});
  }();

  const auto traj = dynamics::evolve(psi, spec, a.dt, a.steps);
  const double drift = std::abs(traj.final_state.norm() - 1.0);
  out.checks.push_back({"norm drift below 1e-10", drift < 1e-10, drift, 1e-10});

  // energy stays flat along the trajectory
  double e_drift = 0.0;
  for (const auto& rec : traj.records)
    e_drift = std::max(e_drift,
                       std::abs(rec.energy - traj.records.front().energy));
  out.report["energy_drift"] = e_drift;

  if (a.check_ehrenfest) {
    const auto report = dynamics::ehrenfest_track(traj, spec, frame.bodies());
    for (const auto& body : report.bodies) {
      out.checks.push_back({"d<x>/dt = <p>/m for " + body.body,
                            body.max_xdot_residual < a.xdot_tolerance,
                            body.max_xdot_residual, a.xdot_tolerance});
      if (a.hamiltonian.kind != "two_body" ||
          (body.body != a.hamiltonian.body_a &&
           body.body != a.hamiltonian.body_b))
        out.checks.push_back({"d<p>/dt = 0 for " + body.body,
                              body.max_pdot < a.pdot_tolerance, body.max_pdot,
                              a.pdot_tolerance});
    }
    if (report.has_force_check) {
      out.checks.push_back(
          {"force law d<p>/dt = -<dV> (finite-difference oracle)",
           report.max_force_residual < a.force_tolerance,
           report.max_force_residual, a.force_tolerance});
      // reported for comparison, not asserted
      out.report["force_residual_with_1_over_m"] =
          report.max_force_residual_scaled;
    }
  }

  // trajectory series
  const auto csv_path =
      rt.out_dir / (std::to_string(out.index) + "_trajectory.csv");
  std::ofstream os(csv_path);
  os.precision(17);
  os << "t,body,x_mean,p_mean,x_std,p_std,energy\n";
  for (const auto& rec : traj.records)
    for (std::size_t b = 0; b < frame.body_count(); ++b)
      os << rec.t << "," << frame.bodies()[b] << "," << rec.x_mean[b] << ","
         << rec.p_mean[b] << "," << rec.x_std[b] << "," << rec.p_std[b] << ","
         << rec.energy << "\n";
  out.output_files.push_back(csv_path.filename().string());

  if (a.dump_state) {
    const auto bin = rt.out_dir / (std::to_string(out.index) + "_final.bin");
    lattice::export_binary(traj.final_state, bin.string());
    out.output_files.push_back(bin.filename().string());
  }
}

void run_uncertainty(const UncertaintyAction& a, Runtime& rt,
                     ActionResult& out) {
  const auto psi = rt.build_state(rt.state_decl(a.state_id));
  const auto matrix = protocols::uncertainty_matrix(psi);
  out.checks.push_back({"every product respects its bound",
                        matrix.worst_margin > -a.tolerance,
                        matrix.worst_margin, a.tolerance});
  json entries = json::array();
  for (const auto& e : matrix.entries)
    entries.push_back({{"coord", e.coord_i},
                       {"body", e.body_j},
                       {"delta_x", e.delta_x},
                       {"delta_p", e.delta_p},
                       {"product", e.product},
                       {"bound", e.bound},
                       {"margin", e.margin}});
  out.report["entries"] = entries;
}

void run_delta_c(const DeltaCAction& a, Runtime& rt, ActionResult& out) {
  const Rational m_m(1);
  const Rational m_o = m_m / a.mass_ratio;
  algebra::FrameSpec frame("O", m_o, {{"L", m_m}, {"R", m_m}});
  lattice::Lattice lat({"L", "R"}, rt.grid_n, rt.grid_length);

  std::uniform_real_distribution<double> center(-4.0, 4.0);
  std::uniform_real_distribution<double> width(1.5, 2.6);
  std::uniform_real_distribution<double> mom(-0.8, 0.8);

  const double ratio = a.mass_ratio.to_double();
  double worst = 0.0, lo = 0.0, hi = 0.0;
  for (std::size_t t = 0; t < a.random_states; ++t) {
    auto state = lattice::gaussian_product_state(
        lat, frame,
        {{center(rt.rng), width(rt.rng), mom(rt.rng)},
         {center(rt.rng), width(rt.rng), mom(rt.rng)}},
        rt.consts);
    const auto result = protocols::delta_c(state, "L", "R");
    const double measured = result.delta_c.imag() / rt.consts.hbar;
    worst = std::max(worst, std::abs(measured - ratio));
    lo = (t == 0) ? measured : std::min(lo, measured);
    hi = (t == 0) ? measured : std::max(hi, measured);
  }
  out.checks.push_back({"|delta_c|/hbar = m_M/m_O across random states",
                        worst < a.tolerance, worst, a.tolerance});
  out.checks.push_back({"state independence (spread)", hi - lo < a.tolerance,
                        hi - lo, a.tolerance});
  out.report["mass_ratio"] = ratio;
  out.report["random_states"] = a.random_states;

  if (!a.sweep.empty()) {
    protocols::SweepOptions opts;
    opts.n = rt.grid_n;
    opts.length = rt.grid_length;
    opts.hbar = rt.consts.hbar;
    const auto rows = protocols::delta_c_sweep(a.sweep, opts);
    double worst_rel = 0.0;
    const auto csv_path =
        rt.out_dir / (std::to_string(out.index) + "_sweep.csv");
    std::ofstream os(csv_path);
    os.precision(17);
    os << "mass_ratio,abs_delta_c_over_hbar,predicted,relative_error\n";
    for (const auto& row : rows) {
      os << row.mass_ratio << "," << row.measured << "," << row.predicted
         << "," << row.relative_error << "\n";
      worst_rel = std::max(worst_rel, row.relative_error);
    }
    out.output_files.push_back(csv_path.filename().string());
    out.checks.push_back({"sweep linear in the mass ratio",
                          worst_rel < 1e-6, worst_rel, 1e-6});
  }
}

void run_wigner(const WignerAction& a, Runtime& rt, ActionResult& out) {
  (void)rt;
  const auto standard = wigner::standard_qm_assignment(a.alpha, a.beta);
  const auto report = wigner::check_r1_consistency(
      standard.before_f, standard.after_f, standard.before_w,
      standard.after_w);
  const double expected = a.expect_violation
                              ? *a.expect_violation
                              : std::abs(a.alpha - std::norm(a.alpha));
  out.checks.push_back({"standard assignment violation = |alpha - |alpha|^2|",
                        std::abs(report.violation - expected) < 1e-8,
                        report.violation, 1e-8});
  out.report["violation"] = report.violation;
  out.report["amplitude_f"] = {report.amplitude_f.real(),
                               report.amplitude_f.imag()};
  out.report["amplitude_w"] = {report.amplitude_w.real(),
                               report.amplitude_w.imag()};

  if (a.check_classical) {
    const auto classical = wigner::classical_assignment(a.alpha, a.beta);
    const auto creport = wigner::check_r1_consistency(
        classical.before_f, classical.after_f, classical.before_w,
        classical.after_w);
    out.checks.push_back({"classical-observers assignment consistent",
                          creport.consistent, creport.violation, 1e-10});
  }
  if (a.check_toy) {
    const auto toy = wigner::quantum_toy_assignment(
        a.alpha, a.beta, a.alpha, a.beta, {1.0, 0.0}, {0.0, 0.0});
    const auto treport = wigner::check_r1_consistency(
        toy.before_f, toy.after_f, toy.before_w, toy.after_w);
    out.checks.push_back({"constraint-satisfying toy assignment consistent",
                          treport.consistent, treport.violation, 1e-10});
    const double residual = wigner::constraint_residual(
        a.alpha, a.beta, a.alpha, a.beta, {1.0, 0.0}, {0.0, 0.0});
    out.report["toy_constraint_residual"] = residual;
  }
}

void run_reduced_mass(const ReducedMassAction& a, Runtime& rt,
                      ActionResult& out) {
  (void)rt;
  dynamics::SpreadingOptions opts;
  opts.hbar = rt.consts.hbar;
  const auto check =
      dynamics::reduced_mass_spreading_check(a.m_i, a.m_s, a.sigma0,
                                             a.t_total, opts);
  out.checks.push_back({"width growth matches the reduced-mass law",
                        check.max_rel_error < a.tolerance,
                        check.max_rel_error, a.tolerance});
  out.report["reduced_mass"] = check.reduced_mass;

  if (a.check_role_swap) {
    const auto swapped =
        dynamics::reduced_mass_spreading_check(a.m_s, a.m_i, a.sigma0,
                                               a.t_total, opts);
    double max_diff = 0.0;
    for (std::size_t k = 0; k < check.measured.size(); ++k)
      max_diff = std::max(max_diff,
                          std::abs(check.measured[k] - swapped.measured[k]));
    out.checks.push_back({"role swap yields the identical curve",
                          max_diff < 1e-10, max_diff, 1e-10});
  }

  const auto csv_path =
      rt.out_dir / (std::to_string(out.index) + "_spreading.csv");
  std::ofstream os(csv_path);
  os.precision(17);
  os << "t,measured_width,predicted_width\n";
  for (std::size_t k = 0; k < check.times.size(); ++k)
    os << check.times[k] << "," << check.measured[k] << ","
       << check.predicted[k] << "\n";
  out.output_files.push_back(csv_path.filename().string());
}

}  // namespace

// ---------------------------------------------------------------------------
// parsing

Scenario Scenario::parse_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: invalid JSON: ") +
                                e.what());
  }
  return parse(doc);
}

Scenario Scenario::parse(const json& doc) {
  try {
    return parse_impl(doc);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
}

Scenario Scenario::parse_impl(const json& doc) {
  Scenario s;
  if (!doc.is_object()) fail("scenario", "top level must be an object");
  const int version = field(doc, "scenario", "schema_version").get<int>();
  if (version != 1)
    fail("scenario.schema_version", "unsupported version " +
                                        std::to_string(version));
  s.name_ = doc.value("name", "scenario");
  s.description_ = doc.value("description", "");
  if (doc.contains("hbar")) s.hbar_ = number_at(doc, "scenario", "hbar");

  if (doc.contains("lattice")) {
    const json& lat = doc["lattice"];
    if (lat.contains("n"))
      s.grid_n_ = field(lat, "scenario.lattice", "n").get<std::size_t>();
    if (lat.contains("length"))
      s.grid_length_ = number_at(lat, "scenario.lattice", "length");
  }

  if (doc.contains("frames")) {
    std::size_t idx = 0;
    for (const auto& f : doc["frames"]) {
      const std::string path = "scenario.frames[" + std::to_string(idx) + "]";
      std::string id = f.value("id", "");
      try {
        algebra::FrameSpec spec = algebra::frame_from_json(f);
        if (id.empty()) id = spec.observer_id();
        if (s.frames_.count(id)) fail(path, "duplicate frame id '" + id + "'");
        s.frames_.emplace(id, std::move(spec));
      } catch (const std::invalid_argument& e) {
        fail(path, e.what());
      }
      ++idx;
    }
  }

  if (doc.contains("states")) {
    std::size_t idx = 0;
    for (const auto& st : doc["states"]) {
      const std::string path = "scenario.states[" + std::to_string(idx) + "]";
      StateDecl decl;
      decl.id = string_at(st, path, "id");
      decl.frame_id = string_at(st, path, "frame");
      std::size_t cidx = 0;
      for (const auto& c : field(st, path, "components")) {
        const std::string cpath =
            path + ".components[" + std::to_string(cidx) + "]";
        ComponentDecl comp;
        comp.coord = string_at(c, cpath, "coord");
        const std::string kind = c.value("kind", "gaussian");
        if (kind == "delta") {
          comp.is_delta = true;
          comp.center = number_at(c, cpath, "center");
        } else if (kind == "gaussian") {
          comp.center = number_at(c, cpath, "center");
          comp.width = number_at(c, cpath, "width");
          comp.momentum = c.value("momentum", 0.0);
        } else {
          fail(cpath + ".kind", "unknown component kind '" + kind + "'");
        }
        decl.components.push_back(std::move(comp));
        ++cidx;
      }
      s.states_.push_back(std::move(decl));
      ++idx;
    }
  }

  std::size_t idx = 0;
  for (const auto& act : field(doc, "scenario", "actions")) {
    const std::string path = "scenario.actions[" + std::to_string(idx) + "]";
    const std::string type = string_at(act, path, "type");
    if (type == "verify-algebra") {
      VerifyAlgebraAction a;
      a.frame_id = string_at(act, path, "frame");
      a.exchange_with = string_at(act, path, "exchange_with");
      a.random_triples = act.value("random_triples", 0);
      s.actions_.emplace_back(std::move(a));
    } else if (type == "angular-momentum") {
      AngularMomentumAction a;
      a.frame_id = string_at(act, path, "frame");
      a.body = string_at(act, path, "body");
      a.check_classical_limit = act.value("check_classical_limit", true);
      s.actions_.emplace_back(std::move(a));
    } else if (type == "galilean-check") {
      GalileanAction a;
      a.frame_id = string_at(act, path, "frame");
      a.hamiltonian = hamiltonian_at(act, path, "hamiltonian");
      for (const auto& e : field(act, path, "expect")) {
        a.expect.emplace_back(string_at(e, path + ".expect", "body"),
                              field(e, path + ".expect", "symmetric")
                                  .get<bool>());
      }
      s.actions_.emplace_back(std::move(a));
    } else if (type == "transform") {
      TransformAction a;
      a.state_id = string_at(act, path, "state");
      a.new_observer = string_at(act, path, "new_observer");
      if (act.contains("second_state"))
        a.second_state = string_at(act, path, "second_state");
      a.dump_state = act.value("dump_state", false);
      a.check_localized_translation =
          act.value("check_localized_translation", false);
      s.actions_.emplace_back(std::move(a));
    } else if (type == "evolve") {
      EvolveAction a;
      a.state_id = string_at(act, path, "state");
      a.hamiltonian = hamiltonian_at(act, path, "hamiltonian");
      a.dt = number_at(act, path, "dt");
      a.steps = field(act, path, "steps").get<std::size_t>();
      a.check_ehrenfest = act.value("check_ehrenfest", false);
      a.xdot_tolerance = act.value("xdot_tolerance", 1e-6);
      a.pdot_tolerance = act.value("pdot_tolerance", 1e-8);
      a.force_tolerance = act.value("force_tolerance", 1e-5);
      a.dump_state = act.value("dump_state", false);
      s.actions_.emplace_back(std::move(a));
    } else if (type == "uncertainty") {
      UncertaintyAction a;
      a.state_id = string_at(act, path, "state");
      a.tolerance = act.value("tolerance", 1e-8);
      s.actions_.emplace_back(std::move(a));
    } else if (type == "delta-c") {
      DeltaCAction a;
      a.mass_ratio = rational_at(act, path, "mass_ratio");
      a.random_states = act.value("random_states", 10);
      if (act.contains("sweep"))
        for (const auto& r : act["sweep"])
          a.sweep.push_back(algebra::rational_from_json(r));
      a.tolerance = act.value("tolerance", 1e-8);
      s.actions_.emplace_back(std::move(a));
    } else if (type == "wigner") {
      WignerAction a;
      a.alpha = complex_at(act, path, "alpha");
      a.beta = complex_at(act, path, "beta");
      if (act.contains("expect_violation"))
        a.expect_violation = number_at(act, path, "expect_violation");
      a.check_classical = act.value("check_classical", true);
      a.check_toy = act.value("check_toy", true);
      s.actions_.emplace_back(std::move(a));
    } else if (type == "reduced-mass") {
      ReducedMassAction a;
      a.m_i = rational_at(act, path, "m_i");
      a.m_s = rational_at(act, path, "m_s");
      a.sigma0 = act.value("sigma0", 2.0);
      a.t_total = act.value("t_total", 4.0);
      a.tolerance = act.value("tolerance", 1e-6);
      a.check_role_swap = act.value("check_role_swap", true);
      s.actions_.emplace_back(std::move(a));
    } else {
      fail(path + ".type", "unknown action type '" + type + "'");
    }
    ++idx;
  }
  if (s.actions_.empty()) fail("scenario.actions", "at least one action");

  s.validate();
  return s;
}

void Scenario::validate() const {
  auto require_frame = [&](const std::string& id, const std::string& path) {
    if (!frames_.count(id)) fail(path, "unknown frame '" + id + "'");
  };
  auto require_state = [&](const std::string& id, const std::string& path) {
    for (const auto& st : states_)
      if (st.id == id) return;
    fail(path, "unknown state '" + id + "'");
  };

  for (std::size_t k = 0; k < states_.size(); ++k) {
    const auto& st = states_[k];
    const std::string path = "scenario.states[" + std::to_string(k) + "]";
    require_frame(st.frame_id, path + ".frame");
    const auto& frame = frames_.at(st.frame_id);
    if (frame.axes() != 1)
      fail(path, "lattice states need a single-axis frame");
    for (const auto& c : st.components)
      if (!frame.has_body(c.coord))
        fail(path, "component coordinate '" + c.coord +
                       "' is not a body of frame '" + st.frame_id + "'");
    if (st.components.size() != frame.body_count())
      fail(path, "state needs one component per frame body");
  }

  for (std::size_t k = 0; k < actions_.size(); ++k) {
    const std::string path = "scenario.actions[" + std::to_string(k) + "]";
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, VerifyAlgebraAction>) {
            require_frame(a.frame_id, path + ".frame");
            const auto& f = frames_.at(a.frame_id);
            if (!f.has_body(a.exchange_with))
              fail(path + ".exchange_with",
                   "body '" + a.exchange_with + "' not in frame '" +
                       a.frame_id + "'");
          } else if constexpr (std::is_same_v<T, AngularMomentumAction>) {
            require_frame(a.frame_id, path + ".frame");
            const auto& f = frames_.at(a.frame_id);
            if (f.axes() != 3)
              fail(path + ".frame", "angular momentum needs a 3-axis frame");
            if (!f.has_body(a.body))
              fail(path + ".body",
                   "body '" + a.body + "' not in frame '" + a.frame_id + "'");
          } else if constexpr (std::is_same_v<T, GalileanAction>) {
            require_frame(a.frame_id, path + ".frame");
            const auto& f = frames_.at(a.frame_id);
            for (const auto& [body, expected] : a.expect)
              if (!f.has_body(body))
                fail(path + ".expect",
                     "body '" + body + "' not in frame '" + a.frame_id + "'");
            if (a.hamiltonian.kind == "two_body") {
              if (!f.has_body(a.hamiltonian.body_a) ||
                  !f.has_body(a.hamiltonian.body_b))
                fail(path + ".hamiltonian",
                     "interacting bodies must belong to the frame");
              if (!a.hamiltonian.stiffness_exact)
                fail(path + ".hamiltonian.stiffness",
                     "galilean-check needs an exact [num, den] stiffness");
            }
          } else if constexpr (std::is_same_v<T, TransformAction>) {
            require_state(a.state_id, path + ".state");
            if (a.second_state) require_state(*a.second_state, path);
            for (const auto& st : states_)
              if (st.id == a.state_id &&
                  !frames_.at(st.frame_id).has_body(a.new_observer))
                fail(path + ".new_observer",
                     "body '" + a.new_observer + "' not in the state frame");
          } else if constexpr (std::is_same_v<T, EvolveAction>) {
            require_state(a.state_id, path + ".state");
            if (a.hamiltonian.kind == "two_body")
              for (const auto& st : states_)
                if (st.id == a.state_id) {
                  const auto& f = frames_.at(st.frame_id);
                  if (!f.has_body(a.hamiltonian.body_a) ||
                      !f.has_body(a.hamiltonian.body_b))
                    fail(path + ".hamiltonian",
                         "interacting bodies must belong to the frame");
                }
          } else if constexpr (std::is_same_v<T, UncertaintyAction>) {
            require_state(a.state_id, path + ".state");
          }
        },
        actions_[k]);
  }
}

// ---------------------------------------------------------------------------
// running

RunResult Scenario::run(const std::filesystem::path& out_dir,
                        const RunOptions& opts) const {
  std::filesystem::create_directories(out_dir);

  Runtime rt{frames_,
             states_,
             lattice::PhysConstants{opts.hbar.value_or(hbar_)},
             opts.grid_n.value_or(grid_n_),
             opts.grid_length.value_or(grid_length_),
             out_dir,
             std::mt19937_64(opts.seed)};

  RunResult result;
  result.name = name_;
  result.pass = true;

  for (std::size_t k = 0; k < actions_.size(); ++k) {
    ActionResult ar;
    ar.index = k;
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, VerifyAlgebraAction>) {
            ar.type = "verify-algebra";
            run_verify_algebra(a, rt, ar);
          } else if constexpr (std::is_same_v<T, AngularMomentumAction>) {
            ar.type = "angular-momentum";
            run_angular(a, rt, ar);
          } else if constexpr (std::is_same_v<T, GalileanAction>) {
            ar.type = "galilean-check";
            run_galilean(a, rt, ar);
          } else if constexpr (std::is_same_v<T, TransformAction>) {
            ar.type = "transform";
            run_transform(a, rt, ar);
          } else if constexpr (std::is_same_v<T, EvolveAction>) {
            ar.type = "evolve";
            run_evolve(a, rt, ar);
          } else if constexpr (std::is_same_v<T, UncertaintyAction>) {
            ar.type = "uncertainty";
            run_uncertainty(a, rt, ar);
          } else if constexpr (std::is_same_v<T, DeltaCAction>) {
            ar.type = "delta-c";
            run_delta_c(a, rt, ar);
          } else if constexpr (std::is_same_v<T, WignerAction>) {
            ar.type = "wigner";
            run_wigner(a, rt, ar);
          } else if constexpr (std::is_same_v<T, ReducedMassAction>) {
            ar.type = "reduced-mass";
            run_reduced_mass(a, rt, ar);
          }
        },
        actions_[k]);

    ar.pass = true;
    for (const auto& c : ar.checks) ar.pass = ar.pass && c.pass;
    result.pass = result.pass && ar.pass;

    json report;
    report["action"] = ar.type;
    report["index"] = ar.index;
    report["pass"] = ar.pass;
    json checks = json::array();
    for (const auto& c : ar.checks) checks.push_back(check_to_json(c));
    report["checks"] = checks;
    report["details"] = ar.report;
    report["outputs"] = ar.output_files;

    const auto path =
        out_dir / (std::to_string(k) + "_" + slug(ar.type) + ".json");
    write_text(path, report.dump(2) + "\n");
    ar.output_files.push_back(path.filename().string());
    result.actions.push_back(std::move(ar));
  }

  json summary;
  summary["scenario"] = name_;
  summary["description"] = description_;
  summary["schema_version"] = 1;
  summary["seed"] = opts.seed;
  summary["hbar"] = rt.consts.hbar;
  summary["lattice"] = {{"n", rt.grid_n}, {"length", rt.grid_length}};
  summary["pass"] = result.pass;
  json actions = json::array();
  for (const auto& ar : result.actions) {
    json a;
    a["index"] = ar.index;
    a["type"] = ar.type;
    a["pass"] = ar.pass;
    json checks = json::array();
    for (const auto& c : ar.checks) checks.push_back(check_to_json(c));
    a["checks"] = checks;
    actions.push_back(a);
  }
  summary["actions"] = actions;
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");

  // wall-clock metadata lives outside the deterministic reports
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  json meta;
  meta["generated_at"] = buf;
  write_text(out_dir / "run_meta.json", meta.dump(2) + "\n");

  return result;
}

// ---------------------------------------------------------------------------
// bundled scenarios

const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> registry = [] {
    std::vector<BundledScenario> out;
    for (const auto& [name, text] : detail::bundled_table()) {
      BundledScenario b;
      b.name = name;
      b.text = text;
      try {
        const json doc = json::parse(b.text);
        b.description = doc.value("description", "");
      } catch (...) {
        b.description = "";
      }
      out.push_back(std::move(b));
    }
    std::sort(out.begin(), out.end(),
              [](const BundledScenario& a, const BundledScenario& b) {
                return a.name < b.name;
              });
    return out;
  }();
  return registry;
}

std::string load_scenario_text(const std::string& ref) {
  if (std::filesystem::exists(ref)) {
    std::ifstream is(ref);
    if (!is) throw std::runtime_error("cannot read " + ref);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }
  std::string name = ref;
  if (name.size() > 5 && name.ends_with(".json"))
    name = name.substr(0, name.size() - 5);
  for (const auto& b : bundled_scenarios())
    if (b.name == name) return b.text;
  throw std::runtime_error("no scenario file or bundled scenario named '" +
                           ref + "'");
}

}  // namespace relqm::scenario
