#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "relqm/algebra.hpp"
#include "relqm/algebra_json.hpp"
#include "relqm/dynamics.hpp"
#include "relqm/frames.hpp"
#include "relqm/lattice.hpp"
#include "relqm/protocols.hpp"
#include "relqm/scenario.hpp"
#include "relqm/wigner.hpp"

namespace py = pybind11;
using namespace relqm;

namespace {

algebra::FrameSpec make_frame(
    const std::string& observer,
    std::pair<std::int64_t, std::int64_t> observer_mass,
    const std::vector<std::pair<std::string,
                                std::pair<std::int64_t, std::int64_t>>>& bodies,
    int axes) {
  std::vector<std::pair<std::string, Rational>> entries;
  for (const auto& [label, mass] : bodies)
    entries.emplace_back(label, Rational(mass.first, mass.second));
  return algebra::FrameSpec(
      observer, Rational(observer_mass.first, observer_mass.second),
      std::move(entries), axes);
}

py::array_t<std::complex<double>> state_array(
    const lattice::LatticeState& state) {
  const std::size_t d = state.lattice().dim();
  const std::size_t n = state.lattice().points_per_axis();
  std::vector<py::ssize_t> shape(d, static_cast<py::ssize_t>(n));
  py::array_t<std::complex<double>> out(shape);
  std::copy(state.amplitudes().begin(), state.amplitudes().end(),
            out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Quantum mechanics relative to finite-mass observers: exact operator "
      "algebra, spectral lattice states, observer transformations, dynamics "
      "and measurement protocols.";

  // ---------------------------------------------------------------- algebra
  py::class_<Rational>(m, "Rational")
      .def(py::init<std::int64_t, std::int64_t>(), py::arg("num"),
           py::arg("den") = 1)
      .def_property_readonly("num", &Rational::num)
      .def_property_readonly("den", &Rational::den)
      .def("__float__", &Rational::to_double)
      .def("__repr__",
           [](const Rational& r) { return "Rational(" + r.to_string() + ")"; })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self / py::self)
      .def(py::self == py::self);

  py::class_<algebra::FrameSpec>(m, "FrameSpec")
      .def(py::init(&make_frame), py::arg("observer"),
           py::arg("observer_mass"), py::arg("bodies"), py::arg("axes") = 1)
      .def_property_readonly("observer_id", &algebra::FrameSpec::observer_id)
      .def_property_readonly("observer_mass",
                             &algebra::FrameSpec::observer_mass)
      .def_property_readonly("bodies", &algebra::FrameSpec::bodies)
      .def_property_readonly("axes", &algebra::FrameSpec::axes)
      .def("mass_of", &algebra::FrameSpec::mass_of)
      .def("__eq__", [](const algebra::FrameSpec& a,
                        const algebra::FrameSpec& b) { return a == b; })
      .def("__repr__", [](const algebra::FrameSpec& f) {
        return "FrameSpec(" + algebra::to_json(f).dump() + ")";
      });

  py::class_<algebra::AlgebraElement>(m, "AlgebraElement")
      .def_static("position", &algebra::AlgebraElement::position,
                  py::arg("frame"), py::arg("body"), py::arg("axis") = 0)
      .def_static("momentum", &algebra::AlgebraElement::momentum,
                  py::arg("frame"), py::arg("body"), py::arg("axis") = 0)
      .def_property_readonly("is_zero", &algebra::AlgebraElement::is_zero)
      .def("__add__", [](const algebra::AlgebraElement& a,
                         const algebra::AlgebraElement& b) { return a + b; })
      .def("__sub__", [](const algebra::AlgebraElement& a,
                         const algebra::AlgebraElement& b) { return a - b; })
      .def("__mul__", [](const algebra::AlgebraElement& a,
                         const algebra::AlgebraElement& b) { return a * b; })
      .def("__eq__", [](const algebra::AlgebraElement& a,
                        const algebra::AlgebraElement& b) { return a == b; })
      .def("__repr__", &algebra::AlgebraElement::to_string)
      .def("to_json", [](const algebra::AlgebraElement& e) {
        return algebra::to_json(e).dump();
      });

  m.def("commutator", &algebra::commutator,
        "Normal-ordered commutator of two algebra elements");
  m.def("free_hamiltonian", &algebra::free_hamiltonian);
  m.def(
      "harmonic_interaction",
      [](const algebra::FrameSpec& f, const std::string& a,
         const std::string& b, const Rational& k) {
        return algebra::harmonic_interaction(f, a, b, k);
      },
      py::arg("frame"), py::arg("body_a"), py::arg("body_b"),
      py::arg("stiffness"));

  m.def(
      "verify_covariance",
      [](const algebra::FrameSpec& s, const algebra::FrameSpec& sp) {
        const auto report = algebra::verify_covariance(s, sp);
        py::list checks;
        for (const auto& c : report.checks)
          checks.append(py::dict(
              py::arg("identity") = c.name, py::arg("pass") = c.pass,
              py::arg("residual") = c.residual.to_string()));
        return py::dict(py::arg("all_pass") = report.all_pass,
                        py::arg("identities") = checks);
      },
      "Checks all commutators of one frame against the observer-exchanged "
      "frame's constants; residuals are exact");

  m.def("angular_momentum_check",
        [](const algebra::FrameSpec& f, const std::string& body) {
          const auto report = algebra::angular_momentum_check(f, body);
          return py::dict(py::arg("all_pass") = report.all_pass,
                          py::arg("factor") = report.factor.to_double());
        });

  m.def("galilean_symmetry_check",
        [](const algebra::AlgebraElement& h, const std::string& body) {
          return algebra::galilean_symmetry_check(h, body).symmetric;
        });

  // ---------------------------------------------------------------- lattice
  py::class_<lattice::PhysConstants>(m, "PhysConstants")
      .def(py::init([](double hbar) {
             return lattice::PhysConstants{hbar};
           }),
           py::arg("hbar") = 1.0)
      .def_readonly("hbar", &lattice::PhysConstants::hbar);

  py::class_<lattice::Lattice>(m, "Lattice")
      .def(py::init<std::vector<std::string>, std::size_t, double>(),
           py::arg("coords"), py::arg("n"), py::arg("length"))
      .def_property_readonly("coords", &lattice::Lattice::coords)
      .def_property_readonly("n", &lattice::Lattice::points_per_axis)
      .def_property_readonly("length", &lattice::Lattice::length)
      .def_property_readonly("spacing", &lattice::Lattice::spacing)
      .def("position", &lattice::Lattice::position);

  py::class_<lattice::LatticeState>(m, "LatticeState")
      .def_property_readonly("lattice", &lattice::LatticeState::lattice)
      .def_property_readonly("frame", &lattice::LatticeState::frame)
      .def_property_readonly("hbar", &lattice::LatticeState::hbar)
      .def_property_readonly("norm", &lattice::LatticeState::norm)
      .def("amplitudes", &state_array,
           "Amplitude array with one axis per coordinate");

  m.def(
      "gaussian_product_state",
      [](const lattice::Lattice& lat, const algebra::FrameSpec& frame,
         const std::vector<std::tuple<double, double, double>>& comps,
         double hbar) {
        std::vector<lattice::GaussianComponent> gs;
        for (const auto& [c, w, q] : comps) gs.push_back({c, w, q});
        return lattice::gaussian_product_state(lat, frame, gs,
                                               lattice::PhysConstants{hbar});
      },
      py::arg("lattice"), py::arg("frame"), py::arg("components"),
      py::arg("hbar") = 1.0,
      "Product of periodic Gaussians from (center, width, momentum) triples");

  m.def("momentum_basis_state", &lattice::momentum_basis_state,
        py::arg("lattice"), py::arg("frame"), py::arg("modes"),
        py::arg("constants") = lattice::PhysConstants{});

  m.def("apply_canonical_pi", &lattice::apply_canonical_pi);
  m.def("apply_physical_p", &lattice::apply_physical_p);

  py::class_<lattice::OperatorExpr>(m, "OperatorExpr")
      .def_static("identity", &lattice::OperatorExpr::identity)
      .def_static("position", &lattice::OperatorExpr::position)
      .def_static("canonical_pi", &lattice::OperatorExpr::canonical_pi)
      .def_static("physical_p", &lattice::OperatorExpr::physical_p)
      .def("scaled", &lattice::OperatorExpr::scaled)
      .def("__add__", [](const lattice::OperatorExpr& a,
                         const lattice::OperatorExpr& b) { return a + b; })
      .def("__sub__", [](const lattice::OperatorExpr& a,
                         const lattice::OperatorExpr& b) { return a - b; })
      .def("__mul__", [](const lattice::OperatorExpr& a,
                         const lattice::OperatorExpr& b) { return a * b; })
      .def_static("commutator", &lattice::OperatorExpr::commutator);

  m.def("expectation", &lattice::expectation);
  m.def("mean_position", &lattice::mean_position);
  m.def("position_stddev", &lattice::position_stddev);
  m.def("mean_physical_p", &lattice::mean_physical_p);

  m.def("uncertainty_pair", [](const lattice::LatticeState& s,
                               const std::string& i, const std::string& j) {
    const auto u = lattice::uncertainty_pair(s, i, j);
    return py::dict(py::arg("delta_x") = u.delta_x,
                    py::arg("delta_p") = u.delta_p,
                    py::arg("product") = u.product, py::arg("bound") = u.bound);
  });

  m.def("momentum_mutual_information",
        &lattice::momentum_mutual_information);
  m.def("export_binary", &lattice::export_binary);

  // ----------------------------------------------------------------- frames
  py::class_<frames::FrameMap>(m, "FrameMap")
      .def(py::init<const lattice::Lattice&, const algebra::FrameSpec&,
                    const std::string&,
                    std::optional<std::vector<std::string>>>(),
           py::arg("lattice"), py::arg("frame"), py::arg("new_observer"),
           py::arg("target_order") = std::nullopt)
      .def_property_readonly("target_frame", &frames::FrameMap::target_frame)
      .def("inverse", &frames::FrameMap::inverse)
      .def("then", &frames::FrameMap::then);

  m.def("transform_state", &frames::transform_state);
  m.def("amplitude_preservation_check",
        [](const lattice::LatticeState& phi, const lattice::LatticeState& psi,
           const frames::FrameMap& map) {
          const auto c = frames::amplitude_preservation_check(phi, psi, map);
          return py::dict(py::arg("source") = c.source_amplitude,
                          py::arg("target") = c.target_amplitude,
                          py::arg("difference") = c.abs_difference);
        });

  // --------------------------------------------------------------- dynamics
  py::class_<dynamics::HamiltonianSpec>(m, "HamiltonianSpec")
      .def_static("free_n", &dynamics::HamiltonianSpec::free_n)
      .def_static("single_body_effective",
                  &dynamics::HamiltonianSpec::single_body_effective)
      .def_static(
          "two_body_harmonic",
          [](algebra::FrameSpec frame, const std::string& a,
             const std::string& b, double k) {
            return dynamics::HamiltonianSpec::two_body(
                std::move(frame), dynamics::HarmonicPotential{a, b, k});
          },
          py::arg("frame"), py::arg("body_a"), py::arg("body_b"),
          py::arg("stiffness"));

  m.def("build_kinetic_form", [](const dynamics::HamiltonianSpec& spec) {
    const auto k = dynamics::build_kinetic_form(spec);
    std::vector<std::vector<double>> out(k.size());
    for (std::size_t a = 0; a < k.size(); ++a)
      for (const auto& v : k[a]) out[a].push_back(v.to_double());
    return out;
  });

  py::class_<dynamics::Trajectory>(m, "Trajectory")
      .def_property_readonly(
          "final_state",
          [](const dynamics::Trajectory& t) { return t.final_state; })
      .def_property_readonly("times",
                             [](const dynamics::Trajectory& t) {
                               std::vector<double> out;
                               for (const auto& r : t.records)
                                 out.push_back(r.t);
                               return out;
                             })
      .def("x_mean",
           [](const dynamics::Trajectory& t, std::size_t body) {
             std::vector<double> out;
             for (const auto& r : t.records) out.push_back(r.x_mean.at(body));
             return out;
           })
      .def("p_mean",
           [](const dynamics::Trajectory& t, std::size_t body) {
             std::vector<double> out;
             for (const auto& r : t.records) out.push_back(r.p_mean.at(body));
             return out;
           })
      .def("x_std",
           [](const dynamics::Trajectory& t, std::size_t body) {
             std::vector<double> out;
             for (const auto& r : t.records) out.push_back(r.x_std.at(body));
             return out;
           })
      .def("energy", [](const dynamics::Trajectory& t) {
        std::vector<double> out;
        for (const auto& r : t.records) out.push_back(r.energy);
        return out;
      });

  m.def(
      "evolve",
      [](const lattice::LatticeState& state,
         const dynamics::HamiltonianSpec& spec, double dt, std::size_t steps,
         bool record) {
        dynamics::EvolveOptions opts;
        opts.record = record;
        return dynamics::evolve(state, spec, dt, steps, opts);
      },
      py::arg("state"), py::arg("hamiltonian"), py::arg("dt"),
      py::arg("steps"), py::arg("record") = true);

  m.def("reduced_mass_spreading_check",
        [](const Rational& m_i, const Rational& m_s, double sigma0,
           double t_total) {
          const auto c = dynamics::reduced_mass_spreading_check(m_i, m_s,
                                                                sigma0,
                                                                t_total);
          return py::dict(py::arg("times") = c.times,
                          py::arg("measured") = c.measured,
                          py::arg("predicted") = c.predicted,
                          py::arg("max_rel_error") = c.max_rel_error,
                          py::arg("reduced_mass") = c.reduced_mass);
        });

  // ----------------------------------------------------------------- wigner
  m.def("wigner_standard_violation",
        [](std::complex<double> alpha, std::complex<double> beta) {
          const auto s = wigner::standard_qm_assignment(alpha, beta);
          return wigner::check_r1_consistency(s.before_f, s.after_f,
                                              s.before_w, s.after_w)
              .violation;
        });
  m.def("wigner_constraint_residual", &wigner::constraint_residual);

  // -------------------------------------------------------------- protocols
  m.def("delta_c", [](const lattice::LatticeState& state,
                      const std::string& l, const std::string& r) {
    const auto result = protocols::delta_c(state, l, r);
    return py::dict(py::arg("moment_xp") = result.moment_xp,
                    py::arg("moment_px") = result.moment_px,
                    py::arg("delta_c") = result.delta_c,
                    py::arg("predicted") = result.predicted,
                    py::arg("abs_error") = result.abs_error);
  });

  m.def("uncertainty_matrix", [](const lattice::LatticeState& state) {
    const auto matrix = protocols::uncertainty_matrix(state);
    py::list entries;
    for (const auto& e : matrix.entries)
      entries.append(py::dict(
          py::arg("coord") = e.coord_i, py::arg("body") = e.body_j,
          py::arg("product") = e.product, py::arg("bound") = e.bound,
          py::arg("margin") = e.margin));
    return py::dict(py::arg("entries") = entries,
                    py::arg("worst_margin") = matrix.worst_margin);
  });

  // --------------------------------------------------------------- scenario
  m.def(
      "run_scenario",
      [](const std::string& ref, const std::string& out_dir,
         std::uint64_t seed) {
        const auto text = scenario::load_scenario_text(ref);
        const auto s = scenario::Scenario::parse_text(text);
        scenario::RunOptions opts;
        opts.seed = seed;
        const auto result = s.run(out_dir, opts);
        py::list actions;
        for (const auto& a : result.actions)
          actions.append(py::dict(py::arg("index") = a.index,
                                  py::arg("type") = a.type,
                                  py::arg("pass") = a.pass));
        return py::dict(py::arg("name") = result.name,
                        py::arg("pass") = result.pass,
                        py::arg("actions") = actions);
      },
      py::arg("scenario"), py::arg("out_dir"), py::arg("seed") = 1);

  m.def("bundled_scenarios", [] {
    py::list out;
    for (const auto& b : scenario::bundled_scenarios())
      out.append(py::dict(py::arg("name") = b.name,
                          py::arg("description") = b.description));
    return out;
  });
}
