#include "relqm/algebra_json.hpp"

#include <stdexcept>

namespace relqm::algebra {

using nlohmann::json;

json to_json(const Rational& r) { return json::array({r.num(), r.den()}); }

Rational rational_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument(
        "rational values are [numerator, denominator] pairs");
  return Rational(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
}

json to_json(const FrameSpec& frame) {
  json bodies = json::array();
  for (std::size_t b = 0; b < frame.body_count(); ++b)
    bodies.push_back({{"id", frame.bodies()[b]},
                      {"mass", to_json(frame.mass_of_index(b))}});
  return json{{"observer", frame.observer_id()},
              {"observer_mass", to_json(frame.observer_mass())},
              {"axes", frame.axes()},
              {"bodies", bodies}};
}

FrameSpec frame_from_json(const json& j) {
  std::vector<std::pair<std::string, Rational>> bodies;
  for (const auto& b : j.at("bodies"))
    bodies.emplace_back(b.at("id").get<std::string>(),
                        rational_from_json(b.at("mass")));
  return FrameSpec(j.at("observer").get<std::string>(),
                   rational_from_json(j.at("observer_mass")),
                   std::move(bodies), j.value("axes", 1));
}

json to_json(const AlgebraElement& e) {
  json terms = json::array();
  for (const auto& [key, coeff] : e.terms())
    terms.push_back({{"exponents", key.exps},
                     {"hbar", key.hbar},
                     {"re", to_json(coeff.re)},
                     {"im", to_json(coeff.im)}});
  return json{{"frame", to_json(e.frame())}, {"terms", terms}};
}

AlgebraElement element_from_json(const json& j) {
  const FrameSpec frame = frame_from_json(j.at("frame"));
  const std::size_t d = frame.coord_count();
  AlgebraElement::TermMap terms;
  for (const auto& t : j.at("terms")) {
    TermKey key;
    key.exps = t.at("exponents").get<std::vector<std::uint32_t>>();
    if (key.exps.size() != 2 * d)
      throw std::invalid_argument(
          "element term has wrong exponent vector length");
    key.hbar = t.at("hbar").get<std::uint32_t>();
    GaussRational coeff(rational_from_json(t.at("re")),
                        rational_from_json(t.at("im")));
    if (!coeff.is_zero()) terms.emplace(std::move(key), coeff);
  }
  return AlgebraElement(
      std::make_shared<const AlgebraElement::Context>(AlgebraElement::Context{
          frame, CommutationMatrix::for_frame(frame)}),
      std::move(terms));
}

json to_json(const CovarianceReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"identity", c.name},
                      {"pass", c.pass},
                      {"expected", c.expected},
                      {"residual", c.residual.to_string()}});
  return json{{"all_pass", report.all_pass}, {"identities", checks}};
}

json to_json(const AngularMomentumReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"identity", c.name},
                      {"pass", c.pass},
                      {"residual", c.residual.to_string()}});
  return json{{"all_pass", report.all_pass},
              {"factor", to_json(report.factor)},
              {"identities", checks}};
}

}  // namespace relqm::algebra
