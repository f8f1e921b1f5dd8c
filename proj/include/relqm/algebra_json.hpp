#pragma once

#include <json.hpp>

#include "relqm/algebra.hpp"

namespace relqm::algebra {

/// Documented JSON schema: masses and coefficients as exact
/// numerator/denominator pairs, terms as exponent vectors.
nlohmann::json to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FrameSpec& frame);
FrameSpec frame_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AlgebraElement& e);
AlgebraElement element_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CovarianceReport& report);
nlohmann::json to_json(const AngularMomentumReport& report);

}  // namespace relqm::algebra
