#include "relqm/wigner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relqm::wigner {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kConsistencyTolerance = 1e-10;

void require_unit_pair(std::complex<double> a, std::complex<double> b,
                       const char* name) {
  const double n = std::norm(a) + std::norm(b);
  if (std::abs(n - 1.0) > 1e-9)
    throw std::invalid_argument(std::string("wigner: pair ") + name +
                                " is not unit-norm");
}

}  // namespace

ToyFrameState::ToyFrameState(ToyFrame f, std::vector<std::complex<double>> c)
    : frame(f), coeffs(std::move(c)) {
  if (coeffs.empty())
    throw std::invalid_argument("ToyFrameState: empty coefficient list");
  if (std::abs(norm() - 1.0) > kNormTolerance)
    throw std::invalid_argument("ToyFrameState: coefficients not unit-norm");
}

double ToyFrameState::norm() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  return std::sqrt(s);
}

std::complex<double> transition_amplitude(const ToyFrameState& phi,
                                          const ToyFrameState& psi) {
  if (phi.frame != psi.frame)
    throw std::invalid_argument(
        "transition_amplitude: states live in different frames");
  if (phi.coeffs.size() != psi.coeffs.size())
    throw std::invalid_argument(
        "transition_amplitude: dimension mismatch");
  std::complex<double> s{0.0, 0.0};
  for (std::size_t k = 0; k < phi.coeffs.size(); ++k)
    s += std::conj(phi.coeffs[k]) * psi.coeffs[k];
  return s;
}

R1Report check_r1_consistency(const ToyFrameState& before_f,
                              const ToyFrameState& after_f,
                              const ToyFrameState& before_w,
                              const ToyFrameState& after_w) {
  R1Report r;
  r.amplitude_f = transition_amplitude(after_f, before_f);
  r.amplitude_w = transition_amplitude(after_w, before_w);
  r.violation = std::abs(r.amplitude_f - r.amplitude_w);
  r.consistent = r.violation < kConsistencyTolerance;
  return r;
}

double constraint_residual(std::complex<double> alpha,
                           std::complex<double> beta,
                           std::complex<double> alpha1,
                           std::complex<double> beta1,
                           std::complex<double> alpha2,
                           std::complex<double> beta2) {
  require_unit_pair(alpha, beta, "(alpha, beta)");
  require_unit_pair(alpha1, beta1, "(alpha', beta')");
  require_unit_pair(alpha2, beta2, "(alpha'', beta'')");
  return std::abs(alpha - (alpha1 * alpha2 + beta1 * beta2));
}

WignerScenarioStates standard_qm_assignment(std::complex<double> alpha,
                                            std::complex<double> beta) {
  require_unit_pair(alpha, beta, "(alpha, beta)");
  const std::complex<double> zero{0.0, 0.0};
  const std::complex<double> one{1.0, 0.0};
  // basis |particle, other observer>: 00, 01, 10, 11
  return WignerScenarioStates{
      ToyFrameState(ToyFrame::F, {alpha, zero, beta, zero}),
      ToyFrameState(ToyFrame::F, {one, zero, zero, zero}),
      ToyFrameState(ToyFrame::W, {alpha, zero, beta, zero}),
      ToyFrameState(ToyFrame::W, {alpha, zero, zero, beta})};
}

WignerScenarioStates classical_assignment(std::complex<double> alpha,
                                          std::complex<double> beta) {
  require_unit_pair(alpha, beta, "(alpha, beta)");
  const std::complex<double> zero{0.0, 0.0};
  const std::complex<double> one{1.0, 0.0};
  return WignerScenarioStates{ToyFrameState(ToyFrame::F, {alpha, beta}),
                              ToyFrameState(ToyFrame::F, {one, zero}),
                              ToyFrameState(ToyFrame::W, {alpha, beta}),
                              ToyFrameState(ToyFrame::W, {one, zero})};
}

WignerScenarioStates quantum_toy_assignment(std::complex<double> alpha,
                                            std::complex<double> beta,
                                            std::complex<double> alpha1,
                                            std::complex<double> beta1,
                                            std::complex<double> alpha2,
                                            std::complex<double> beta2) {
  require_unit_pair(alpha, beta, "(alpha, beta)");
  require_unit_pair(alpha1, beta1, "(alpha', beta')");
  require_unit_pair(alpha2, beta2, "(alpha'', beta'')");
  const std::complex<double> zero{0.0, 0.0};
  const std::complex<double> one{1.0, 0.0};
  return WignerScenarioStates{
      ToyFrameState(ToyFrame::F, {alpha, zero, beta, zero}),
      ToyFrameState(ToyFrame::F, {one, zero, zero, zero}),
      ToyFrameState(ToyFrame::W, {alpha1, zero, zero, beta1}),
      ToyFrameState(ToyFrame::W, {alpha2, zero, zero, beta2})};
}

std::vector<FamilySample> solution_family(double alpha, std::size_t samples) {
  std::vector<FamilySample> out;
  out.reserve(samples);
  const double disc = 1.0 - alpha * alpha;
  for (std::size_t k = 0; k < samples; ++k) {
    FamilySample s;
    s.theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
              static_cast<double>(samples);
    s.alpha1 = std::cos(s.theta);
    s.beta1 = std::sin(s.theta);
    if (disc >= 0.0) {
      const double t = std::sqrt(disc);
      s.alpha2 = alpha * s.alpha1 - t * s.beta1;
      s.beta2 = alpha * s.beta1 + t * s.alpha1;
      s.residual = std::abs(alpha - (s.alpha1 * s.alpha2 + s.beta1 * s.beta2));
      s.solvable = true;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace relqm::wigner
