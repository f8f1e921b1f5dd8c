#pragma once

#include <complex>
#include <string>
#include <vector>

namespace relqm::wigner {

enum class ToyFrame { F, W };

/// Joint particle (x) other-observer state in the computational basis,
/// relative to one of the two discrete frames.
struct ToyFrameState {
  ToyFrame frame = ToyFrame::F;
  std::vector<std::complex<double>> coeffs;

  ToyFrameState(ToyFrame f, std::vector<std::complex<double>> c);
  double norm() const;
};

/// Inner product <Phi|Psi>; the two states must be described in the same
/// frame.
std::complex<double> transition_amplitude(const ToyFrameState& phi,
                                          const ToyFrameState& psi);

struct R1Report {
  bool consistent = false;
  double violation = 0.0;
  std::complex<double> amplitude_f;
  std::complex<double> amplitude_w;
};

/// Equal transition amplitudes across the two observers: consistent iff
/// |<Phi|Psi>^F - <Phi'|Psi'>^W| < 1e-10.
R1Report check_r1_consistency(const ToyFrameState& before_f,
                              const ToyFrameState& after_f,
                              const ToyFrameState& before_w,
                              const ToyFrameState& after_w);

/// |alpha - (alpha' alpha'' + beta' beta'')| for unit-norm coefficient pairs.
double constraint_residual(std::complex<double> alpha,
                           std::complex<double> beta,
                           std::complex<double> alpha1,
                           std::complex<double> beta1,
                           std::complex<double> alpha2,
                           std::complex<double> beta2);

struct WignerScenarioStates {
  ToyFrameState before_f;
  ToyFrameState after_f;
  ToyFrameState before_w;
  ToyFrameState after_w;
};

/// The textbook assignment: the friend sees a collapse, the outside observer
/// keeps the entangling unitary. Violates R1 by |alpha - |alpha|^2|.
WignerScenarioStates standard_qm_assignment(std::complex<double> alpha,
                                            std::complex<double> beta);

/// Both observers collapsed (classical-observers limit): consistent exactly.
WignerScenarioStates classical_assignment(std::complex<double> alpha,
                                          std::complex<double> beta);

/// Quantum-observer toy assignment with entangled W-side descriptions built
/// from coefficient pairs (alpha', beta') and (alpha'', beta'').
WignerScenarioStates quantum_toy_assignment(std::complex<double> alpha,
                                            std::complex<double> beta,
                                            std::complex<double> alpha1,
                                            std::complex<double> beta1,
                                            std::complex<double> alpha2,
                                            std::complex<double> beta2);

struct FamilySample {
  double theta = 0.0;
  double alpha1 = 0.0;
  double beta1 = 0.0;
  double alpha2 = 0.0;
  double beta2 = 0.0;
  double residual = 0.0;
  bool solvable = false;
};

/// Numeric slice of the one-parameter family of real solutions of
/// alpha = alpha' alpha'' + beta' beta'' with both pairs unit-norm, sampled
/// over alpha' = cos(theta), beta' = sin(theta).
std::vector<FamilySample> solution_family(double alpha, std::size_t samples);

}  // namespace relqm::wigner
