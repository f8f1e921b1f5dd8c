#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relqm/lattice.hpp"

namespace relqm::dynamics {

enum class HamiltonianKind { free_n, two_body_interacting, single_body_effective };

struct HarmonicPotential {
  std::string body_a;
  std::string body_b;
  double stiffness = 0.0;  // V = (k/2)(x_a - x_b)^2
};

/// V sampled over the wrapped difference grid: values[j] = V(-L/2 + j dx).
struct TabulatedPotential {
  std::string body_a;
  std::string body_b;
  std::vector<double> values;
};

using PotentialSpec =
    std::variant<std::monostate, HarmonicPotential, TabulatedPotential>;

/// Frame-consistent Hamiltonian descriptor. The kinetic part is always
/// sum_k p_k^2/2m_k - P_total^2/2M_total, which is quadratic in the
/// canonical pi; single_body_effective is its one-body reduction p^2/2m~
/// with m~ = m(1 + m/m_s).
struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::free_n;
  algebra::FrameSpec frame;
  PotentialSpec potential;

  static HamiltonianSpec free_n(algebra::FrameSpec frame);
  static HamiltonianSpec two_body(algebra::FrameSpec frame,
                                  PotentialSpec potential);
  static HamiltonianSpec single_body_effective(algebra::FrameSpec frame);
};

/// Exact rational quadratic-form matrix K with kinetic energy (1/2) pi^T K pi
/// per Fourier mode: K = diag(1/m_k) + (1/m_s) ones.
std::vector<std::vector<Rational>> build_kinetic_form(
    const HamiltonianSpec& spec);

struct StepRecord {
  double t = 0.0;
  std::vector<double> x_mean;   // per body, frame order
  std::vector<double> p_mean;
  std::vector<double> x_std;
  std::vector<double> p_std;
  double energy = 0.0;
  double grad_v_mean = 0.0;  // <V'(x_a - x_b)>, interacting case only
};

struct Trajectory {
  std::vector<StepRecord> records;          // step 0 .. steps
  std::vector<lattice::LatticeState> stored;  // when store_stride > 0
  std::size_t store_stride = 0;
  lattice::LatticeState final_state;
  double dt = 0.0;
};

struct EvolveOptions {
  std::size_t store_stride = 0;  // 0: keep only the final state
  bool record = true;
};

/// Evolves under the spec's Hamiltonian. Free and effective kinds use exact
/// per-mode phases (no step-size bound); the interacting kind uses symmetric
/// Strang splitting and rejects dt when dt * E_kin_max / hbar >= 0.5,
/// suggesting a safe step.
Trajectory evolve(const lattice::LatticeState& initial,
                  const HamiltonianSpec& spec, double dt, std::size_t steps,
                  const EvolveOptions& opts = {});

/// Low-level engine: evolve under kinetic form `k_form` (entries in floating
/// point, energy (1/2) pi^T K pi) plus an optional position-space potential
/// grid. Used by evolve() and by deliberately frame-asymmetric demos.
Trajectory evolve_quadratic(const lattice::LatticeState& initial,
                            const std::vector<std::vector<double>>& k_form,
                            const std::vector<double>* potential_grid,
                            const std::vector<double>* grad_grid, double dt,
                            std::size_t steps, const EvolveOptions& opts,
                            bool exact_phases);

/// Position-space potential samples for an interacting spec.
std::vector<double> potential_grid(const HamiltonianSpec& spec,
                                   const lattice::Lattice& lattice);
/// Same for dV/d(x_a - x_b).
std::vector<double> potential_gradient_grid(const HamiltonianSpec& spec,
                                            const lattice::Lattice& lattice);

struct BodyEhrenfest {
  std::string body;
  std::vector<double> t;             // interior sample times
  std::vector<double> xdot;          // centered-difference d<x>/dt
  std::vector<double> pdot;          // centered-difference d<p>/dt
  std::vector<double> xdot_residual;  // d<x>/dt - <p>/m
  double max_xdot_residual = 0.0;
  double max_pdot = 0.0;
};

struct EhrenfestReport {
  std::vector<BodyEhrenfest> bodies;
  // Interacting pair only: residual of d<p_a>/dt = -<dV> (Heisenberg form)
  // and, for comparison, of the 1/m_a-scaled variant.
  double max_force_residual = 0.0;
  double max_force_residual_scaled = 0.0;
  bool has_force_check = false;
};

/// Centered-difference slopes of the recorded expectation series and their
/// residuals against the expected dynamics.
EhrenfestReport ehrenfest_track(const Trajectory& traj,
                                const HamiltonianSpec& spec,
                                const std::vector<std::string>& bodies);

struct SpreadingCheck {
  std::vector<double> times;
  std::vector<double> measured;
  std::vector<double> predicted;
  double max_rel_error = 0.0;
  double reduced_mass = 0.0;
};

struct SpreadingOptions {
  std::size_t n = 256;
  double length = 80.0;
  std::size_t steps = 50;
  double hbar = 1.0;
};

/// Free-wavepacket width growth against the reduced-mass Gaussian law
/// sigma(t) = sigma0 sqrt(1 + (hbar t / (2 mu sigma0^2))^2). Rejects runs
/// where the packet reaches the boundary.
SpreadingCheck reduced_mass_spreading_check(const Rational& m_i,
                                            const Rational& m_s,
                                            double sigma0, double t_total,
                                            const SpreadingOptions& opts = {});

}  // namespace relqm::dynamics
