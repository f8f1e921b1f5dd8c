"""Quantum mechanics relative to finite-mass observers.

Exact symbolic verification of the modified commutation relations and a
spectral lattice backend for states, observer transformations, dynamics,
uncertainty relations and the sequential-measurement covariance signature.
"""

from ._core import (
    AlgebraElement,
    FrameMap,
    FrameSpec,
    HamiltonianSpec,
    Lattice,
    LatticeState,
    OperatorExpr,
    PhysConstants,
    Rational,
    Trajectory,
    amplitude_preservation_check,
    angular_momentum_check,
    apply_canonical_pi,
    apply_physical_p,
    build_kinetic_form,
    bundled_scenarios,
    commutator,
    delta_c,
    evolve,
    expectation,
    export_binary,
    free_hamiltonian,
    galilean_symmetry_check,
    gaussian_product_state,
    harmonic_interaction,
    mean_physical_p,
    mean_position,
    momentum_basis_state,
    momentum_mutual_information,
    position_stddev,
    reduced_mass_spreading_check,
    run_scenario,
    transform_state,
    uncertainty_matrix,
    uncertainty_pair,
    verify_covariance,
    wigner_constraint_residual,
    wigner_standard_violation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
