"""Exact diagonalization of the discretized two-species polariton model."""

from .basis import Basis, build_basis, count_compositions, state_index
from .freefermion import (
    fermionization_check,
    free_fermion_ground_energy,
    jw_boundary,
    ring_dispersion,
    single_particle_matrix,
    softcore_deviation,
    wick_density_correlations,
)
from .hamiltonian import (
    GroundState,
    LatticeParams,
    build_hamiltonian,
    from_polariton,
    ground_state,
    hermiticity_defect,
    number_operator,
)
from .observables import (
    annihilate,
    apply_hop,
    create,
    densities,
    density_correlations,
    detection_identity_residual,
    rotated_density_apply,
    species_density_correlations,
    spin_correlations,
    spin_minus_apply,
    spin_plus_apply,
)

__all__ = [
    "Basis",
    "GroundState",
    "LatticeParams",
    "annihilate",
    "apply_hop",
    "build_basis",
    "build_hamiltonian",
    "count_compositions",
    "create",
    "densities",
    "density_correlations",
    "detection_identity_residual",
    "fermionization_check",
    "free_fermion_ground_energy",
    "from_polariton",
    "ground_state",
    "hermiticity_defect",
    "jw_boundary",
    "number_operator",
    "ring_dispersion",
    "rotated_density_apply",
    "single_particle_matrix",
    "softcore_deviation",
    "species_density_correlations",
    "spin_correlations",
    "spin_minus_apply",
    "spin_plus_apply",
    "state_index",
    "wick_density_correlations",
]
