"""Free-fermion oracles for hardcore bosons on a chain.

A hardcore Bose chain maps onto free lattice fermions (Jordan-Wigner). On an
open chain the map is exact term by term. On a ring the hop crossing the
boundary picks up the particle-number parity, so N bosons correspond to
periodic fermions for odd N and antiperiodic fermions for even N. Density
observables never see the string, which makes the single-particle picture an
independent oracle for the interacting code: all density correlations follow
from the occupied-orbital overlap matrix G = U_occ U_occ+ through

  <n_i n_j> = <n_i><n_j> - |G_ij|^2 + delta_ij <n_i>.
"""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import ConfigError
from .basis import build_basis
from .hamiltonian import LatticeParams, build_hamiltonian, ground_state
from .observables import species_density_correlations

BOUNDARIES = ("open", "periodic", "antiperiodic")
#: relative gap below which the Fermi level counts as degenerate
DEGENERACY_RTOL = 1e-10


def single_particle_matrix(n_sites: int, j_hop: float, lam: float,
                           boundary: str = "periodic") -> np.ndarray:
    """Tight-binding matrix with hop amplitude -J + i lam on each bond."""
    if boundary not in BOUNDARIES:
        raise ConfigError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
    if n_sites < 1:
        raise ConfigError(f"n_sites must be >= 1, got {n_sites}")
    t = -j_hop + 1j * lam
    h = np.zeros((n_sites, n_sites), dtype=np.complex128)
    for j in range(n_sites - 1):
        h[j + 1, j] = t
        h[j, j + 1] = np.conj(t)
    if boundary != "open" and n_sites > 1:
        wrap = t if boundary == "periodic" else -t
        h[0, n_sites - 1] += wrap
        h[n_sites - 1, 0] += np.conj(wrap)
    return h


def ring_dispersion(n_sites: int, j_hop: float, lam: float,
                    boundary: str = "periodic") -> np.ndarray:
    """Energies -2 J cos k + 2 lam sin k on the ring momentum grid.

    k = 2 pi m / M for periodic, shifted by half a spacing for antiperiodic.
    """
    if boundary == "open":
        raise ConfigError("an open chain has no momentum grid")
    offset = 0.0 if boundary == "periodic" else 0.5
    k = 2.0 * np.pi * (np.arange(n_sites) + offset) / n_sites
    return -2.0 * j_hop * np.cos(k) + 2.0 * lam * np.sin(k)


def _occupied_orbitals(n_sites: int, n_f: int, j_hop: float, lam: float,
                       boundary: str) -> tuple[np.ndarray, np.ndarray]:
    h = single_particle_matrix(n_sites, j_hop, lam, boundary)
    evals, evecs = np.linalg.eigh(h)
    if 0 < n_f < n_sites:
        scale = max(np.max(np.abs(evals)), 1.0)
        if evals[n_f] - evals[n_f - 1] < DEGENERACY_RTOL * scale:
            warnings.warn(
                "Fermi level is degenerate; orbital filling uses the "
                "eigensolver order, which is deterministic but arbitrary",
                stacklevel=2,
            )
    return evals, evecs[:, :n_f]


def free_fermion_ground_energy(n_sites: int, n_f: int, j_hop: float, lam: float,
                               boundary: str = "periodic") -> float:
    """Sum of the n_f lowest single-particle energies."""
    if not 0 <= n_f <= n_sites:
        raise ConfigError(f"n_f must be in 0..{n_sites}, got {n_f}")
    evals, _ = _occupied_orbitals(n_sites, n_f, j_hop, lam, boundary)
    return float(np.sum(evals[:n_f]))


def wick_density_correlations(n_sites: int, n_f: int, j_hop: float, lam: float,
                              boundary: str = "periodic") -> np.ndarray:
    """<n_i n_j> of the free-fermion ground state via the Wick contraction."""
    if not 0 <= n_f <= n_sites:
        raise ConfigError(f"n_f must be in 0..{n_sites}, got {n_f}")
    _, u_occ = _occupied_orbitals(n_sites, n_f, j_hop, lam, boundary)
    g = u_occ @ np.conj(u_occ.T)
    n = np.real(np.diag(g))
    table = np.outer(n, n) - np.abs(g) ** 2
    table[np.diag_indices(n_sites)] = n
    return table


def jw_boundary(n_total: int) -> str:
    """Fermion boundary matching hardcore bosons on a ring of N particles."""
    return "periodic" if n_total % 2 == 1 else "antiperiodic"


def fermionization_check(n_sites: int, n_total: int, j_hop: float, lam: float = 0.0,
                         periodic: bool = True) -> dict:
    """Hardcore single-species ED against the free-fermion density table.

    Returns the two tables and their largest absolute deviation; exact up to
    solver tolerance because hardcore bosons in one dimension share all
    density observables with free fermions.
    """
    params = LatticeParams(
        n_sites=n_sites, n_total=n_total, j_hop=(j_hop, 0.0), lam=(lam, 0.0),
        hardcore=(True, True), periodic=periodic, n_up=n_total,
    )
    basis, h = build_hamiltonian(params)
    gs = ground_state(h)
    hardcore_table = species_density_correlations(basis, gs.vector, species=0)
    boundary = jw_boundary(n_total) if periodic else "open"
    wick_table = wick_density_correlations(n_sites, n_total, j_hop, lam, boundary)
    return {
        "hardcore": hardcore_table,
        "wick": wick_table,
        "max_deviation": float(np.max(np.abs(hardcore_table - wick_table))),
        "energy": gs.energy,
        "boundary": boundary,
    }


def softcore_deviation(n_sites: int, n_total: int, u_over_j, j_hop: float = 1.0,
                       periodic: bool = True) -> np.ndarray:
    """Distance of soft-core ground-state density correlations from the
    hardcore (free-fermion) limit, one value per u_over_j entry."""
    ratios = np.asarray(list(u_over_j), dtype=float)
    if ratios.size == 0 or np.any(ratios <= 0.0):
        raise ConfigError("u_over_j must be positive and nonempty")
    boundary = jw_boundary(n_total) if periodic else "open"
    wick_table = wick_density_correlations(n_sites, n_total, j_hop, 0.0, boundary)
    out = []
    basis = build_basis(n_sites, n_total, hardcore=False, n_up=n_total)
    for r in ratios:
        params = LatticeParams(
            n_sites=n_sites, n_total=n_total, j_hop=(j_hop, 0.0),
            u_same=(r * j_hop, 0.0), hardcore=(False, False),
            periodic=periodic, n_up=n_total,
        )
        _, h = build_hamiltonian(params, basis)
        gs = ground_state(h)
        table = species_density_correlations(basis, gs.vector, species=0)
        out.append(float(np.max(np.abs(table - wick_table))))
    return np.array(out)
