"""Densities, correlators, and the polarization-rotation detection identity.

The spin raising operator per site is S+_j = b+_{up,j} b_{dn,j}. Detection
measures it through four rotated-mode densities instead:

  x+- = (up +- dn)/sqrt(2),  y+ = (up - i dn)/sqrt(2),  y- = (up + i dn)/sqrt(2)
  S+_j = [ (n_{x+,j} - n_{x-,j}) + i (n_{y+,j} - n_{y-,j}) ] / 2

Here the rotated densities are applied through an independent route
(annihilate into the (N-1)-particle sector, then create back), so checking
the identity exercises real operator algebra rather than cancelling symbols.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .basis import Basis, build_basis

#: rotated detection modes as (label, up coefficient, down coefficient)
ROTATED_MODES = (
    ("x_plus", 1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)),
    ("x_minus", 1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)),
    ("y_plus", 1.0 / np.sqrt(2.0), -1j / np.sqrt(2.0)),
    ("y_minus", 1.0 / np.sqrt(2.0), 1j / np.sqrt(2.0)),
)


def _check_state(basis: Basis, psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (basis.size,):
        raise ConfigError(f"state must have shape ({basis.size},), got {psi.shape}")
    return psi


def densities(basis: Basis, psi: np.ndarray) -> np.ndarray:
    """Site-resolved mean occupations, shape (2, n_sites)."""
    psi = _check_state(basis, psi)
    w = np.abs(psi) ** 2
    flat = w @ basis.occupations.astype(np.float64)
    return flat.reshape(2, basis.n_sites)


def density_correlations(basis: Basis, psi: np.ndarray) -> np.ndarray:
    """<n_a n_b> over all 2*n_sites flat modes (up block first)."""
    psi = _check_state(basis, psi)
    w = np.abs(psi) ** 2
    occ = basis.occupations.astype(np.float64)
    return (occ * w[:, None]).T @ occ


def species_density_correlations(basis: Basis, psi: np.ndarray,
                                 species: int = 0) -> np.ndarray:
    """<n_i n_j> restricted to one species, shape (n_sites, n_sites)."""
    if species not in (0, 1):
        raise ConfigError(f"species must be 0 or 1, got {species}")
    m = basis.n_sites
    full = density_correlations(basis, psi)
    lo = species * m
    return full[lo:lo + m, lo:lo + m]


def apply_hop(basis: Basis, psi: np.ndarray, p_flat: int, q_flat: int) -> np.ndarray:
    """Vector b+_q b_p |psi> within the same particle-number basis.

    p and q are flat mode indices (species * n_sites + site). A species-
    changing hop needs a basis without a fixed up-species sector.
    """
    psi = _check_state(basis, psi)
    m = basis.n_sites
    if not (0 <= p_flat < 2 * m and 0 <= q_flat < 2 * m):
        raise ConfigError("mode index outside the two-species chain")
    if basis.n_up is not None and (p_flat < m) != (q_flat < m):
        raise ConfigError("species-changing hop needs an unrestricted basis")
    occ = basis.occupations
    cap_q = basis.cap[0] if q_flat < m else basis.cap[1]
    out = np.zeros_like(psi)
    if p_flat == q_flat:
        out[:] = occ[:, p_flat].astype(np.float64) * psi
        return out
    src = np.nonzero((occ[:, p_flat] > 0) & (occ[:, q_flat] < cap_q))[0]
    if src.size == 0:
        return out
    shift_p = np.uint64((2 * m - 1 - p_flat) * basis.bits)
    shift_q = np.uint64((2 * m - 1 - q_flat) * basis.bits)
    factor = np.sqrt(occ[src, p_flat].astype(np.float64)
                     * (occ[src, q_flat] + 1.0))
    dest_keys = basis.keys[src] + (np.uint64(1) << shift_q) - (np.uint64(1) << shift_p)
    dest = basis.index_of(dest_keys)
    np.add.at(out, dest, factor * psi[src])
    return out


def spin_plus_apply(basis: Basis, psi: np.ndarray, j: int) -> np.ndarray:
    """S+_j |psi> = b+_{up,j} b_{dn,j} |psi>."""
    return apply_hop(basis, psi, basis.n_sites + j, j)


def spin_minus_apply(basis: Basis, psi: np.ndarray, j: int) -> np.ndarray:
    """S-_j |psi> = b+_{dn,j} b_{up,j} |psi>."""
    return apply_hop(basis, psi, j, basis.n_sites + j)


def spin_correlations(basis: Basis, psi: np.ndarray) -> np.ndarray:
    """<S+_i S-_j> as the Gram matrix of the lowered vectors S-_j |psi>."""
    psi = _check_state(basis, psi)
    m = basis.n_sites
    lowered = np.empty((m, basis.size), dtype=np.complex128)
    for j in range(m):
        lowered[j] = spin_minus_apply(basis, psi, j)
    return np.conj(lowered) @ lowered.T


def annihilate(basis: Basis, basis_minus: Basis, psi: np.ndarray,
               flat: int) -> np.ndarray:
    """b_flat |psi>, mapped into the (N-1)-particle basis."""
    psi = _check_state(basis, psi)
    if basis_minus.n_total != basis.n_total - 1 or basis_minus.n_sites != basis.n_sites:
        raise ConfigError("target basis must hold one particle fewer")
    if basis_minus.cap != basis.cap or basis_minus.bits != basis.bits:
        raise ConfigError(
            "annihilation needs a target basis with the same caps; build it "
            "with cap=basis.cap"
        )
    m = basis.n_sites
    occ = basis.occupations
    out = np.zeros(basis_minus.size, dtype=np.complex128)
    src = np.nonzero(occ[:, flat] > 0)[0]
    if src.size == 0:
        return out
    shift = np.uint64((2 * m - 1 - flat) * basis.bits)
    dest_keys = basis.keys[src] - (np.uint64(1) << shift)
    dest = basis_minus.index_of(dest_keys)
    np.add.at(out, dest, np.sqrt(occ[src, flat].astype(np.float64)) * psi[src])
    return out


def create(basis_minus: Basis, basis: Basis, phi: np.ndarray, flat: int) -> np.ndarray:
    """b+_flat |phi>, mapped from the (N-1)- into the N-particle basis."""
    phi = np.asarray(phi, dtype=np.complex128)
    if phi.shape != (basis_minus.size,):
        raise ConfigError(
            f"state must have shape ({basis_minus.size},), got {phi.shape}"
        )
    if basis_minus.cap != basis.cap or basis_minus.bits != basis.bits:
        raise ConfigError(
            "creation needs a source basis with the same caps; build it "
            "with cap=basis.cap"
        )
    m = basis.n_sites
    occ = basis_minus.occupations
    cap = basis.cap[0] if flat < m else basis.cap[1]
    out = np.zeros(basis.size, dtype=np.complex128)
    src = np.nonzero(occ[:, flat] < cap)[0]
    if src.size == 0:
        return out
    shift = np.uint64((2 * m - 1 - flat) * basis.bits)
    dest_keys = basis_minus.keys[src] + (np.uint64(1) << shift)
    dest = basis.index_of(dest_keys)
    np.add.at(out, dest, np.sqrt(occ[src, flat] + 1.0) * phi[src])
    return out


def rotated_density_apply(basis: Basis, basis_minus: Basis, psi: np.ndarray,
                          j: int, up_coeff: complex, dn_coeff: complex) -> np.ndarray:
    """n_c |psi> for the rotated mode c = up_coeff * b_up + dn_coeff * b_dn
    at site j, computed as c+ (c |psi>) through the (N-1) sector."""
    psi = _check_state(basis, psi)
    m = basis.n_sites
    lowered = (up_coeff * annihilate(basis, basis_minus, psi, j)
               + dn_coeff * annihilate(basis, basis_minus, psi, m + j))
    return (np.conj(up_coeff) * create(basis_minus, basis, lowered, j)
            + np.conj(dn_coeff) * create(basis_minus, basis, lowered, m + j))


def detection_identity_residual(basis: Basis, psi: np.ndarray,
                                basis_minus: Basis | None = None) -> float:
    """Worst-site residual of the rotated-density reconstruction of S+.

    Compares [(n_x+ - n_x-) + i (n_y+ - n_y-)]/2 |psi> against the direct
    spin-raising application, normalized by |psi|.
    """
    psi = _check_state(basis, psi)
    if basis.n_total < 1:
        raise ConfigError("detection identity needs at least one particle")
    if basis.n_up is not None:
        raise ConfigError("detection identity needs an unrestricted basis")
    if basis_minus is None:
        basis_minus = build_basis(basis.n_sites, basis.n_total - 1, cap=basis.cap)
    norm = float(np.linalg.norm(psi))
    if norm == 0.0:
        raise ConfigError("detection identity needs a nonzero state")
    worst = 0.0
    for j in range(basis.n_sites):
        parts = {}
        for label, cu, cd in ROTATED_MODES:
            parts[label] = rotated_density_apply(basis, basis_minus, psi, j, cu, cd)
        lhs = 0.5 * ((parts["x_plus"] - parts["x_minus"])
                     + 1j * (parts["y_plus"] - parts["y_minus"]))
        rhs = spin_plus_apply(basis, psi, j)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)) / norm)
    return worst
