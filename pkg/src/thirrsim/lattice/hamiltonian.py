"""Two-species Bose-Hubbard Hamiltonian with imaginary hopping.

Per species s (the other one written sbar), on a chain of n_sites:

  H = sum_s sum_j [ -J_s (b+_{j+1} b_j + h.c.) + i lam_s (b+_{j+1} b_j - h.c.) ]
      + sum_s (U_s/2) sum_j n_j (n_j - 1) + U_x sum_j n_{up,j} n_{dn,j}
      + W sum_j (b+_{up,j} b_{dn,j} + h.c.)

The imaginary hop i lam tilts the single-particle dispersion
-2 J cos k + 2 lam sin k, which is the lattice version of a linear-in-k
(Dirac-like) drift on top of the effective-mass term. Only the raw directed
terms are assembled; the conjugate transpose is added afterwards, so the
matrix is Hermitian by construction rather than by rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..constants import HBAR
from ..errors import ConfigError, NumericalError
from ..params import PolaritonParams, _pair
from .basis import Basis, build_basis

#: largest dimension handled by the dense eigensolver
DENSE_LIMIT = 2000
#: relative residual bound on the returned eigenpair
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class LatticeParams:
    """Couplings of the discretized two-species model (energy units)."""

    n_sites: int
    n_total: int
    j_hop: tuple
    lam: tuple = (0.0, 0.0)
    u_same: tuple = (0.0, 0.0)
    u_cross: float = 0.0
    w: float = 0.0
    hardcore: tuple = (True, True)
    periodic: bool = True
    n_up: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "j_hop", _pair(self.j_hop, "j_hop"))
        object.__setattr__(self, "lam", _pair(self.lam, "lam"))
        object.__setattr__(self, "u_same", _pair(self.u_same, "u_same"))
        if isinstance(self.hardcore, bool):
            object.__setattr__(self, "hardcore", (self.hardcore, self.hardcore))
        if self.n_sites < 1:
            raise ConfigError(f"n_sites must be >= 1, got {self.n_sites}")
        if self.n_total < 0:
            raise ConfigError(f"n_total must be >= 0, got {self.n_total}")
        if self.w != 0.0 and self.n_up is not None:
            raise ConfigError(
                "species conversion (w != 0) is incompatible with a fixed n_up sector"
            )


def from_polariton(p: PolaritonParams, n_sites: int, n_total: int, spacing: float,
                   hardcore=(True, True), periodic: bool = True,
                   n_up: int | None = None) -> LatticeParams:
    """Map continuum polariton parameters onto lattice couplings.

    spacing is the lattice constant a: J_s = hbar^2/(2 m_s a^2) inherits the
    sign of the effective mass, lam_s = hbar eta_s/(2a), on-site couplings
    are the contact strengths divided by a, and w = hbar W0.
    """
    if not spacing > 0.0:
        raise ConfigError(f"spacing must be > 0, got {spacing}")
    j_hop = tuple(HBAR ** 2 / (2.0 * p.m_nr[s] * spacing ** 2) for s in (0, 1))
    lam = tuple(HBAR * p.eta[s] / (2.0 * spacing) for s in (0, 1))
    u_same = tuple(p.chi_same[s] / spacing for s in (0, 1))
    u_cross = 0.5 * p.chi_tm / spacing
    w = HBAR * p.omega0_abs
    return LatticeParams(
        n_sites=n_sites, n_total=n_total, j_hop=j_hop, lam=lam,
        u_same=u_same, u_cross=u_cross, w=w,
        hardcore=hardcore, periodic=periodic, n_up=n_up,
    )


def _bonds(n_sites: int, periodic: bool) -> list:
    bonds = [(j, j + 1) for j in range(n_sites - 1)]
    if periodic and n_sites > 1:
        bonds.append((n_sites - 1, 0))
    return bonds


def build_hamiltonian(params: LatticeParams,
                      basis: Basis | None = None) -> tuple[Basis, sp.csr_matrix]:
    """Assemble the Hamiltonian on (optionally) a caller-supplied basis."""
    if basis is None:
        basis = build_basis(params.n_sites, params.n_total,
                            hardcore=params.hardcore, n_up=params.n_up)
    else:
        want_cap = tuple(1 if h else max(params.n_total, 1) for h in params.hardcore)
        if (basis.n_sites != params.n_sites or basis.n_total != params.n_total
                or basis.cap != want_cap):
            raise ConfigError("basis does not match the lattice parameters")
    occ = basis.occupations.astype(np.int64)
    keys = basis.keys
    dim = basis.size
    m = params.n_sites

    rows = []
    cols = []
    vals = []

    def directed_term(p_flat: int, q_flat: int, amp: complex, cap_q: int):
        """Accumulate amp * b+_q b_p (matrix elements of the raw half)."""
        shift_p = np.uint64((2 * m - 1 - p_flat) * basis.bits)
        shift_q = np.uint64((2 * m - 1 - q_flat) * basis.bits)
        src = np.nonzero((occ[:, p_flat] > 0) & (occ[:, q_flat] < cap_q))[0]
        if src.size == 0:
            return
        factor = np.sqrt(occ[src, p_flat] * (occ[src, q_flat] + 1.0))
        dest_keys = keys[src] + (np.uint64(1) << shift_q) - (np.uint64(1) << shift_p)
        dest = basis.index_of(dest_keys)
        rows.append(dest)
        cols.append(src)
        vals.append(amp * factor)

    for s in (0, 1):
        amp = -params.j_hop[s] + 1j * params.lam[s]
        if amp == 0:
            continue
        for (j, jp) in _bonds(m, params.periodic):
            directed_term(s * m + j, s * m + jp, amp, basis.cap[s])
    if params.w != 0.0:
        for j in range(m):
            directed_term(m + j, j, complex(params.w), basis.cap[0])

    if rows:
        raw = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim), dtype=np.complex128,
        ).tocsr()
    else:
        raw = sp.csr_matrix((dim, dim), dtype=np.complex128)

    n_up = occ[:, :m]
    n_dn = occ[:, m:]
    diag = np.zeros(dim, dtype=np.float64)
    for s, block in ((0, n_up), (1, n_dn)):
        if params.u_same[s] != 0.0:
            diag += 0.5 * params.u_same[s] * np.sum(block * (block - 1), axis=1)
    if params.u_cross != 0.0:
        diag += params.u_cross * np.sum(n_up * n_dn, axis=1)

    h = raw + raw.conjugate().transpose().tocsr() + sp.diags(diag).tocsr()
    h.sum_duplicates()
    return basis, h.tocsr()


@dataclass(frozen=True)
class GroundState:
    energy: float
    vector: np.ndarray
    residual: float


def ground_state(h: sp.csr_matrix, seed: int = 0) -> GroundState:
    """Lowest eigenpair: dense for small matrices, Lanczos above DENSE_LIMIT.

    The Lanczos start vector is seeded for reproducible output. The eigenpair
    is rejected if its residual exceeds RESIDUAL_TOL times the inf-norm of H.
    """
    dim = h.shape[0]
    if dim == 0:
        raise ConfigError("cannot diagonalize an empty Hamiltonian")
    hnorm = float(np.max(np.abs(h).sum(axis=1))) if h.nnz else 0.0
    if dim <= DENSE_LIMIT:
        evals, evecs = np.linalg.eigh(h.toarray())
        energy = float(evals[0])
        vector = np.ascontiguousarray(evecs[:, 0])
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.normal(size=dim)
        evals, evecs = spla.eigsh(h, k=1, which="SA", v0=v0)
        energy = float(evals[0])
        vector = np.ascontiguousarray(evecs[:, 0])
    vector = vector / np.linalg.norm(vector)
    residual = float(np.linalg.norm(h @ vector - energy * vector))
    if hnorm > 0.0 and residual > RESIDUAL_TOL * hnorm:
        raise NumericalError(
            f"eigenpair residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e} * |H| "
            f"= {RESIDUAL_TOL * hnorm:.3e}"
        )
    return GroundState(energy=energy, vector=vector, residual=residual)


def number_operator(basis: Basis, species: int) -> np.ndarray:
    """Diagonal of the particle-number operator of one species."""
    m = basis.n_sites
    block = basis.occupations[:, species * m:(species + 1) * m]
    return np.sum(block, axis=1).astype(np.float64)


def hermiticity_defect(h: sp.csr_matrix) -> float:
    """Largest absolute entry of H - H+ (exactly zero by construction)."""
    d = h - h.conjugate().transpose()
    return float(np.max(np.abs(d.data))) if d.nnz else 0.0
