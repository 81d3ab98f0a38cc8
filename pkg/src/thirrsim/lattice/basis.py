"""Occupation-number bases for the two-species Bose lattice.

States are encoded as packed unsigned 64-bit keys: every site gets a fixed
number of bits (enough for the largest allowed occupancy), with the first
up-species site in the most significant position. Keys are kept sorted, so
membership and destination lookups are binary searches, and a single hop is
plain key arithmetic (subtract one unit at the source bit field, add one at
the destination).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import ConfigError, NumericalError

MAX_STATES_DEFAULT = 2_000_000


def bits_for(cap: int) -> int:
    """Bits needed to store occupancies 0..cap."""
    if cap < 1:
        raise ConfigError(f"occupancy cap must be >= 1, got {cap}")
    return int(cap).bit_length()


@lru_cache(maxsize=None)
def count_compositions(n_sites: int, n_total: int, cap: int) -> int:
    """Number of ways to place n_total bosons on n_sites with <= cap each."""
    if n_total < 0:
        return 0
    counts = [1] + [0] * n_total
    for _ in range(n_sites):
        new = [0] * (n_total + 1)
        for tot in range(n_total + 1):
            new[tot] = sum(counts[tot - o] for o in range(0, min(cap, tot) + 1))
        counts = new
    return counts[n_total]


def _compositions(n_sites: int, n_total: int, cap: int) -> np.ndarray:
    """All occupation rows (n_states, n_sites) with the given total and cap."""
    rows = []
    stack = [(0, n_total, [])]
    while stack:
        site, left, acc = stack.pop()
        if site == n_sites:
            if left == 0:
                rows.append(acc)
            continue
        remaining_capacity = cap * (n_sites - site - 1)
        for occ in range(min(cap, left), -1, -1):
            if left - occ <= remaining_capacity:
                stack.append((site + 1, left - occ, acc + [occ]))
    if not rows:
        return np.zeros((0, n_sites), dtype=np.uint8)
    return np.array(rows, dtype=np.uint8)


@dataclass(frozen=True)
class Basis:
    """Sorted packed-key basis for n_total bosons of two species on a chain.

    occupations[i] holds the decoded state of keys[i]: the first n_sites
    columns are the up species, the rest the down species.
    """

    n_sites: int
    n_total: int
    cap: tuple[int, int]
    n_up: int | None
    bits: int
    keys: np.ndarray
    occupations: np.ndarray

    @property
    def size(self) -> int:
        return int(self.keys.shape[0])

    def site_shift(self, species: int, j: int) -> int:
        """Bit offset of site j of the given species inside a key."""
        if species not in (0, 1):
            raise ConfigError(f"species must be 0 or 1, got {species}")
        if not 0 <= j < self.n_sites:
            raise ConfigError(f"site {j} outside 0..{self.n_sites - 1}")
        flat = species * self.n_sites + j
        return (2 * self.n_sites - 1 - flat) * self.bits

    def index_of(self, keys) -> np.ndarray:
        """Positions of the given keys; raises if any key is not a member."""
        keys = np.asarray(keys, dtype=np.uint64)
        idx = np.searchsorted(self.keys, keys)
        bad = (idx >= self.size) | (self.keys[np.minimum(idx, self.size - 1)] != keys)
        if np.any(bad):
            raise NumericalError("lookup key is not a member of the basis")
        return idx


def build_basis(n_sites: int, n_total: int, hardcore=True, n_up: int | None = None,
                max_states: int = MAX_STATES_DEFAULT, cap=None) -> Basis:
    """Enumerate the basis, optionally restricted to a fixed up-species count.

    hardcore may be a single flag or a per-species pair; soft-core species
    are capped at n_total (the largest reachable occupancy). An explicit cap
    pair overrides both, which keeps the key encoding of bases with different
    particle numbers compatible (needed for annihilation/creation maps).
    """
    if n_sites < 1:
        raise ConfigError(f"n_sites must be >= 1, got {n_sites}")
    if n_total < 0:
        raise ConfigError(f"n_total must be >= 0, got {n_total}")
    if cap is None:
        if isinstance(hardcore, bool):
            hardcore = (hardcore, hardcore)
        hardcore = tuple(bool(h) for h in hardcore)
        if len(hardcore) != 2:
            raise ConfigError("hardcore must be a flag or a pair of flags")
        cap = tuple(1 if h else max(n_total, 1) for h in hardcore)
    else:
        cap = tuple(int(c) for c in cap)
        if len(cap) != 2 or min(cap) < 1:
            raise ConfigError(f"cap must be a pair of positive ints, got {cap}")
    bits = bits_for(max(cap))
    if 2 * n_sites * bits > 63:
        raise ConfigError(
            f"state of {2 * n_sites} sites at {bits} bits each does not fit a key"
        )
    if n_up is not None:
        if not 0 <= n_up <= n_total:
            raise ConfigError(f"n_up must be in 0..{n_total}, got {n_up}")
        sectors = [n_up]
    else:
        sectors = range(n_total + 1)

    total = 0
    for nu in sectors:
        total += (count_compositions(n_sites, nu, cap[0])
                  * count_compositions(n_sites, n_total - nu, cap[1]))
    if total > max_states:
        raise ConfigError(f"basis would hold {total} states (limit {max_states})")
    if total == 0:
        raise ConfigError(
            f"no state of {n_total} particles fits {n_sites} sites at caps {cap}"
        )

    blocks = []
    for nu in sectors:
        up = _compositions(n_sites, nu, cap[0])
        dn = _compositions(n_sites, n_total - nu, cap[1])
        if up.shape[0] == 0 or dn.shape[0] == 0:
            continue
        joined = np.empty((up.shape[0] * dn.shape[0], 2 * n_sites), dtype=np.uint8)
        joined[:, :n_sites] = np.repeat(up, dn.shape[0], axis=0)
        joined[:, n_sites:] = np.tile(dn, (up.shape[0], 1))
        blocks.append(joined)
    occ = np.concatenate(blocks, axis=0)

    place = (np.uint64(1) << (np.arange(2 * n_sites - 1, -1, -1, dtype=np.uint64)
                              * np.uint64(bits)))
    keys = occ.astype(np.uint64) @ place
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    occ = occ[order]
    if keys.shape[0] > 1 and np.any(keys[1:] == keys[:-1]):
        raise NumericalError("duplicate keys in basis enumeration")
    return Basis(
        n_sites=n_sites,
        n_total=n_total,
        cap=cap,
        n_up=n_up,
        bits=bits,
        keys=keys,
        occupations=occ,
    )


def state_index(basis: Basis, occupation) -> int:
    """Index of a single explicitly given occupation row."""
    occ = np.asarray(occupation, dtype=np.uint64)
    if occ.shape != (2 * basis.n_sites,):
        raise ConfigError(
            f"occupation must have {2 * basis.n_sites} entries, got {occ.shape}"
        )
    place = (np.uint64(1) << (np.arange(2 * basis.n_sites - 1, -1, -1, dtype=np.uint64)
                              * np.uint64(basis.bits)))
    return int(basis.index_of(np.array([occ @ place]))[0])
