"""Exact correlators of the massless interacting polariton theory.

For vanishing mass coupling the spin-flip correlators are pure power laws in
the separation, with an exponent set by the dimensionless ratio
x = chi / (hbar |eta|):

    G(d)   = (Lambda^2 / 4) * [Lambda^2 d^2]^(-1/(1 + x/pi))            (two-point)

and, for n flip/anti-flip pairs at (z_i, z'_i),

    G_n = (1/2)^(2n) Lambda^2
          * prod_{i>j} [(z_i-z_j)^2 (z'_i-z'_j)^2 M^4]^(+1/(1+x/pi))
          / prod_{i,j} [Lambda^2 (z_i-z'_j)^2]^(+1/(1+x/pi))

where the denominator runs over all ordered pairs (i, j), Lambda is the
momentum cutoff from thirrsim.params.momentum_cutoff and M is a slow scale
supplied by the caller (it cancels at n = 1). Products are evaluated in log
space and exponentiated once, so large n and extreme separations stay finite.

These formulas hold in the massless regime; with the ground-state coupling
switched on they are only the short-distance limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, SingularityError
from .params import momentum_cutoff

LN4 = math.log(4.0)


def correlation_exponent(chi_over_eta_val: float) -> float:
    """Power of the bracket [Lambda^2 d^2] in the two-point function.

    Returns -1/(1 + x/pi). Equivalently the slope of ln G against
    ln(Lambda^2 d^2); against ln d the slope is twice this value.
    """
    x = float(chi_over_eta_val)
    if x < 0.0:
        raise DomainError(f"chi/|eta| must be >= 0, got {x}")
    return -1.0 / (1.0 + x / math.pi)


def two_point(d, chi_over_eta_val: float, n_ph: float, cutoff: float | None = None):
    """Equal-time two-point function at separation d (meters).

    Vectorized over d. ``cutoff`` overrides the derived momentum cutoff
    (useful at x = pi, where the derived estimate vanishes and the correlator
    degenerates to zero; the power law in d is cutoff-independent).
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0):
        raise SingularityError("two_point requires separations > 0")
    lam = momentum_cutoff(chi_over_eta_val, n_ph) if cutoff is None else float(cutoff)
    if lam < 0.0:
        raise ConfigError(f"cutoff must be >= 0, got {lam}")
    p = correlation_exponent(chi_over_eta_val)
    if lam == 0.0:
        # Lambda^(2+2p) with 2+2p > 0 for any x > 0: the correlator vanishes.
        return np.zeros_like(d) if d.ndim else 0.0
    # same association order as the n-point accumulation, so the n = 1
    # reduction identity holds to the last bit rather than to O(10) ulps
    lnlam = math.log(lam)
    ln_g = (-LN4 + 2.0 * lnlam) + p * (2.0 * lnlam + 2.0 * np.log(d))
    out = np.exp(ln_g)
    return out if d.ndim else float(out)


def n_point(z, z_prime, chi_over_eta_val: float, n_ph: float, scale_m: float,
            cutoff: float | None = None) -> float:
    """n-pair correlator at flip positions z and anti-flip positions z_prime.

    Both argument lists are in meters and must have equal length n >= 1.
    ``scale_m`` is the slow scale M (1/m); a natural default is 1/L, and it
    cancels exactly at n = 1. Coincident points inside either list, or across
    the lists, are singular and raise with the offending pair named.
    """
    z = np.asarray(z, dtype=float)
    zp = np.asarray(z_prime, dtype=float)
    if z.ndim != 1 or zp.ndim != 1 or z.size != zp.size or z.size == 0:
        raise ConfigError(
            f"z and z_prime must be equal-length 1D position lists, got shapes "
            f"{z.shape} and {zp.shape}"
        )
    if not scale_m > 0.0:
        raise ConfigError(f"scale_m must be > 0, got {scale_m}")
    n = z.size
    lam = momentum_cutoff(chi_over_eta_val, n_ph) if cutoff is None else float(cutoff)
    if lam <= 0.0:
        # Lambda enters as Lambda^(2 - 2 n^2 q): for n > 1 the limit can
        # diverge rather than vanish, so a zero cutoff has no sensible value.
        raise DomainError("zero momentum cutoff: n-point correlator degenerate")
    q = -correlation_exponent(chi_over_eta_val)  # +1/(1 + x/pi)

    for name, arr in (("z", z), ("z_prime", zp)):
        for i in range(n):
            for j in range(i):
                if arr[i] == arr[j]:
                    raise SingularityError(
                        f"coincident points {name}[{j}] = {name}[{i}] = {arr[i]}"
                    )
    cross = z[:, None] - zp[None, :]
    if np.any(cross == 0.0):
        i, j = np.argwhere(cross == 0.0)[0]
        raise SingularityError(f"coincident points z[{i}] = z_prime[{j}] = {z[i]}")

    # log terms are sorted before summation so the result is bit-identical
    # under permutations of either position list
    ln_val = -n * LN4 + 2.0 * math.log(lam)  # (1/2)^(2n) Lambda^2
    if n > 1:
        iu, ju = np.triu_indices(n, k=1)  # unordered pairs i > j
        ln_num = (
            2.0 * np.sum(np.sort(np.log(np.abs(z[iu] - z[ju]))))
            + 2.0 * np.sum(np.sort(np.log(np.abs(zp[iu] - zp[ju]))))
            + 4.0 * len(iu) * math.log(scale_m)
        )
        ln_val += q * ln_num
    ln_den = n * n * 2.0 * math.log(lam) + 2.0 * np.sum(
        np.sort(np.log(np.abs(cross)), axis=None)
    )
    ln_val -= q * ln_den
    return float(math.exp(ln_val))


@dataclass(frozen=True)
class CorrelationSeries:
    """A 1D curve: abscissa (dimensionless separations n_ph*d, or the cutoff
    argument chi/|eta| for tag='cutoff') against values."""

    separations: np.ndarray
    values: np.ndarray
    chi_over_eta: float | None
    cutoff: float | None
    n_ph: float | None
    tag: str = "two_point"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        sep = np.asarray(self.separations, dtype=float)
        val = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "separations", sep)
        object.__setattr__(self, "values", val)
        if sep.shape != val.shape or sep.ndim != 1:
            raise ConfigError("separations and values must be matching 1D arrays")
        if not np.all(np.isfinite(sep)) or not np.all(np.isfinite(val)):
            raise ConfigError("series contains non-finite entries")
        if np.any(np.diff(sep) <= 0.0):
            raise ConfigError("separations must be strictly increasing")
        if self.tag == "two_point":
            if np.any(sep <= 0.0):
                raise ConfigError("two-point separations must be positive")
            if np.any(val <= 0.0) or np.any(np.diff(val) >= 0.0):
                raise ConfigError("two-point values must be positive and strictly decreasing")


def two_point_series(chi_over_eta_val: float, n_ph: float, d_min_nph: float,
                 d_max_nph: float, n_points: int,
                 cutoff: float | None = None) -> CorrelationSeries:
    """Two-point correlator on log-spaced separations.

    Separations are dimensionless (units of 1/n_ph): d = u / n_ph for u in
    [d_min_nph, d_max_nph]. Values are in 1/m^2.
    """
    if not (0.0 < d_min_nph < d_max_nph):
        raise ConfigError(
            f"need 0 < d_min < d_max in units of 1/n_ph, got {d_min_nph}, {d_max_nph}"
        )
    if n_points < 2:
        raise ConfigError(f"n_points must be >= 2, got {n_points}")
    u = np.logspace(math.log10(d_min_nph), math.log10(d_max_nph), n_points)
    lam = momentum_cutoff(chi_over_eta_val, n_ph) if cutoff is None else float(cutoff)
    if lam <= 0.0:
        raise DomainError(
            "momentum cutoff vanished (chi/|eta| at the domain edge); "
            "the correlator is degenerate, supply an explicit cutoff"
        )
    vals = two_point(u / n_ph, chi_over_eta_val, n_ph, cutoff=lam)
    return CorrelationSeries(
        separations=u,
        values=vals,
        chi_over_eta=float(chi_over_eta_val),
        cutoff=lam,
        n_ph=float(n_ph),
        tag="two_point",
    )


def fitted_exponent(series: CorrelationSeries) -> float:
    """Least-squares slope of ln(values) against ln(separations^2).

    For a clean power law this equals correlation_exponent(chi/|eta|); the
    affine fit residual is also checked so a contaminated series fails loudly.
    """
    if series.tag != "two_point":
        raise ConfigError(f"fitted_exponent expects a two-point series, got {series.tag!r}")
    x = 2.0 * np.log(series.separations)
    y = np.log(series.values)
    a = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - (slope * x + intercept)
    if np.max(np.abs(resid)) > 1e-8 * max(1.0, np.max(np.abs(y))):
        raise ConfigError("series is not a clean power law; exponent fit rejected")
    return float(slope)
