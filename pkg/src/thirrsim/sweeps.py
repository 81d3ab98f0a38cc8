"""Parameter scans over the optical configuration.

A sweep axis is a dotted path into OpticalConfig ("delta_same.up",
"delta_cross.both", "omega0", ...), a range, and a spacing. Cells where the
requested quantity is singular (balanced fields, vanishing detuning, cutoff
domain) are flagged with a reason code instead of leaking NaN; evaluation is
serial in row-major index order, so identical specs give bit-identical grids.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import DOWN, SPECIES, UP
from .errors import ConfigError, DomainError, SingularityError
from .params import (
    OpticalConfig,
    RegimeThresholds,
    chi_over_eta,
    classify_regime,
    derive_params,
    interaction_to_kinetic,
    kinetic_ratio,
    loss_rates,
    momentum_cutoff,
    pulse_extent,
)

#: quantity name -> short description (CLI help and validation)
QUANTITIES = {
    "interaction_ratio": "chi_cross/chi_same for the selected species",
    "beta_same": "|chi_same|/(hbar |eta|)",
    "beta_cross": "|chi_cross|/(hbar |eta|)",
    "beta_kinetic": "quadratic-to-linear kinetic energy ratio",
    "chi_over_eta": "chi_tm/(hbar |eta|), the correlator argument",
    "cutoff": "momentum cutoff Lambda in 1/m",
    "loss_total": "total loss rate kappa in 1/s",
    "coherence_time": "1/kappa in s",
}

FLAG_OK = 0
FLAG_BALANCED = 1        # eta = 0 where a division by eta is required
FLAG_BAD_DETUNING = 2    # config rejected (zero detuning etc.)
FLAG_DOMAIN = 3          # formula domain violated (e.g. cutoff argument)
FLAG_NAMES = {
    FLAG_OK: "ok",
    FLAG_BALANCED: "balanced_fields",
    FLAG_BAD_DETUNING: "invalid_config",
    FLAG_DOMAIN: "domain",
}

_PATH_FIELDS = {
    "omega_plus", "omega_minus", "delta", "delta_same", "delta_cross",
    "n_ph", "n_photons",
}
_SCALAR_FIELDS = {"omega0", "gamma_abs", "n_z", "g2nz", "v_empty", "length"}


def set_by_path(cfg: OpticalConfig, path: str, value: float) -> OpticalConfig:
    """Return a copy of cfg with the scalar at ``path`` replaced.

    Pair fields take a ".up", ".down" or ".both" suffix; scalar fields take
    the bare name. Unknown paths raise ConfigError.
    """
    head, _, tail = path.partition(".")
    if head in _SCALAR_FIELDS:
        if tail:
            raise ConfigError(f"path {path!r}: {head} is scalar, no component expected")
        return replace(cfg, **{head: float(value)})
    if head in _PATH_FIELDS:
        pair = list(getattr(cfg, head))
        if tail == "up":
            pair[UP] = float(value)
        elif tail == "down":
            pair[DOWN] = float(value)
        elif tail == "both":
            pair = [float(value), float(value)]
        else:
            raise ConfigError(
                f"path {path!r}: expected component 'up', 'down' or 'both'"
            )
        return replace(cfg, **{head: tuple(pair)})
    raise ConfigError(f"unknown sweep path {path!r}")


@dataclass(frozen=True)
class SweepAxis:
    path: str
    start: float
    stop: float
    points: int
    spacing: str = "linear"  # 'linear' | 'log'

    def grid(self) -> np.ndarray:
        if self.points < 2:
            raise ConfigError(f"axis {self.path!r}: need at least 2 points")
        if self.spacing == "linear":
            return np.linspace(self.start, self.stop, self.points)
        if self.spacing == "log":
            if self.start <= 0.0 or self.stop <= 0.0:
                raise ConfigError(f"axis {self.path!r}: log spacing needs positive bounds")
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.points)
        raise ConfigError(f"axis {self.path!r}: unknown spacing {self.spacing!r}")


@dataclass(frozen=True)
class SweepSpec:
    base: OpticalConfig
    axes: tuple[SweepAxis, ...]
    quantity: str = "interaction_ratio"
    species: int = UP
    thresholds: RegimeThresholds = field(default_factory=RegimeThresholds)
    z_policy: str = "tonks"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ConfigError(
                f"unknown quantity {self.quantity!r}; available: {sorted(QUANTITIES)}"
            )
        if self.species not in (UP, DOWN):
            raise ConfigError(f"species must be 0 (up) or 1 (down), got {self.species}")
        if len(self.axes) not in (1, 2):
            raise ConfigError(f"sweeps support 1 or 2 axes, got {len(self.axes)}")
        if len(self.axes) == 2 and self.axes[0].path == self.axes[1].path:
            raise ConfigError(f"2D sweep axes must differ, both are {self.axes[0].path!r}")


@dataclass(frozen=True)
class GridResult:
    """Sweep output: values plus per-cell regime labels and singularity flags.

    values is 1D or 2D (row-major, first axis slowest); flags holds FLAG_*
    codes, and every non-finite value cell carries a nonzero flag.
    """

    axes: tuple[np.ndarray, ...]
    axis_paths: tuple[str, ...]
    values: np.ndarray
    flags: np.ndarray
    regimes: np.ndarray  # dtype object, 'interaction/mass' strings, '' if flagged
    quantity: str
    species: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        bad = ~np.isfinite(self.values) & (self.flags == FLAG_OK)
        if np.any(bad):
            raise ConfigError("grid has non-finite cells without a singularity flag")

    @property
    def n_flagged(self) -> int:
        return int(np.count_nonzero(self.flags))


def _evaluate(cfg: OpticalConfig, spec: SweepSpec) -> tuple[float, str]:
    p = derive_params(cfg)
    s = spec.species
    q = spec.quantity
    if q == "interaction_ratio":
        value = p.interaction_ratio(s)
    elif q == "beta_same":
        value = interaction_to_kinetic(p, "same")[s]
    elif q == "beta_cross":
        value = interaction_to_kinetic(p, "cross")[s]
    elif q == "beta_kinetic":
        value = kinetic_ratio(cfg, p, pulse_extent(cfg, spec.z_policy))[s]
    elif q == "chi_over_eta":
        value = chi_over_eta(p, s)
    elif q == "cutoff":
        value = momentum_cutoff(chi_over_eta(p, s), cfg.n_ph[s])
    elif q == "loss_total":
        value = loss_rates(cfg).total
    elif q == "coherence_time":
        value = loss_rates(cfg).coherence_time
    else:  # pragma: no cover - guarded by SweepSpec
        raise ConfigError(f"unknown quantity {q!r}")
    try:
        regime = classify_regime(p, spec.thresholds)
        label = f"{regime.interaction}/{regime.mass}"
    except SingularityError:
        label = "balanced"  # value may still be fine (e.g. losses)
    return float(value), label


def _cell(cfg: OpticalConfig, spec: SweepSpec, counts: dict) -> tuple[float, int, str]:
    try:
        # per-cell coupling-mismatch warnings would repeat thousands of
        # times across a grid; count them into meta instead
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            value, regime = _evaluate(cfg, spec)
        counts["chi_tm_mismatch_cells"] += sum(
            "chi_tm" in str(w.message) for w in caught
        )
        return value, FLAG_OK, regime
    except SingularityError:
        return math.nan, FLAG_BALANCED, ""
    except DomainError:
        return math.nan, FLAG_DOMAIN, ""
    except ConfigError:
        return math.nan, FLAG_BAD_DETUNING, ""


def sweep_1d(spec: SweepSpec) -> GridResult:
    if len(spec.axes) != 1:
        raise ConfigError(f"sweep_1d needs exactly one axis, got {len(spec.axes)}")
    axis = spec.axes[0]
    grid = axis.grid()
    values = np.empty(grid.size)
    flags = np.zeros(grid.size, dtype=np.int8)
    regimes = np.empty(grid.size, dtype=object)
    counts = {"chi_tm_mismatch_cells": 0}
    for i, x in enumerate(grid):
        try:
            cfg = set_by_path(spec.base, axis.path, x)
        except ConfigError:
            values[i], flags[i], regimes[i] = math.nan, FLAG_BAD_DETUNING, ""
            continue
        values[i], flags[i], regimes[i] = _cell(cfg, spec, counts)
    _require_some_ok(flags)
    return GridResult(
        axes=(grid,),
        axis_paths=(axis.path,),
        values=values,
        flags=flags,
        regimes=regimes,
        quantity=spec.quantity,
        species=spec.species,
        meta=counts,
    )


def sweep_2d(spec: SweepSpec) -> GridResult:
    if len(spec.axes) != 2:
        raise ConfigError(f"sweep_2d needs exactly two axes, got {len(spec.axes)}")
    ax0, ax1 = spec.axes
    g0, g1 = ax0.grid(), ax1.grid()
    shape = (g0.size, g1.size)
    values = np.empty(shape)
    flags = np.zeros(shape, dtype=np.int8)
    regimes = np.empty(shape, dtype=object)
    counts = {"chi_tm_mismatch_cells": 0}
    for i, x0 in enumerate(g0):
        try:
            row_cfg = set_by_path(spec.base, ax0.path, x0)
        except ConfigError:
            values[i, :], flags[i, :], regimes[i, :] = math.nan, FLAG_BAD_DETUNING, ""
            continue
        for j, x1 in enumerate(g1):
            try:
                cfg = set_by_path(row_cfg, ax1.path, x1)
            except ConfigError:
                values[i, j], flags[i, j], regimes[i, j] = math.nan, FLAG_BAD_DETUNING, ""
                continue
            values[i, j], flags[i, j], regimes[i, j] = _cell(cfg, spec, counts)
    _require_some_ok(flags)
    return GridResult(
        axes=(g0, g1),
        axis_paths=(ax0.path, ax1.path),
        values=values,
        flags=flags,
        regimes=regimes,
        quantity=spec.quantity,
        species=spec.species,
        meta=counts,
    )


def _require_some_ok(flags: np.ndarray):
    if np.all(flags != FLAG_OK):
        raise SingularityError("every cell of the sweep is singular; check the base config")


def sweep_cutoff(n_points: int, n_ph: float):
    """Cutoff curve Lambda/(pi n_ph) over chi/|eta| in [0, pi].

    Returned as a CorrelationSeries with tag='cutoff': abscissa is the
    dimensionless coupling, values the normalized cutoff (1 at 0, ~0 at pi,
    strictly decreasing in between).
    """
    from .correlations import CorrelationSeries

    if n_points < 2:
        raise ConfigError(f"n_points must be >= 2, got {n_points}")
    x = np.linspace(0.0, math.pi, n_points)
    vals = np.array([momentum_cutoff(xi, n_ph) / (math.pi * n_ph) for xi in x])
    return CorrelationSeries(
        separations=x,
        values=vals,
        chi_over_eta=None,
        cutoff=None,
        n_ph=float(n_ph),
        tag="cutoff",
    )
