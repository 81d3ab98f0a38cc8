"""Split-step spectral integration of the two-species mean field.

The equations of motion per species s (sbar the other species):

    i hbar dt Psi_s = -(hbar^2 / 2 m_nr,s) dz^2 Psi_s
                      + i hbar eta_s dz Psi_s
                      + hbar Omega_0 Psi_sbar
                      + chi_ss |Psi_s|^2 Psi_s + chi_x |Psi_sbar|^2 Psi_s

on a periodic grid. One step is Strang-split: an exact half rotation under the
density terms (plus the loss factor from the imaginary chi parts), an exact
full linear step in k space through a precomputed 2x2 matrix exponential per
mode, and a second density half rotation. Both halves of the split are exact
maps, so the only error is the operator splitting itself (second order in dt).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .constants import DOWN, HBAR, UP
from .errors import ConfigError, NumericalError, StabilityError
from .params import Pair, PolaritonParams, _pair
from . import kernels


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [0, length)."""

    length: float
    nx: int

    def __post_init__(self):
        if not self.length > 0.0:
            raise ConfigError(f"grid length must be > 0, got {self.length}")
        n = self.nx
        if n < 8 or (n & (n - 1)) != 0:
            raise ConfigError(f"nx must be a power of two >= 8, got {n}")

    @property
    def dz(self) -> float:
        return self.length / self.nx

    @cached_property
    def z(self) -> np.ndarray:
        return np.arange(self.nx) * self.dz

    @cached_property
    def k(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.nx, d=self.dz)


@dataclass(frozen=True)
class MeanFieldCoefficients:
    """Coefficients of the equations of motion, in any consistent unit system
    (set hbar=1 for model units). chi_cross is the symmetrized cross coupling
    (the species-asymmetric raw values would break energy conservation)."""

    m_nr: Pair
    eta: Pair
    omega0: float = 0.0            # rad per time unit
    chi_same: Pair = (0.0, 0.0)
    chi_cross: float = 0.0
    chi_same_im: Pair = (0.0, 0.0)
    chi_cross_im: Pair = (0.0, 0.0)
    hbar: float = HBAR

    def __post_init__(self):
        for name in ("m_nr", "eta", "chi_same", "chi_same_im", "chi_cross_im"):
            object.__setattr__(self, name, _pair(getattr(self, name), name))
        for s in (UP, DOWN):
            if self.m_nr[s] == 0.0:
                raise ConfigError(f"m_nr[{s}] must be nonzero")
            if self.chi_same_im[s] > 0.0 or self.chi_cross_im[s] > 0.0:
                raise ConfigError("imaginary chi parts must be <= 0 (loss)")
        if self.omega0 < 0.0:
            raise ConfigError(f"omega0 must be >= 0, got {self.omega0}")
        if not self.hbar > 0.0:
            raise ConfigError(f"hbar must be > 0, got {self.hbar}")

    @classmethod
    def from_params(cls, p: PolaritonParams, lossy: bool = False) -> "MeanFieldCoefficients":
        """Pull the coefficient set out of derived polariton parameters."""
        return cls(
            m_nr=p.m_nr,
            eta=p.eta,
            omega0=p.omega0_abs,
            chi_same=p.chi_same,
            chi_cross=0.5 * p.chi_tm,
            chi_same_im=p.chi_same_im if lossy else (0.0, 0.0),
            chi_cross_im=p.chi_cross_im if lossy else (0.0, 0.0),
            hbar=HBAR,
        )

    @property
    def lossless(self) -> bool:
        return all(v == 0.0 for v in (*self.chi_same_im, *self.chi_cross_im))


@dataclass
class FieldState:
    """Two complex fields on a shared grid at one instant."""

    grid: Grid1D
    psi: np.ndarray  # (2, nx) complex128
    time: float = 0.0

    def __post_init__(self):
        psi = np.ascontiguousarray(self.psi, dtype=np.complex128)
        if psi.shape != (2, self.grid.nx):
            raise ConfigError(
                f"psi must have shape (2, {self.grid.nx}), got {psi.shape}"
            )
        self.psi = psi

    def copy(self) -> "FieldState":
        return FieldState(self.grid, self.psi.copy(), self.time)

    def densities(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norms(self) -> np.ndarray:
        """Integral of the density per species."""
        return self.densities().sum(axis=1) * self.grid.dz


def init_gaussian(grid: Grid1D, center, width, k0=(0.0, 0.0),
                  n_photons=(1.0, 1.0)) -> FieldState:
    """Gaussian wave packets, one per species.

    ``width`` is the amplitude Gaussian width w (envelope exp(-(z-z0)^2/2w^2)),
    so the density has standard deviation w/sqrt(2). Each species is
    normalized to integral n_photons[s]; set n_photons[s] = 0 to leave the
    species empty. k0 boosts each packet.
    """
    c = _pair(center, "center")
    w = _pair(width, "width")
    k = _pair(k0, "k0")
    n = []
    for s, val in enumerate(_pair(n_photons, "n_photons")):
        if val < 0.0:
            raise ConfigError(f"n_photons[{s}] must be >= 0, got {val}")
        n.append(val)
    psi = np.zeros((2, grid.nx), dtype=np.complex128)
    for s in (UP, DOWN):
        if n[s] == 0.0:
            continue
        if not w[s] > 0.0:
            raise ConfigError(f"width[{s}] must be > 0, got {w[s]}")
        env = np.exp(-((grid.z - c[s]) ** 2) / (2.0 * w[s] ** 2))
        norm = (np.abs(env) ** 2).sum() * grid.dz
        psi[s] = math.sqrt(n[s] / norm) * env * np.exp(1j * k[s] * grid.z)
    return FieldState(grid, psi)


def init_uniform(grid: Grid1D, density=(1.0, 1.0)) -> FieldState:
    d = _pair(density, "density")
    psi = np.zeros((2, grid.nx), dtype=np.complex128)
    for s in (UP, DOWN):
        if d[s] < 0.0:
            raise ConfigError(f"density[{s}] must be >= 0, got {d[s]}")
        psi[s] = math.sqrt(d[s])
    return FieldState(grid, psi)


def init_plane_wave(grid: Grid1D, k_index=(1, 0), amplitude=(1.0, 0.0)) -> FieldState:
    """Single Fourier mode per species; k_index counts grid modes (signed)."""
    ki = _pair(k_index, "k_index")
    amp = _pair(amplitude, "amplitude")
    psi = np.zeros((2, grid.nx), dtype=np.complex128)
    for s in (UP, DOWN):
        kval = 2.0 * math.pi * ki[s] / grid.length
        psi[s] = amp[s] * np.exp(1j * kval * grid.z)
    return FieldState(grid, psi)


# ---------------------------------------------------------------------------
# linear propagator


def linear_frequencies(coeffs: MeanFieldCoefficients, k,
                       include_quadratic: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal frequencies omega_s(k) = hbar k^2/(2 m_s) [if enabled] - eta_s k."""
    k = np.asarray(k, dtype=float)
    out = []
    for s in (UP, DOWN):
        w = -coeffs.eta[s] * k
        if include_quadratic:
            w = w + coeffs.hbar * k * k / (2.0 * coeffs.m_nr[s])
        out.append(w)
    return out[0], out[1]


def dispersion_branches(coeffs: MeanFieldCoefficients, k,
                        include_quadratic: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Eigenfrequencies of the 2x2 linear problem: a(k) +- r(k).

    For opposite drifts and no quadratic term this is the two-branch Dirac
    dispersion -+sqrt(eta^2 k^2 + Omega_0^2).
    """
    wu, wd = linear_frequencies(coeffs, k, include_quadratic)
    a = 0.5 * (wu + wd)
    r = np.sqrt((0.5 * (wu - wd)) ** 2 + coeffs.omega0**2)
    return a - r, a + r


class _LinearPropagator:
    """Precomputed exp(-i dt M(k)) with M = [[w_u, O0], [O0, w_d]].

    Through a(k) = (w_u + w_d)/2, d(k) = (w_u - w_d)/2, r = sqrt(d^2 + O0^2):
    U = e^{-i a dt} [cos(r dt) I - i sin(r dt) (d sz + O0 sx)/r].
    """

    def __init__(self, coeffs: MeanFieldCoefficients, grid: Grid1D, dt: float,
                 include_quadratic: bool):
        wu, wd = linear_frequencies(coeffs, grid.k, include_quadratic)
        a = 0.5 * (wu + wd)
        d = 0.5 * (wu - wd)
        o0 = coeffs.omega0
        r = np.sqrt(d * d + o0 * o0)
        phase = np.exp(-1j * dt * a)
        cos = np.cos(r * dt)
        # sin(r dt)/r is finite at r = 0 (limit dt); guard the division
        safe = np.where(r == 0.0, 1.0, r)
        sinc = np.where(r == 0.0, dt, np.sin(r * dt) / safe)
        self.u00 = np.ascontiguousarray(phase * (cos - 1j * sinc * d))
        self.u11 = np.ascontiguousarray(phase * (cos + 1j * sinc * d))
        off = phase * (-1j * sinc * o0)
        self.u01 = np.ascontiguousarray(off)
        self.u10 = np.ascontiguousarray(off.copy())

    def apply(self, fu: np.ndarray, fd: np.ndarray):
        kernels.apply_kspace(fu, fd, self.u00, self.u01, self.u10, self.u11)


# ---------------------------------------------------------------------------
# stepping


@dataclass(frozen=True)
class EvolutionSpec:
    dt: float
    n_steps: int
    include_quadratic: bool = True
    enforce_stability: bool = True
    sample_every: int = 0   # 0: keep only the endpoint
    check_every: int = 100  # NaN screening period, 0 disables

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.n_steps < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.sample_every < 0 or self.check_every < 0:
            raise ConfigError("sample_every and check_every must be >= 0")


@dataclass
class Trajectory:
    times: np.ndarray
    fields: list          # snapshots (2, nx), including t=0 when sampling
    final: FieldState

    def field_mode(self, species: int, k_index: int) -> np.ndarray:
        """Time series of one Fourier mode over the stored snapshots."""
        nx = self.final.grid.nx
        return np.array(
            [np.fft.fft(f[species])[k_index % nx] / nx for f in self.fields]
        )


def stability_limit(coeffs: MeanFieldCoefficients, grid: Grid1D, rho_max: float,
                    include_quadratic: bool = True) -> float:
    """Largest dt the accuracy heuristics allow (0.5x the tightest scale).

    Scales considered per species: the quadratic phase at the grid's maximum
    wavenumber, drift transit of one cell, the nonlinear phase at peak
    density, and a twentieth of the mass-coupling period.
    """
    hbar = coeffs.hbar
    limits = []
    for s in (UP, DOWN):
        if include_quadratic:
            limits.append(2.0 * math.pi * abs(coeffs.m_nr[s]) * grid.dz**2
                          / (hbar * math.pi**2))
        if coeffs.eta[s] != 0.0:
            limits.append(grid.dz / abs(coeffs.eta[s]))
        chi_max = max(abs(coeffs.chi_same[s]), abs(coeffs.chi_cross),
                      abs(coeffs.chi_same_im[s]), abs(coeffs.chi_cross_im[s]))
        if chi_max > 0.0 and rho_max > 0.0:
            limits.append(hbar / (chi_max * rho_max))
    if coeffs.omega0 > 0.0:
        limits.append((2.0 * math.pi / coeffs.omega0) / 20.0)
    if not limits:
        return math.inf
    return 0.5 * min(limits)


def evolve(state: FieldState, coeffs: MeanFieldCoefficients,
           spec: EvolutionSpec) -> Trajectory:
    """Advance a copy of ``state`` by n_steps of size dt.

    Raises StabilityError when dt exceeds the stability_limit heuristic
    (unless enforce_stability is off) and NumericalError when the fields
    go non-finite mid-run.
    """
    work = state.copy()
    rho_max = float(work.densities().max())
    if spec.enforce_stability:
        dt_max = stability_limit(coeffs, work.grid, rho_max, spec.include_quadratic)
        if spec.dt > dt_max:
            raise StabilityError(
                f"dt = {spec.dt:.3e} exceeds the stability limit {dt_max:.3e}; "
                "shrink dt or pass enforce_stability=False"
            )

    hbar = coeffs.hbar
    auu = (-1j * coeffs.chi_same[UP] + coeffs.chi_same_im[UP]) / hbar
    aud = (-1j * coeffs.chi_cross + coeffs.chi_cross_im[UP]) / hbar
    adu = (-1j * coeffs.chi_cross + coeffs.chi_cross_im[DOWN]) / hbar
    add = (-1j * coeffs.chi_same[DOWN] + coeffs.chi_same_im[DOWN]) / hbar
    prop = _LinearPropagator(coeffs, work.grid, spec.dt, spec.include_quadratic)

    pu, pd = work.psi[0], work.psi[1]
    half = 0.5 * spec.dt
    times = [work.time]
    fields = [work.psi.copy()] if spec.sample_every else []

    for n in range(1, spec.n_steps + 1):
        kernels.nonlinear_phase(pu, pd, auu, aud, adu, add, half)
        fu = np.fft.fft(pu)
        fd = np.fft.fft(pd)
        prop.apply(fu, fd)
        pu[:] = np.fft.ifft(fu)
        pd[:] = np.fft.ifft(fd)
        kernels.nonlinear_phase(pu, pd, auu, aud, adu, add, half)
        work.time += spec.dt
        if spec.check_every and n % spec.check_every == 0:
            if not np.all(np.isfinite(work.psi)):
                raise NumericalError(f"field went non-finite at step {n}")
        if spec.sample_every and (n % spec.sample_every == 0 or n == spec.n_steps):
            times.append(work.time)
            fields.append(work.psi.copy())

    if not np.all(np.isfinite(work.psi)):
        raise NumericalError("field went non-finite during evolution")
    if not spec.sample_every:
        times = [work.time]
        fields = [work.psi.copy()]
    return Trajectory(times=np.array(times), fields=fields, final=work)


# ---------------------------------------------------------------------------
# measurements


def measure(state: FieldState, coeffs: MeanFieldCoefficients,
            include_quadratic: bool = True) -> dict:
    """Norms, centroids, widths, and the energy decomposition."""
    g = state.grid
    dz = g.dz
    rho = state.densities()
    norms = rho.sum(axis=1) * dz
    out = {"time": state.time, "norm_up": norms[UP], "norm_down": norms[DOWN]}
    for s, name in ((UP, "up"), (DOWN, "down")):
        if norms[s] > 0.0:
            zbar = float((g.z * rho[s]).sum() * dz / norms[s])
            var = float(((g.z - zbar) ** 2 * rho[s]).sum() * dz / norms[s])
            out[f"centroid_{name}"] = zbar
            out[f"width_{name}"] = math.sqrt(max(var, 0.0))
        else:
            out[f"centroid_{name}"] = math.nan
            out[f"width_{name}"] = math.nan
    out.update(energies(state, coeffs, include_quadratic))
    out["peak_density"] = float(rho.max())
    return out


def energies(state: FieldState, coeffs: MeanFieldCoefficients,
             include_quadratic: bool = True) -> dict:
    """Energy decomposition of the lossless Hamiltonian (spectral derivatives)."""
    g = state.grid
    hbar = coeffs.hbar
    weight = g.dz / g.nx  # Parseval: integral dz |f|^2 = weight * sum_k |fhat|^2
    e_kin = 0.0
    e_dirac = 0.0
    for s in (UP, DOWN):
        fhat2 = np.abs(np.fft.fft(state.psi[s])) ** 2
        if include_quadratic:
            e_kin += hbar**2 / (2.0 * coeffs.m_nr[s]) * weight * float(
                (g.k**2 * fhat2).sum()
            )
        e_dirac += -hbar * coeffs.eta[s] * weight * float((g.k * fhat2).sum())
    rho = state.densities()
    overlap = state.psi[0].conj() * state.psi[1]
    e_mass = 2.0 * hbar * coeffs.omega0 * float(overlap.real.sum()) * g.dz
    e_int = float(
        sum(0.5 * coeffs.chi_same[s] * (rho[s] ** 2).sum() for s in (UP, DOWN))
        + coeffs.chi_cross * (rho[UP] * rho[DOWN]).sum()
    ) * g.dz
    total = e_kin + e_dirac + e_mass + e_int
    return {
        "energy_kinetic": e_kin,
        "energy_dirac": e_dirac,
        "energy_mass": e_mass,
        "energy_interaction": e_int,
        "energy_total": total,
    }


def gaussian_width(sigma0: float, t, m: float, hbar: float = HBAR):
    """Density-width spreading law of a free Gaussian packet:
    sigma(t) = sigma0 sqrt(1 + (hbar t / (2 m sigma0^2))^2)."""
    t = np.asarray(t, dtype=float)
    return sigma0 * np.sqrt(1.0 + (hbar * t / (2.0 * m * sigma0**2)) ** 2)


# ---------------------------------------------------------------------------
# detection rotations


def rotated_densities(state: FieldState) -> dict:
    """Densities in the two rotated measurement bases.

    x+- = (up +- down)/sqrt2 and y+- = (up -+ i down)/sqrt2. Their density
    differences recover the transverse spin components.
    """
    pu, pd = state.psi[0], state.psi[1]
    s = 1.0 / math.sqrt(2.0)
    return {
        "x_plus": np.abs(s * (pu + pd)) ** 2,
        "x_minus": np.abs(s * (pu - pd)) ** 2,
        "y_plus": np.abs(s * (pu - 1j * pd)) ** 2,
        "y_minus": np.abs(s * (pu + 1j * pd)) ** 2,
    }


def spin_plus_from_rotated(rotated: dict) -> np.ndarray:
    """S^+(z) = [(rho_x+ - rho_x-) + i (rho_y+ - rho_y-)] / 2."""
    return 0.5 * (
        (rotated["x_plus"] - rotated["x_minus"])
        + 1j * (rotated["y_plus"] - rotated["y_minus"])
    )


def spin_plus_direct(state: FieldState) -> np.ndarray:
    """S^+(z) = conj(psi_up) psi_down, the quantity the rotations measure."""
    return state.psi[0].conj() * state.psi[1]


# ---------------------------------------------------------------------------
# mode analysis


def prony_modes(series: np.ndarray, dt: float, n_modes: int = 2) -> np.ndarray:
    """Frequencies of a sum of n complex exponentials from uniform samples.

    Linear prediction: fit f[n+m] = sum_j c_j f[n+j] over the series, take
    the roots of the prediction polynomial, and read the frequencies from
    their angles (range (-pi/dt, pi/dt]). Returns them sorted ascending.
    """
    f = np.asarray(series, dtype=complex)
    m = int(n_modes)
    if m < 1:
        raise ConfigError(f"n_modes must be >= 1, got {n_modes}")
    if f.ndim != 1 or f.size < 2 * m + 1:
        raise ConfigError(
            f"need a 1D series with at least {2 * m + 1} samples, got {f.shape}"
        )
    rows = f.size - m
    a = np.empty((rows, m), dtype=complex)
    for j in range(m):
        a[:, j] = f[j:j + rows]
    b = f[m:]
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    poly = np.concatenate(([1.0], -sol[::-1]))  # z^m - c_{m-1} z^{m-1} - ...
    roots = np.roots(poly)
    if np.any(np.abs(roots) < 1e-12):
        raise NumericalError("degenerate mode extraction: vanishing root")
    freqs = -np.angle(roots) / dt  # samples go as exp(-i w n dt)
    return np.sort(freqs)
