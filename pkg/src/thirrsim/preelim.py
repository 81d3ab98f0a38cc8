"""Coupled field/difference-mode transport before adiabatic elimination.

The stationary-light field per species is accompanied by a difference mode
A_s (the mismatch between the two counter-propagating components). The pair
obeys, with mu_s = 1 + tau_s/2, tau_s = tan^2(theta_s), c_s = cos(2 phi_s):

  mu_s dt Psi_s = -v dz[c_s Psi_s + 2 a+ a- A_s] + i (tau_s/2) W0 Psi_sbar
                  - i (2 g^2/D_ss) |Psi_s|^2 Psi_s
                  - i (g^2/D_sx) (2 + cos dphi) |Psi_sbar|^2 Psi_s
  dt A_s       = -v dz[2 Psi_s + (a- - a+) A_s] - i W_d,s A_s
                  - i (g^2/D_ss) |Psi_s|^2 A_s - i (g^2/D_sx) |Psi_sbar|^2 A_s
                  - i (g^2 r_s/D_sx) conj(Psi_sbar) Psi_s A_sbar

with W_d,s = n_z g^2 / D_s the difference-mode detuning and r_s the ratio of
the plus control fields. The advective part has a constant real 2x2 flux
matrix per species with real characteristic speeds; it is integrated by
upwind differences along the characteristics, and everything local by an
explicit midpoint step. A matched pulse (A = 0 initially) stays matched up
to the quasistatic tail ~ 2 v |k| / W_d, which shrinks with optical depth.

Both branches of the flux are neutrally stable and the local terms are pure
rotations: an injected mismatch does not decay (the system is conservative),
it only dephases. Matching statements therefore always refer to matched
initial data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import DOWN, UP, other
from .dynamics import Grid1D
from .errors import ConfigError, NumericalError, StabilityError
from .params import OpticalConfig, Pair, _pair
from . import kernels

#: CFL number for the characteristic upwinding
CFL_MAX = 0.8
#: cap on dt * max(W_d): the explicit midpoint rule is only neutrally stable
#: on the imaginary axis up to fourth order, so fast phases must stay small
STIFFNESS_MAX = 0.1


@dataclass(frozen=True)
class TransportModel:
    """Precomputed coefficient tables for the stepping kernel."""

    v: float
    mu: Pair
    tau: Pair
    alpha_plus: Pair
    alpha_minus: Pair
    omega_d: Pair
    omega0_abs: float
    adv: np.ndarray       # (2, 10) float64: R, R^-1, eigenvalues per species
    loc: np.ndarray       # (2, 7) complex128: local coefficient table
    char_speeds: np.ndarray  # (2, 2) eigenvalues of the flux matrices

    @property
    def max_speed(self) -> float:
        return float(np.max(np.abs(self.char_speeds)))


def transport_model(cfg: OpticalConfig) -> TransportModel:
    """Derive the transport coefficients from an optical configuration.

    Needs the collective coupling g^2 n_z; a v_direct configuration is
    accepted only when both species imply the same coupling.
    """
    g = cfg.gamma_abs
    ob2 = [0.5 * (cfg.omega_plus[s] ** 2 + cfg.omega_minus[s] ** 2) for s in (UP, DOWN)]
    if cfg.g2nz is not None:
        g2nz = cfg.g2nz
    else:
        implied = [cfg.v_empty / (math.pi * cfg.v_direct[s]) * ob2[s] for s in (UP, DOWN)]
        if abs(implied[0] - implied[1]) > 1e-9 * abs(implied[0]):
            raise ConfigError(
                "v_direct implies species-dependent collective coupling "
                f"({implied[0]:.6e} vs {implied[1]:.6e}); set g2nz explicitly"
            )
        g2nz = implied[0]
    g2nz_abs = g2nz * g * g
    g2_abs = g2nz_abs / cfg.n_z

    phi = [math.atan(cfg.omega_minus[s] / cfg.omega_plus[s]) for s in (UP, DOWN)]
    tau = [g2nz_abs / (ob2[s] * g * g) for s in (UP, DOWN)]
    mu = [1.0 + 0.5 * t for t in tau]
    v = cfg.v_empty
    omega0_abs = cfg.omega0 * g

    adv = np.empty((2, 10), dtype=np.float64)
    loc = np.empty((2, 7), dtype=np.complex128)
    speeds = np.empty((2, 2), dtype=np.float64)
    alpha_plus = []
    alpha_minus = []
    omega_d = []
    for s in (UP, DOWN):
        sb = other(s)
        op2 = cfg.omega_plus[s] ** 2
        om2 = cfg.omega_minus[s] ** 2
        a_plus = op2 / (op2 + om2)
        a_minus = om2 / (op2 + om2)
        c_s = a_plus - a_minus
        b = np.array([
            [v * c_s / mu[s], 2.0 * v * a_plus * a_minus / mu[s]],
            [2.0 * v, -v * c_s],
        ])
        lam, r = np.linalg.eig(b)
        if np.max(np.abs(lam.imag)) > 1e-12 * np.max(np.abs(lam)):
            raise NumericalError(f"flux matrix of species {s} lost real characteristics")
        lam = lam.real
        r = r.real
        rinv = np.linalg.inv(r)
        adv[s] = [r[0, 0], r[0, 1], r[1, 0], r[1, 1],
                  rinv[0, 0], rinv[0, 1], rinv[1, 0], rinv[1, 1],
                  lam[0], lam[1]]
        speeds[s] = lam

        w_d = g2nz_abs / (cfg.delta[s] * g)
        d_same = cfg.delta_same[s] * g
        d_cross = cfg.delta_cross[s] * g
        angle = 2.0 + math.cos(phi[sb] - phi[s])
        ratio_plus = cfg.omega_plus[sb] / cfg.omega_plus[s]
        loc[s] = [
            1j * 0.5 * tau[s] * omega0_abs / mu[s],        # coupling to Psi_sbar
            -1j * 2.0 * g2_abs / d_same / mu[s],           # self nonlinearity
            -1j * g2_abs * angle / d_cross / mu[s],        # cross nonlinearity
            -1j * w_d,                                     # difference-mode detuning
            -1j * g2_abs / d_same,                         # A self density shift
            -1j * g2_abs / d_cross,                        # A cross density shift
            -1j * g2_abs * ratio_plus / d_cross,           # A species mixing
        ]
        alpha_plus.append(a_plus)
        alpha_minus.append(a_minus)
        omega_d.append(w_d)

    return TransportModel(
        v=v,
        mu=tuple(mu),
        tau=tuple(tau),
        alpha_plus=tuple(alpha_plus),
        alpha_minus=tuple(alpha_minus),
        omega_d=tuple(omega_d),
        omega0_abs=omega0_abs,
        adv=adv,
        loc=loc,
        char_speeds=speeds,
    )


@dataclass
class TransportState:
    grid: Grid1D
    psi: np.ndarray   # (2, nx) complex128
    a: np.ndarray     # (2, nx) complex128, difference mode
    time: float = 0.0

    def __post_init__(self):
        self.psi = np.ascontiguousarray(self.psi, dtype=np.complex128)
        self.a = np.ascontiguousarray(self.a, dtype=np.complex128)
        want = (2, self.grid.nx)
        if self.psi.shape != want or self.a.shape != want:
            raise ConfigError(
                f"psi and a must have shape {want}, got {self.psi.shape}, {self.a.shape}"
            )

    def copy(self) -> "TransportState":
        return TransportState(self.grid, self.psi.copy(), self.a.copy(), self.time)

    def mismatch_ratio(self) -> float:
        """||A|| / ||Psi|| over both species (Frobenius norms)."""
        num = float(np.linalg.norm(self.a))
        den = float(np.linalg.norm(self.psi))
        if den == 0.0:
            raise ConfigError("mismatch ratio undefined for an empty field")
        return num / den


def init_matched(grid: Grid1D, center, width, amplitude=(1.0, 1.0)) -> TransportState:
    """Gaussian field pulses with zero difference mode (matched data)."""
    c = _pair(center, "center")
    w = _pair(width, "width")
    amp = _pair(amplitude, "amplitude")
    psi = np.zeros((2, grid.nx), dtype=np.complex128)
    for s in (UP, DOWN):
        if amp[s] == 0.0:
            continue
        if not w[s] > 0.0:
            raise ConfigError(f"width[{s}] must be > 0, got {w[s]}")
        psi[s] = amp[s] * np.exp(-((grid.z - c[s]) ** 2) / (2.0 * w[s] ** 2))
    return TransportState(grid, psi, np.zeros_like(psi))


def init_plus_component(grid: Grid1D, model: TransportModel, center, width,
                        amplitude=(1.0, 1.0)) -> TransportState:
    """Pulse injected purely in the plus-propagating component.

    Psi_s = alpha_+ f and A_s = f: maximally mismatched initial data, useful
    to demonstrate that mismatch does not decay by itself.
    """
    matched = init_matched(grid, center, width, amplitude)
    f = matched.psi
    psi = np.empty_like(f)
    for s in (UP, DOWN):
        psi[s] = model.alpha_plus[s] * f[s]
    return TransportState(grid, psi, f.copy())


def to_components(state: TransportState, model: TransportModel) -> tuple[np.ndarray, np.ndarray]:
    """Recompose the counter-propagating components:
    Psi_{s,+} = Psi_s + alpha_- A_s and Psi_{s,-} = Psi_s - alpha_+ A_s."""
    plus = np.empty_like(state.psi)
    minus = np.empty_like(state.psi)
    for s in (UP, DOWN):
        plus[s] = state.psi[s] + model.alpha_minus[s] * state.a[s]
        minus[s] = state.psi[s] - model.alpha_plus[s] * state.a[s]
    return plus, minus


def from_components(grid: Grid1D, model: TransportModel, plus: np.ndarray,
                    minus: np.ndarray, time: float = 0.0) -> TransportState:
    """Inverse of to_components: Psi = a+ Psi_+ + a- Psi_-, A = Psi_+ - Psi_-."""
    psi = np.empty_like(plus)
    a = np.empty_like(plus)
    for s in (UP, DOWN):
        psi[s] = model.alpha_plus[s] * plus[s] + model.alpha_minus[s] * minus[s]
        a[s] = plus[s] - minus[s]
    return TransportState(grid, psi, a, time)


@dataclass
class TransportTrajectory:
    times: np.ndarray
    ratio: np.ndarray     # ||A||/||Psi|| at the sampled times
    final: TransportState

    def windowed_rms_ratio(self, window_frac: float = 0.7) -> float:
        """RMS of the mismatch ratio over the trailing window of the run.

        window_frac is the fraction of the run treated as 'late' (counted
        from the end); the early transient is excluded.
        """
        if not 0.0 < window_frac <= 1.0:
            raise ConfigError(f"window_frac must be in (0, 1], got {window_frac}")
        t0 = self.times[-1] - window_frac * (self.times[-1] - self.times[0])
        sel = self.times >= t0
        return float(np.sqrt(np.mean(self.ratio[sel] ** 2)))


def evolve_transport(state: TransportState, model: TransportModel, dt: float,
                     n_steps: int, sample_every: int = 10,
                     enforce_stability: bool = True) -> TransportTrajectory:
    """Advance a copy of ``state`` with upwind characteristics + midpoint RK2.

    Guards: CFL number at most 0.8 on the fastest characteristic, and
    dt * max(W_d) at most 0.1 so the difference-mode phase per step stays in
    the accurate region of the explicit midpoint rule.
    """
    if not dt > 0.0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    if n_steps < 1:
        raise ConfigError(f"n_steps must be >= 1, got {n_steps}")
    if sample_every < 1:
        raise ConfigError(f"sample_every must be >= 1, got {sample_every}")
    grid = state.grid
    if enforce_stability:
        cfl = model.max_speed * dt / grid.dz
        if cfl > CFL_MAX:
            raise StabilityError(
                f"CFL number {cfl:.3f} exceeds {CFL_MAX}; shrink dt below "
                f"{CFL_MAX * grid.dz / model.max_speed:.3e}"
            )
        stiff = dt * max(abs(w) for w in model.omega_d)
        if stiff > STIFFNESS_MAX:
            raise StabilityError(
                f"dt * max|W_d| = {stiff:.3f} exceeds {STIFFNESS_MAX}; the "
                "difference mode would be underresolved"
            )

    work = state.copy()
    inv_dz = 1.0 / grid.dz
    pu, au = work.psi[0], work.a[0]
    pd, ad = work.psi[1], work.a[1]
    shape = pu.shape
    k_pu, k_au, k_pd, k_ad = (np.empty(shape, dtype=np.complex128) for _ in range(4))
    m_pu, m_au, m_pd, m_ad = (np.empty(shape, dtype=np.complex128) for _ in range(4))

    times = [work.time]
    ratios = [work.mismatch_ratio()]
    for n in range(1, n_steps + 1):
        kernels.preelim_rhs(pu, au, pd, ad, model.adv, model.loc, inv_dz,
                            k_pu, k_au, k_pd, k_ad)
        np.multiply(k_pu, 0.5 * dt, out=m_pu); m_pu += pu
        np.multiply(k_au, 0.5 * dt, out=m_au); m_au += au
        np.multiply(k_pd, 0.5 * dt, out=m_pd); m_pd += pd
        np.multiply(k_ad, 0.5 * dt, out=m_ad); m_ad += ad
        kernels.preelim_rhs(m_pu, m_au, m_pd, m_ad, model.adv, model.loc, inv_dz,
                            k_pu, k_au, k_pd, k_ad)
        pu += dt * k_pu
        au += dt * k_au
        pd += dt * k_pd
        ad += dt * k_ad
        work.time += dt
        if n % sample_every == 0 or n == n_steps:
            if not (np.all(np.isfinite(work.psi)) and np.all(np.isfinite(work.a))):
                raise NumericalError(f"transport fields went non-finite at step {n}")
            times.append(work.time)
            ratios.append(work.mismatch_ratio())
    return TransportTrajectory(
        times=np.array(times), ratio=np.array(ratios), final=work
    )


def quasistatic_ratio(model: TransportModel, k_rms: float, species: int = UP) -> float:
    """Small-mismatch estimate ||A||/||Psi|| ~ 2 v k_rms / |W_d| for matched
    pulses with spectral width k_rms."""
    w_d = abs(model.omega_d[species])
    if w_d == 0.0:
        raise ConfigError("quasistatic estimate needs a nonzero W_d")
    return 2.0 * model.v * k_rms / w_d


def matching_sweep(base: OpticalConfig, omega_d_values, grid: Grid1D, width: float,
                   t_final: float, dt_per_omega: float = 0.05,
                   window_frac: float = 0.7) -> tuple[np.ndarray, np.ndarray]:
    """Windowed mismatch statistic across a difference-mode-detuning sweep.

    Each W_d target (given in units of the linewidth, like every config
    detuning) is reached by adjusting the single-photon detuning of the base
    config (W_d = g^2 n_z / Delta). Returns (omega_d array, rms ratio array).
    dt scales as dt_per_omega / W_d per point, keeping the phase per step
    fixed while the CFL margin grows with W_d.
    """
    g2nz = base.g2nz
    if g2nz is None:
        raise ConfigError("matching_sweep needs a g2nz-style base config")
    out = []
    targets = np.asarray(list(omega_d_values), dtype=float)
    if targets.size == 0 or np.any(targets <= 0.0):
        raise ConfigError("omega_d values must be positive and nonempty")
    for w_d in targets:
        delta = g2nz / w_d  # in gamma units: W_d = g2nz_abs / (delta gamma)
        cfg = base.with_(delta=(delta, delta))
        model = transport_model(cfg)
        dt = dt_per_omega / w_d / cfg.gamma_abs
        n_steps = max(1, int(round(t_final / dt)))
        state = init_matched(grid, center=0.5 * grid.length, width=width)
        traj = evolve_transport(state, model, dt, n_steps)
        out.append(traj.windowed_rms_ratio(window_frac))
    return targets, np.array(out)
