"""Optical knobs -> effective field-theory parameters.

A pair of counter-propagating control fields per polariton species fixes the
mixing angles

    tan^2(phi_s)   = Omega_{s,-}^2 / Omega_{s,+}^2          (field imbalance)
    tan^2(theta_s) = g^2 n_z / OmegaBar_s^2                  (collective coupling)

with OmegaBar_s^2 = (Omega_{s,+}^2 + Omega_{s,-}^2)/2, and from those the
quadratic and quartic coefficients of the two-species polariton field theory:

    v_s      = v / (pi tan^2 theta_s)                        group velocity scale
    eta_s    = -2 v_s cos(2 phi_s)                           drift (Dirac) velocity
    m_nr,s   = -hbar OmegaBar_s^2 / (4 sin^2(2 phi_s) v_s^2 Delta_s)
    m_0,s    = -hbar Omega_0 / eta_s^2
    chi_same  = 4 hbar OmegaBar_s^2 / (Delta_ss n_z)
    chi_cross = 2 hbar OmegaBar_s^2 (2 + cos(phi_sbar - phi_s)) / (Delta_ssbar n_z)

Unit convention: all Rabi frequencies and detunings enter in multiples of the
absolute linewidth ``gamma_abs`` and are converted to rad/s exactly once, here.
Derived quantities are SI (see thirrsim.constants). Signs are propagated, not
taken absolute; regime classification uses magnitudes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

from .constants import DOWN, GAMMA_DEFAULT, HBAR, SPEED_OF_LIGHT, UP, other
from .errors import ConfigError, DomainError, SingularityError

Pair = tuple[float, float]

#: Relative mismatch between the two cross couplings above which the
#: symmetrized Thirring coupling carries a warning.
CHI_TM_MISMATCH_TOL = 1e-9


def _pair(value, name: str) -> Pair:
    """Coerce a scalar or 2-sequence into an (up, down) float pair."""
    if isinstance(value, (int, float)):
        return (float(value), float(value))
    try:
        up, down = value
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a scalar or an (up, down) pair, got {value!r}")
    return (float(up), float(down))


@dataclass(frozen=True)
class OpticalConfig:
    """Laboratory-facing knobs. Frequencies in units of gamma_abs.

    Exactly one of ``g2nz`` (collective coupling g^2 n_z, units gamma_abs^2)
    and ``v_direct`` (polariton velocity v_s in m/s, per species) must be set;
    the other is derived through tan^2(theta_s).
    """

    omega_plus: Pair            # Omega_{s,+}, > 0
    omega_minus: Pair           # Omega_{s,-}, > 0
    delta: Pair                 # single-photon detuning Delta_s, signed, != 0
    delta_same: Pair            # (Delta_upup, Delta_downdown), signed, != 0
    delta_cross: Pair           # (Delta_updown, Delta_downup), signed, != 0
    omega0: float = 0.0         # ground-state coupling Omega_0 >= 0 (mass knob)
    gamma_abs: float = GAMMA_DEFAULT  # rad/s
    gamma_1d_frac: float = 0.2  # waveguide coupling fraction, metadata only
    n_z: float = 1.0e7          # atomic line density, 1/m
    g2nz: float | None = None   # g^2 n_z in gamma_abs^2
    v_direct: Pair | None = None  # v_s in m/s, overrides g2nz
    v_empty: float = SPEED_OF_LIGHT  # bare propagation speed, m/s
    n_ph: Pair = (1.0e3, 1.0e3)  # photon line density per species, 1/m
    length: float = 1.0e-2      # medium length, m
    n_photons: Pair = (10.0, 10.0)  # photon number per species

    def __post_init__(self):
        for name in ("omega_plus", "omega_minus", "delta", "delta_same",
                     "delta_cross", "n_ph", "n_photons"):
            object.__setattr__(self, name, _pair(getattr(self, name), name))
        if self.v_direct is not None:
            object.__setattr__(self, "v_direct", _pair(self.v_direct, "v_direct"))
        for name in ("omega_plus", "omega_minus"):
            for s, v in enumerate(getattr(self, name)):
                if not v > 0.0:
                    raise ConfigError(f"{name}[{s}] must be > 0, got {v}")
        for name in ("delta", "delta_same", "delta_cross"):
            for s, v in enumerate(getattr(self, name)):
                if v == 0.0:
                    raise ConfigError(f"{name}[{s}] is zero: it divides a coupling")
        if self.omega0 < 0.0:
            raise ConfigError(f"omega0 must be >= 0, got {self.omega0}")
        if not self.gamma_abs > 0.0:
            raise ConfigError(f"gamma_abs must be > 0, got {self.gamma_abs}")
        if not 0.0 <= self.gamma_1d_frac <= 1.0:
            raise ConfigError(f"gamma_1d_frac must lie in [0, 1], got {self.gamma_1d_frac}")
        if not self.n_z > 0.0:
            raise ConfigError(f"n_z must be > 0, got {self.n_z}")
        if (self.g2nz is None) == (self.v_direct is None):
            raise ConfigError("exactly one of g2nz and v_direct must be set")
        if self.g2nz is not None and not self.g2nz > 0.0:
            raise ConfigError(f"g2nz must be > 0, got {self.g2nz}")
        if self.v_direct is not None:
            for s, v in enumerate(self.v_direct):
                if not v > 0.0:
                    raise ConfigError(f"v_direct[{s}] must be > 0, got {v}")
        if not self.v_empty > 0.0:
            raise ConfigError(f"v_empty must be > 0, got {self.v_empty}")
        for name in ("n_ph", "n_photons"):
            for s, v in enumerate(getattr(self, name)):
                if not v > 0.0:
                    raise ConfigError(f"{name}[{s}] must be > 0, got {v}")
        if not self.length > 0.0:
            raise ConfigError(f"length must be > 0, got {self.length}")

    def with_(self, **changes) -> "OpticalConfig":
        """Copy with replaced fields (re-validates)."""
        return replace(self, **changes)


@dataclass(frozen=True)
class PolaritonParams:
    """Derived effective-theory parameters, SI units (angles in rad,
    omega_bar kept in gamma_abs units as a readout convenience)."""

    phi: Pair                   # rad
    theta: Pair                 # rad
    omega_bar: Pair             # units of gamma_abs
    alpha_plus: Pair            # Omega_+^2 / (Omega_+^2 + Omega_-^2)
    alpha_minus: Pair
    v: Pair                     # m/s
    eta: Pair                   # m/s, signed
    m_nr: Pair                  # kg, signed
    m_0: tuple[float | None, float | None]  # kg; None if eta_s = 0 with omega0 > 0
    chi_same: Pair              # J*m, signed
    chi_cross: Pair             # J*m, signed
    chi_same_im: Pair           # J*m, <= 0, loss correction Im(chi_same)
    chi_cross_im: Pair          # J*m, <= 0
    chi_tm: float               # J*m, 2 * symmetrized chi_cross
    omega0_abs: float           # rad/s
    gamma_abs: float            # rad/s

    def interaction_ratio(self, s: int) -> float:
        """chi_cross/chi_same for species s (signed)."""
        return self.chi_cross[s] / self.chi_same[s]

    def beta_same(self, s: int) -> float:
        """|chi_same| / (hbar |eta_s|): same-species interaction vs kinetic scale."""
        return interaction_to_kinetic(self, which="same")[s]

    def beta_cross(self, s: int) -> float:
        return interaction_to_kinetic(self, which="cross")[s]


def derive_params(cfg: OpticalConfig) -> PolaritonParams:
    """Map an OpticalConfig to the effective-theory parameters.

    This is the single place where gamma_abs-unit inputs become SI. Balanced
    control fields (eta_s = 0) are not an error here; quantities that divide
    by eta raise SingularityError at their point of use instead.
    """
    g = cfg.gamma_abs
    phi = []
    theta = []
    omega_bar = []
    alpha_plus = []
    alpha_minus = []
    v = []
    eta = []
    m_nr = []
    chi_same = []
    chi_same_im = []

    for s in (UP, DOWN):
        op2 = cfg.omega_plus[s] ** 2
        om2 = cfg.omega_minus[s] ** 2
        ob2 = 0.5 * (op2 + om2)            # OmegaBar^2 in gamma^2
        phi_s = math.atan(math.sqrt(om2 / op2))
        a_plus = op2 / (op2 + om2)
        a_minus = om2 / (op2 + om2)
        if cfg.v_direct is not None:
            v_s = cfg.v_direct[s]
            tan2theta = cfg.v_empty / (math.pi * v_s)
        else:
            tan2theta = cfg.g2nz / ob2
            v_s = cfg.v_empty / (math.pi * tan2theta)
        theta_s = math.atan(math.sqrt(tan2theta))
        # algebraic double-angle forms: exact zero for balanced fields
        cos2phi = (op2 - om2) / (op2 + om2)
        sin2phi = 2.0 * math.sqrt(op2 * om2) / (op2 + om2)
        eta_s = -2.0 * v_s * cos2phi
        ob2_abs = ob2 * g * g               # rad^2/s^2
        delta_s_abs = cfg.delta[s] * g
        delta_ss_abs = cfg.delta_same[s] * g
        m_nr_s = -HBAR * ob2_abs / (4.0 * sin2phi**2 * v_s**2 * delta_s_abs)
        chi_ss = 4.0 * HBAR * ob2_abs / (delta_ss_abs * cfg.n_z)
        chi_ss_im = -8.0 * HBAR * ob2_abs * g / (cfg.n_z * (4.0 * delta_ss_abs**2 + g * g))

        phi.append(phi_s)
        theta.append(theta_s)
        omega_bar.append(math.sqrt(ob2))
        alpha_plus.append(a_plus)
        alpha_minus.append(a_minus)
        v.append(v_s)
        eta.append(eta_s)
        m_nr.append(m_nr_s)
        chi_same.append(chi_ss)
        chi_same_im.append(chi_ss_im)

    chi_cross = []
    chi_cross_im = []
    for s in (UP, DOWN):
        sb = other(s)
        ob2_abs = (omega_bar[s] * g) ** 2
        delta_x_abs = cfg.delta_cross[s] * g
        angle = 2.0 + math.cos(phi[sb] - phi[s])
        chi_cross.append(2.0 * HBAR * ob2_abs * angle / (delta_x_abs * cfg.n_z))
        chi_cross_im.append(
            -4.0 * angle * HBAR * ob2_abs * g / (cfg.n_z * (4.0 * delta_x_abs**2 + g * g))
        )

    omega0_abs = cfg.omega0 * g
    m_0: list[float | None] = []
    for s in (UP, DOWN):
        if omega0_abs == 0.0:
            m_0.append(0.0)
        elif eta[s] == 0.0:
            m_0.append(None)
        else:
            m_0.append(-HBAR * omega0_abs / eta[s] ** 2)

    mean_cross = 0.5 * (chi_cross[UP] + chi_cross[DOWN])
    spread = abs(chi_cross[UP] - chi_cross[DOWN])
    if mean_cross != 0.0 and spread > CHI_TM_MISMATCH_TOL * abs(mean_cross):
        warnings.warn(
            "cross couplings differ between species "
            f"({chi_cross[UP]:.6e} vs {chi_cross[DOWN]:.6e}); "
            "chi_tm uses their mean",
            stacklevel=2,
        )

    return PolaritonParams(
        phi=tuple(phi),
        theta=tuple(theta),
        omega_bar=tuple(omega_bar),
        alpha_plus=tuple(alpha_plus),
        alpha_minus=tuple(alpha_minus),
        v=tuple(v),
        eta=tuple(eta),
        m_nr=tuple(m_nr),
        m_0=tuple(m_0),
        chi_same=tuple(chi_same),
        chi_cross=tuple(chi_cross),
        chi_same_im=tuple(chi_same_im),
        chi_cross_im=tuple(chi_cross_im),
        chi_tm=2.0 * mean_cross,
        omega0_abs=omega0_abs,
        gamma_abs=g,
    )


# ---------------------------------------------------------------------------
# dimensionless figures of merit


def interaction_ratio(p: PolaritonParams) -> Pair:
    """chi_cross/chi_same per species.

    Closed form: (2 + cos(phi_sbar - phi_s)) * Delta_ss / (2 Delta_ssbar).
    """
    return (p.interaction_ratio(UP), p.interaction_ratio(DOWN))


def interaction_to_kinetic(p: PolaritonParams, which: str = "same") -> Pair:
    """beta^i = |chi| / (hbar |eta_s|) per species.

    This is the normalization in which the quartic coupling enters the
    correlator exponents (chi over hbar*|eta| is dimensionless). Raises
    SingularityError for balanced control fields (eta_s = 0).
    """
    if which == "same":
        chi = p.chi_same
    elif which == "cross":
        chi = p.chi_cross
    else:
        raise ConfigError(f"which must be 'same' or 'cross', got {which!r}")
    out = []
    for s in (UP, DOWN):
        if p.eta[s] == 0.0:
            raise SingularityError(
                "balanced-field singularity: eta is zero for species "
                f"{('up', 'down')[s]}, beta^i undefined"
            )
        out.append(abs(chi[s]) / (HBAR * abs(p.eta[s])))
    return tuple(out)


def kinetic_ratio(cfg: OpticalConfig, p: PolaritonParams, z_extent) -> Pair:
    """beta^k: quadratic-to-linear kinetic energy at momentum hbar/z_extent.

    beta^k_s = sin^2(2 phi_s) v_s |Delta_s| / (|cos 2 phi_s| z_s OmegaBar_s^2)
    with frequencies absolute. z_extent is a scalar or per-species pair in
    meters. Balanced fields make the linear term vanish -> SingularityError.
    """
    z = _pair(z_extent, "z_extent")
    g = cfg.gamma_abs
    out = []
    for s in (UP, DOWN):
        if not z[s] > 0.0:
            raise ConfigError(f"z_extent[{s}] must be > 0, got {z[s]}")
        cos2phi = p.alpha_plus[s] - p.alpha_minus[s]
        if cos2phi == 0.0:
            raise SingularityError(
                "balanced-field singularity: cos(2 phi) = 0 for species "
                f"{('up', 'down')[s]}, beta^k undefined"
            )
        sin2phi_sq = 4.0 * p.alpha_plus[s] * p.alpha_minus[s]
        ob2_abs = (p.omega_bar[s] * g) ** 2
        out.append(
            sin2phi_sq * p.v[s] * abs(cfg.delta[s] * g) / (abs(cos2phi) * z[s] * ob2_abs)
        )
    return tuple(out)


def pulse_extent(cfg: OpticalConfig, policy: str = "tonks") -> Pair:
    """Characteristic pulse extent z_s for the kinetic ratio.

    'weak'  -> the full medium length L (weakly interacting pulse)
    'tonks' -> L / N_ph,s (crystal-like spacing in the hardcore regime)
    """
    if policy == "weak":
        return (cfg.length, cfg.length)
    if policy == "tonks":
        return (cfg.length / cfg.n_photons[UP], cfg.length / cfg.n_photons[DOWN])
    raise ConfigError(f"unknown z_extent policy {policy!r}")


def chi_over_eta(p: PolaritonParams, s: int = UP) -> float:
    """Thirring coupling over hbar*|eta_s|: the correlator argument."""
    if p.eta[s] == 0.0:
        raise SingularityError(
            "balanced-field singularity: eta is zero, chi/|eta| undefined"
        )
    return p.chi_tm / (HBAR * abs(p.eta[s]))


def momentum_cutoff(chi_over_eta_val: float, n_ph: float) -> float:
    """Momentum cutoff Lambda = pi n_ph sin(x)/x, x = chi/(hbar|eta|) in [0, pi].

    Continuously extended to x = 0 (free limit) where Lambda = pi n_ph. At
    x = pi the estimate vanishes (up to floating-point rounding of sin(pi)),
    and the correlator built on it degenerates; see two_point.
    """
    x = float(chi_over_eta_val)
    if not 0.0 <= x <= math.pi:
        raise DomainError(f"chi/|eta| = {x} outside the cutoff domain [0, pi]")
    if not n_ph > 0.0:
        raise ConfigError(f"n_ph must be > 0, got {n_ph}")
    if x == 0.0:
        return math.pi * n_ph
    return math.pi * n_ph * math.sin(x) / x


# ---------------------------------------------------------------------------
# losses


@dataclass(frozen=True)
class LossRates:
    """Photon loss rates in 1/s and the resulting coherence time."""

    kappa_same: Pair
    kappa_cross: Pair
    total: float
    coherence_time: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "coherence_time", 1.0 / self.total)


def loss_rates(cfg: OpticalConfig) -> LossRates:
    """Spontaneous-emission-limited loss rates.

    kappa_ss    = 8 n_ph,s OmegaBar_s^2 Gamma / (n_z (4 Delta_ss^2 + Gamma^2))
    kappa_ssbar = 4 (2 + cos(phi_sbar - phi_s)) n_ph,s OmegaBar_s^2 Gamma
                   / (n_z (4 Delta_ssbar^2 + Gamma^2))
    total = sum over species of (kappa_ss + kappa_ssbar).
    """
    g = cfg.gamma_abs
    phi = [
        math.atan(math.sqrt(cfg.omega_minus[s] ** 2 / cfg.omega_plus[s] ** 2))
        for s in (UP, DOWN)
    ]
    same = []
    cross = []
    for s in (UP, DOWN):
        sb = other(s)
        ob2_abs = 0.5 * (cfg.omega_plus[s] ** 2 + cfg.omega_minus[s] ** 2) * g * g
        d_same = cfg.delta_same[s] * g
        d_cross = cfg.delta_cross[s] * g
        angle = 2.0 + math.cos(phi[sb] - phi[s])
        same.append(
            8.0 * cfg.n_ph[s] * ob2_abs * g / (cfg.n_z * (4.0 * d_same**2 + g * g))
        )
        cross.append(
            4.0 * angle * cfg.n_ph[s] * ob2_abs * g / (cfg.n_z * (4.0 * d_cross**2 + g * g))
        )
    total = sum(same) + sum(cross)
    return LossRates(kappa_same=tuple(same), kappa_cross=tuple(cross), total=total)


# ---------------------------------------------------------------------------
# regime classification


@dataclass(frozen=True)
class RegimeThresholds:
    """Classification thresholds (exposed in the CLI config)."""

    hardcore_ratio_min: float = 10.0   # chi_same/chi_cross at least this
    hardcore_beta_min: float = 10.0    # beta^i_same at least this


@dataclass(frozen=True)
class Regime:
    interaction: str  # 'hardcore_fermionic' | 'bosonic' | 'crossover'
    mass: str         # 'massless' | 'massive'

    def as_dict(self) -> dict:
        return {"interaction": self.interaction, "mass": self.mass}


def classify_regime(p: PolaritonParams, thresholds: RegimeThresholds | None = None) -> Regime:
    """Label the interaction regime of the effective theory.

    hardcore_fermionic when, for both species, |chi_same/chi_cross| >= ratio
    threshold and beta^i_same >= beta threshold; bosonic when both of those
    ratios are <= 1 for both species; crossover otherwise. The mass label only
    checks whether the ground-state coupling is switched on.
    """
    th = thresholds or RegimeThresholds()
    beta = interaction_to_kinetic(p, which="same")
    hard = all(
        abs(p.chi_same[s] / p.chi_cross[s]) >= th.hardcore_ratio_min
        and beta[s] >= th.hardcore_beta_min
        for s in (UP, DOWN)
    )
    soft = all(
        abs(p.chi_same[s] / p.chi_cross[s]) <= 1.0 and beta[s] <= 1.0
        for s in (UP, DOWN)
    )
    if hard:
        interaction = "hardcore_fermionic"
    elif soft:
        interaction = "bosonic"
    else:
        interaction = "crossover"
    mass = "massless" if p.omega0_abs == 0.0 else "massive"
    return Regime(interaction=interaction, mass=mass)
