"""thirrsim: stationary-light polariton simulator.

Subsystems:

* params        optical knobs -> effective-theory parameters, losses, regimes
* sweeps        1D/2D parameter scans with singularity flagging
* correlations  exact power-law correlators of the massless interacting theory
* dynamics      split-step spectral integration of the two-species mean field
* preelim       coupled symmetric/antisymmetric field system before adiabatic
                elimination (pulse-matching checks)
* lattice       two-species bosonic exact diagonalization and oracles
* cli           JSON-config command-line front end with manifested outputs
"""

__version__ = "0.1.0"

from .constants import DOWN, GAMMA_DEFAULT, HBAR, SPEED_OF_LIGHT, UP
from .errors import (
    ConfigError,
    DomainError,
    NumericalError,
    SingularityError,
    StabilityError,
    ThirrsimError,
)
from .params import (
    LossRates,
    OpticalConfig,
    PolaritonParams,
    Regime,
    RegimeThresholds,
    chi_over_eta,
    classify_regime,
    derive_params,
    interaction_ratio,
    interaction_to_kinetic,
    kinetic_ratio,
    loss_rates,
    momentum_cutoff,
    pulse_extent,
)

__all__ = [
    "__version__",
    "UP",
    "DOWN",
    "HBAR",
    "SPEED_OF_LIGHT",
    "GAMMA_DEFAULT",
    "ThirrsimError",
    "ConfigError",
    "DomainError",
    "SingularityError",
    "NumericalError",
    "StabilityError",
    "OpticalConfig",
    "PolaritonParams",
    "LossRates",
    "Regime",
    "RegimeThresholds",
    "derive_params",
    "interaction_ratio",
    "interaction_to_kinetic",
    "kinetic_ratio",
    "pulse_extent",
    "chi_over_eta",
    "momentum_cutoff",
    "loss_rates",
    "classify_regime",
]
