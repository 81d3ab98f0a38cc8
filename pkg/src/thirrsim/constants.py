"""Physical constants and unit conventions.

Frequencies in configuration objects are dimensionless multiples of the
absolute excited-state linewidth ``gamma_abs`` (rad/s); the single conversion
to SI happens inside :func:`thirrsim.params.derive_params`. Everything a
downstream consumer sees (masses, couplings, velocities) is SI:

* velocities            m/s
* masses                kg
* contact couplings     J*m   (energy density is chi * |psi|^2 with |psi|^2 in 1/m)
* rates                 1/s
"""

from scipy.constants import c as SPEED_OF_LIGHT  # m/s
from scipy.constants import hbar as HBAR  # J*s
from scipy.constants import pi

#: Default absolute linewidth, rad/s. The rubidium D2 value 2*pi*6.07 MHz;
#: every Gamma-unit input is multiplied by this unless the config overrides it.
GAMMA_DEFAULT = 2.0 * pi * 6.07e6

UP = 0
DOWN = 1
SPECIES = ("up", "down")


def other(s: int) -> int:
    """Index of the opposite species."""
    return 1 - s


__all__ = [
    "HBAR",
    "SPEED_OF_LIGHT",
    "GAMMA_DEFAULT",
    "UP",
    "DOWN",
    "SPECIES",
    "other",
]
