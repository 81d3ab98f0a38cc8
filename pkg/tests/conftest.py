"""Shared scenario configs for the test suite.

The mirror config tilts the two control fields oppositely for the two
species, which makes the drift velocities exactly opposite (+-0.8 m/s at
v = 100 m/s and cos(2 phi) = +-0.004) and keeps OmegaBar = 1.5 gamma for
both. The balanced config has no tilt at all (eta = 0, the singular case).
"""

import math

from thirrsim import OpticalConfig

# Omega_+- chosen so that OmegaBar^2 = 2.25 gamma^2 and cos(2 phi) = 0.004
# exactly: Omega_+^2 = 2.25 * 1.004, Omega_-^2 = 2.25 * 0.996.
OMEGA_HI = math.sqrt(2.25 * 1.004)
OMEGA_LO = math.sqrt(2.25 * 0.996)


def mirror_config(**over) -> OpticalConfig:
    kw = dict(
        omega_plus=(OMEGA_HI, OMEGA_LO),
        omega_minus=(OMEGA_LO, OMEGA_HI),
        delta=(10.0, 10.0),
        delta_same=(1.0, 1.0),
        delta_cross=(15.0, 15.0),
        v_direct=(100.0, 100.0),
        n_z=1.0e7,
        n_ph=(1.0e3, 1.0e3),
        length=1.0e-2,
        n_photons=(10.0, 10.0),
    )
    kw.update(over)
    return OpticalConfig(**kw)


def balanced_config(**over) -> OpticalConfig:
    kw = dict(
        omega_plus=(1.5, 1.5),
        omega_minus=(1.5, 1.5),
        delta=(10.0, 10.0),
        delta_same=(4.0, 4.0),
        delta_cross=(4.0, 4.0),
        v_direct=(100.0, 100.0),
        n_z=1.0e7,
        n_ph=(1.0e3, 1.0e3),
    )
    kw.update(over)
    return OpticalConfig(**kw)
