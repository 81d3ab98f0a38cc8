"""Pure numpy implementations of the hot inner-loop kernels.

These mirror the compiled versions in _core.pyx operation for operation;
results agree to rounding (the C compiler may contract multiply-adds, so
bitwise equality across backends is not promised, a few ulps is). Arrays are
modified in place where documented so the call sites stay allocation-free in
the stepping loops.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"


def nonlinear_phase(pu, pd, auu, aud, adu, add, dt):
    """In-place density-dependent phase/loss factor for both species.

    pu *= exp(dt*(auu*|pu|^2 + aud*|pd|^2)), same for pd with (adu, add).
    The densities are evaluated before either field is touched. Coefficients
    are complex: imaginary part of chi enters their real part as decay.
    """
    rho_u = pu.real**2 + pu.imag**2
    rho_d = pd.real**2 + pd.imag**2
    pu *= np.exp((dt * auu) * rho_u + (dt * aud) * rho_d)
    pd *= np.exp((dt * adu) * rho_u + (dt * add) * rho_d)


def apply_kspace(fu, fd, u00, u01, u10, u11):
    """In-place 2x2 matrix application per mode: (fu, fd) <- U(k) (fu, fd)."""
    tmp_u = u00 * fu + u01 * fd
    tmp_d = u10 * fu + u11 * fd
    fu[:] = tmp_u
    fd[:] = tmp_d


def _upwind(w, lam, inv_dz):
    # backward difference for right-movers, forward for left-movers
    if lam > 0.0:
        return (w - np.roll(w, 1)) * inv_dz
    if lam < 0.0:
        return (np.roll(w, -1) - w) * inv_dz
    return np.zeros_like(w)


def _advect(f0, f1, adv, inv_dz, out0, out1):
    r00, r01, r10, r11, ri00, ri01, ri10, ri11, lam0, lam1 = adv
    w0 = ri00 * f0 + ri01 * f1
    w1 = ri10 * f0 + ri11 * f1
    d0 = _upwind(w0, lam0, inv_dz)
    d1 = _upwind(w1, lam1, inv_dz)
    out0 -= r00 * lam0 * d0 + r01 * lam1 * d1
    out1 -= r10 * lam0 * d0 + r11 * lam1 * d1


def preelim_rhs(pu, au, pd, ad, adv, loc, inv_dz, out_pu, out_au, out_pd, out_ad):
    """Full right-hand side of the two-species transport system.

    Advection of each species' (field, difference-mode) pair is evaluated by
    upwind differences along the characteristics of its constant flux matrix
    (adv row s: R, R^-1, eigenvalues, all real). Local terms use the complex
    coefficient table loc, row s = (field-field coupling, self nonlinearity,
    cross nonlinearity, difference-mode detuning, two self/cross density
    shifts of the difference mode, and its species-mixing term).

    adv: float64 (2, 10); loc: complex128 (2, 7). Outputs are overwritten.
    """
    for o in (out_pu, out_au, out_pd, out_ad):
        o[:] = 0.0
    _advect(pu, au, adv[0], inv_dz, out_pu, out_au)
    _advect(pd, ad, adv[1], inv_dz, out_pd, out_ad)

    rho_u = pu.real**2 + pu.imag**2
    rho_d = pd.real**2 + pd.imag**2

    cpl_u, selfnl_u, crossnl_u, drive_u, a_self_u, a_cross_u, a_mix_u = loc[0]
    cpl_d, selfnl_d, crossnl_d, drive_d, a_self_d, a_cross_d, a_mix_d = loc[1]

    out_pu += cpl_u * pd + (selfnl_u * rho_u + crossnl_u * rho_d) * pu
    out_pd += cpl_d * pu + (selfnl_d * rho_d + crossnl_d * rho_u) * pd
    out_au += (drive_u + a_self_u * rho_u + a_cross_u * rho_d) * au \
        + a_mix_u * np.conj(pd) * pu * ad
    out_ad += (drive_d + a_self_d * rho_d + a_cross_d * rho_u) * ad \
        + a_mix_d * np.conj(pu) * pd * au
