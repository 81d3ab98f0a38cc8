# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner-loop kernels. Mirrors pure.py; see that module for docs."""

import numpy as np

cimport cython

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)

NAME = "compiled"


def nonlinear_phase(double complex[::1] pu, double complex[::1] pd,
                    double complex auu, double complex aud,
                    double complex adu, double complex add, double dt):
    cdef Py_ssize_t i, n = pu.shape[0]
    cdef double ru, rd
    cdef double complex eu, ed
    if pd.shape[0] != n:
        raise ValueError("species arrays must have equal length")
    for i in range(n):
        ru = pu[i].real * pu[i].real + pu[i].imag * pu[i].imag
        rd = pd[i].real * pd[i].real + pd[i].imag * pd[i].imag
        eu = cexp(dt * (auu * ru + aud * rd))
        ed = cexp(dt * (adu * ru + add * rd))
        pu[i] = pu[i] * eu
        pd[i] = pd[i] * ed


def apply_kspace(double complex[::1] fu, double complex[::1] fd,
                 double complex[::1] u00, double complex[::1] u01,
                 double complex[::1] u10, double complex[::1] u11):
    cdef Py_ssize_t i, n = fu.shape[0]
    cdef double complex a, b
    if fd.shape[0] != n or u00.shape[0] != n:
        raise ValueError("mode arrays must have equal length")
    for i in range(n):
        a = u00[i] * fu[i] + u01[i] * fd[i]
        b = u10[i] * fu[i] + u11[i] * fd[i]
        fu[i] = a
        fd[i] = b


cdef inline void _advect(double complex[::1] f0, double complex[::1] f1,
                         double[:] adv, double inv_dz,
                         double complex[::1] out0, double complex[::1] out1):
    cdef Py_ssize_t i, im, ip, n = f0.shape[0]
    cdef double r00 = adv[0], r01 = adv[1], r10 = adv[2], r11 = adv[3]
    cdef double ri00 = adv[4], ri01 = adv[5], ri10 = adv[6], ri11 = adv[7]
    cdef double lam0 = adv[8], lam1 = adv[9]
    cdef double complex w0, w1, w0n, w1n, d0, d1
    for i in range(n):
        w0 = ri00 * f0[i] + ri01 * f1[i]
        w1 = ri10 * f0[i] + ri11 * f1[i]
        if lam0 > 0.0:
            im = i - 1 if i > 0 else n - 1
            w0n = ri00 * f0[im] + ri01 * f1[im]
            d0 = (w0 - w0n) * inv_dz
        elif lam0 < 0.0:
            ip = i + 1 if i + 1 < n else 0
            w0n = ri00 * f0[ip] + ri01 * f1[ip]
            d0 = (w0n - w0) * inv_dz
        else:
            d0 = 0.0
        if lam1 > 0.0:
            im = i - 1 if i > 0 else n - 1
            w1n = ri10 * f0[im] + ri11 * f1[im]
            d1 = (w1 - w1n) * inv_dz
        elif lam1 < 0.0:
            ip = i + 1 if i + 1 < n else 0
            w1n = ri10 * f0[ip] + ri11 * f1[ip]
            d1 = (w1n - w1) * inv_dz
        else:
            d1 = 0.0
        out0[i] = out0[i] - (r00 * lam0 * d0 + r01 * lam1 * d1)
        out1[i] = out1[i] - (r10 * lam0 * d0 + r11 * lam1 * d1)


def preelim_rhs(double complex[::1] pu, double complex[::1] au,
                double complex[::1] pd, double complex[::1] ad,
                double[:, :] adv, double complex[:, :] loc, double inv_dz,
                double complex[::1] out_pu, double complex[::1] out_au,
                double complex[::1] out_pd, double complex[::1] out_ad):
    cdef Py_ssize_t i, n = pu.shape[0]
    cdef double ru, rd
    cdef double complex cpl_u = loc[0, 0], selfnl_u = loc[0, 1]
    cdef double complex crossnl_u = loc[0, 2], drive_u = loc[0, 3]
    cdef double complex a_self_u = loc[0, 4], a_cross_u = loc[0, 5]
    cdef double complex a_mix_u = loc[0, 6]
    cdef double complex cpl_d = loc[1, 0], selfnl_d = loc[1, 1]
    cdef double complex crossnl_d = loc[1, 2], drive_d = loc[1, 3]
    cdef double complex a_self_d = loc[1, 4], a_cross_d = loc[1, 5]
    cdef double complex a_mix_d = loc[1, 6]
    for i in range(n):
        out_pu[i] = 0.0
        out_au[i] = 0.0
        out_pd[i] = 0.0
        out_ad[i] = 0.0
    _advect(pu, au, adv[0], inv_dz, out_pu, out_au)
    _advect(pd, ad, adv[1], inv_dz, out_pd, out_ad)
    for i in range(n):
        ru = pu[i].real * pu[i].real + pu[i].imag * pu[i].imag
        rd = pd[i].real * pd[i].real + pd[i].imag * pd[i].imag
        out_pu[i] = out_pu[i] + cpl_u * pd[i] \
            + (selfnl_u * ru + crossnl_u * rd) * pu[i]
        out_pd[i] = out_pd[i] + cpl_d * pu[i] \
            + (selfnl_d * rd + crossnl_d * ru) * pd[i]
        out_au[i] = out_au[i] + (drive_u + a_self_u * ru + a_cross_u * rd) * au[i] \
            + a_mix_u * pd[i].conjugate() * pu[i] * ad[i]
        out_ad[i] = out_ad[i] + (drive_d + a_self_d * rd + a_cross_d * ru) * ad[i] \
            + a_mix_d * pu[i].conjugate() * pd[i] * au[i]
