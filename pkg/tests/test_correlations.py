"""Correlator checks: closed forms, slope oracles, n-point consistency."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thirrsim import ConfigError, DomainError, SingularityError, momentum_cutoff
from thirrsim.correlations import (
    CorrelationSeries,
    correlation_exponent,
    two_point_series,
    fitted_exponent,
    n_point,
    two_point,
)

N_PH = 1.0e3


def test_exponent_closed_points():
    assert correlation_exponent(0.0) == -1.0
    assert correlation_exponent(math.pi) == pytest.approx(-0.5, abs=1e-15)
    assert correlation_exponent(math.pi / 2) == pytest.approx(-2.0 / 3.0, abs=1e-15)
    with pytest.raises(DomainError):
        correlation_exponent(-0.1)


def test_free_limit_is_inverse_square():
    # at x = 0 the cutoff cancels: G = 1/(4 d^2) exactly
    d = np.array([1e-4, 3e-3, 0.02, 1.7])
    g = two_point(d, 0.0, N_PH)
    assert np.allclose(g, 1.0 / (4.0 * d * d), rtol=1e-14)
    assert two_point(0.01, 0.0, N_PH) == pytest.approx(2500.0, rel=1e-14)


def test_value_at_unit_cutoff_separation():
    # at Lambda d = 1 the bracket is 1 and G = Lambda^2/4 regardless of x
    for x in (0.0, 0.7, math.pi / 2, 3.0):
        lam = momentum_cutoff(x, N_PH)
        assert two_point(1.0 / lam, x, N_PH) == pytest.approx(lam**2 / 4.0, rel=1e-12)


def test_slope_matches_exponent_by_two_point_ratio():
    # a pure power law fixes the slope from any two separations exactly:
    # slope = [ln G(d2) - ln G(d1)] / [ln(L^2 d2^2) - ln(L^2 d1^2)]
    for x in (0.0, math.pi / 4, math.pi / 2, 0.9 * math.pi, math.pi):
        lam = momentum_cutoff(x, N_PH) if x < math.pi else 123.0
        d1, d2 = 2.0e-3, 0.31
        g1 = two_point(d1, x, N_PH, cutoff=lam)
        g2 = two_point(d2, x, N_PH, cutoff=lam)
        slope = (math.log(g2) - math.log(g1)) / (
            math.log(lam**2 * d2**2) - math.log(lam**2 * d1**2)
        )
        assert slope == pytest.approx(correlation_exponent(x), rel=1e-12)


def test_cutoff_override_and_degenerate_edge():
    # the derived cutoff at x = pi is floating-point tiny but still positive,
    # so the power law survives; overriding it just rescales the amplitude
    lam_derived = momentum_cutoff(math.pi, N_PH)
    assert 0.0 < lam_derived < 1e-12 * math.pi * N_PH
    g_tiny = two_point(0.01, math.pi, N_PH)
    assert g_tiny > 0.0
    g_ovr = two_point(0.01, math.pi, N_PH, cutoff=50.0)
    assert g_ovr == pytest.approx(50.0 / 4.0 / 0.01, rel=1e-12)  # (2+2p)=1 at p=-1/2
    assert two_point(0.01, 0.3, N_PH, cutoff=0.0) == 0.0
    with pytest.raises(SingularityError):
        two_point(0.0, 0.3, N_PH)
    with pytest.raises(SingularityError):
        two_point(np.array([0.1, -0.2]), 0.3, N_PH)


def test_n_point_reduces_to_two_point():
    rng = np.random.default_rng(7)
    for _ in range(40):
        x = rng.uniform(0.0, math.pi * 0.999)
        z = rng.uniform(-0.5, 0.5)
        d = rng.uniform(1e-5, 1.0)
        scale = rng.uniform(0.1, 100.0)  # must cancel at n = 1
        got = n_point([z], [z + d], x, N_PH, scale_m=scale)
        want = float(two_point(d, x, N_PH))
        assert got == pytest.approx(want, rel=1e-14)


def test_two_pair_closed_form_free_limit():
    # at x = 0 the exponent q = 1, so the products can be multiplied out by
    # hand with no logs involved
    z = [0.0, 0.013]
    zp = [0.031, 0.052]
    lam = momentum_cutoff(0.0, N_PH)
    m = 3.7
    num = (z[0] - z[1]) ** 2 * (zp[0] - zp[1]) ** 2 * m**4
    den = 1.0
    for zi in z:
        for zpj in zp:
            den *= lam**2 * (zi - zpj) ** 2
    want = (0.5 ** 4) * lam**2 * num / den
    got = n_point(z, zp, 0.0, N_PH, scale_m=m)
    assert got == pytest.approx(want, rel=1e-12)


def test_n_point_permutation_invariance_is_exact():
    rng = np.random.default_rng(11)
    z = list(rng.uniform(-1.0, 1.0, size=5))
    zp = list(rng.uniform(1.5, 3.5, size=5))
    ref = n_point(z, zp, 1.3, N_PH, scale_m=2.0)
    for _ in range(10):
        pz = rng.permutation(z)
        pzp = rng.permutation(zp)
        assert n_point(pz, pzp, 1.3, N_PH, scale_m=2.0) == ref


def test_n_point_coincident_points_are_named():
    with pytest.raises(SingularityError, match=r"z\[0\] = z_prime\[1\]"):
        n_point([0.1, 0.4], [0.3, 0.1], 0.5, N_PH, scale_m=1.0)
    with pytest.raises(SingularityError, match="z_prime"):
        n_point([0.1, 0.4], [0.3, 0.3], 0.5, N_PH, scale_m=1.0)
    with pytest.raises(ConfigError):
        n_point([0.1], [0.2, 0.3], 0.5, N_PH, scale_m=1.0)
    with pytest.raises(DomainError):
        n_point([0.1, 0.2], [0.3, 0.4], 0.5, N_PH, scale_m=1.0, cutoff=0.0)


def test_series_validation():
    with pytest.raises(ConfigError, match="strictly increasing"):
        CorrelationSeries(
            separations=np.array([1.0, 1.0, 2.0]),
            values=np.array([3.0, 2.0, 1.0]),
            chi_over_eta=0.0, cutoff=1.0, n_ph=N_PH,
        )
    with pytest.raises(ConfigError, match="decreasing"):
        CorrelationSeries(
            separations=np.array([1.0, 2.0]),
            values=np.array([1.0, 2.0]),
            chi_over_eta=0.0, cutoff=1.0, n_ph=N_PH,
        )


def test_two_point_series_and_fit():
    for x in (0.0, 1.0, math.pi / 2):
        series = two_point_series(x, N_PH, d_min_nph=0.08, d_max_nph=80.0, n_points=40)
        assert series.separations.size == 40
        assert np.all(np.diff(series.values) < 0.0)
        assert fitted_exponent(series) == pytest.approx(
            correlation_exponent(x), rel=1e-10
        )
    # at x = pi the derived cutoff is fp-tiny but positive; the power law and
    # its slope survive, only the amplitude collapses
    s_pi = two_point_series(math.pi, N_PH, 0.1, 10.0, 10)
    assert 0.0 < s_pi.cutoff < 1e-12
    assert fitted_exponent(s_pi) == pytest.approx(-0.5, rel=1e-10)
    with pytest.raises(DomainError):
        two_point_series(math.pi, N_PH, 0.1, 10.0, 10, cutoff=0.0)
    s = two_point_series(math.pi, N_PH, 0.1, 10.0, 10, cutoff=42.0)
    assert fitted_exponent(s) == pytest.approx(-0.5, rel=1e-10)


@settings(max_examples=80, deadline=None)
@given(
    x=st.floats(min_value=0.0, max_value=math.pi - 1e-9),
    d1=st.floats(min_value=1e-6, max_value=1e3),
    ratio=st.floats(min_value=1.0 + 1e-9, max_value=1e4),
)
def test_two_point_decreasing_property(x, d1, ratio):
    g1 = two_point(d1, x, N_PH)
    g2 = two_point(d1 * ratio, x, N_PH)
    assert g2 < g1
    assert -1.0 <= correlation_exponent(x) <= -0.5
