"""Acceptance gate: one test per acceptance criterion, printing one
PASS/FAIL line each (visible even under capture), with the stated numeric
tolerances and runtime budgets asserted.

Run just this gate with::

    python3 -m pytest tests/test_acceptance.py -v
"""

import json
import math
import time
from collections import deque

import numpy as np
import pytest

from conftest import balanced_config, mirror_config
from thirrsim import cli, correlations, dynamics, lattice, preelim, sweeps
from thirrsim.constants import DOWN, GAMMA_DEFAULT, UP
from thirrsim.dynamics import (
    EvolutionSpec,
    FieldState,
    Grid1D,
    MeanFieldCoefficients,
    evolve,
    init_gaussian,
    init_plane_wave,
    measure,
    prony_modes,
    spin_plus_direct,
    spin_plus_from_rotated,
    rotated_densities,
)
from thirrsim.params import (
    derive_params,
    kinetic_ratio,
    loss_rates,
    momentum_cutoff,
)


def check(capsys, num, desc, budget, body):
    """Run one criterion body, enforce its runtime budget, print one line."""
    t0 = time.perf_counter()
    try:
        body()
    except Exception:
        elapsed = time.perf_counter() - t0
        with capsys.disabled():
            print(f"[criterion {num:02d}] FAIL  {desc}  ({elapsed:.2f} s)")
        raise
    elapsed = time.perf_counter() - t0
    ok = budget is None or elapsed < budget
    with capsys.disabled():
        print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}  {desc}  "
              f"({elapsed:.2f} s)")
    if budget is not None:
        assert elapsed < budget, f"runtime {elapsed:.2f} s exceeds {budget} s"


# ---------------------------------------------------------------------------
# 1. momentum cutoff curve


def test_criterion_01_cutoff_curve(capsys):
    def body():
        n_ph = 1.0e3
        norm = math.pi * n_ph

        def f(x):
            return momentum_cutoff(x, n_ph) / norm

        assert abs(f(0.0) - 1.0) <= 1e-12
        assert abs(f(math.pi) - 0.0) <= 1e-12
        assert abs(f(math.pi / 2.0) - 2.0 / math.pi) <= 1e-12
        # and the whole curve is sin(x)/x, strictly decreasing on (0, pi]
        series = sweeps.sweep_cutoff(101, n_ph)
        xs = series.separations
        want = np.where(xs == 0.0, 1.0, np.sin(xs) / np.where(xs == 0.0, 1.0, xs))
        assert np.max(np.abs(series.values - want)) <= 1e-12
        assert np.all(np.diff(series.values) < 0.0)

    check(capsys, 1, "cutoff curve sin(x)/x: endpoints and midpoint to 1e-12",
          1.0, body)


# ---------------------------------------------------------------------------
# 2. two-point correlation scaling


def test_criterion_02_correlation_scaling(capsys):
    def body():
        n_ph = 1.0e3
        for x in (0.0, math.pi / 4.0, math.pi / 2.0, math.pi):
            # the derived cutoff vanishes at x = pi; the power law is
            # cutoff-independent, so pin any positive value there
            cutoff = math.pi * n_ph if x == math.pi else None
            series = correlations.two_point_series(
                x, n_ph, d_min_nph=0.1, d_max_nph=10.0, n_points=64,
                cutoff=cutoff,
            )
            slope = correlations.fitted_exponent(series)
            want = -1.0 / (1.0 + x / math.pi)
            assert abs(slope - want) <= 1e-8, (x, slope, want)
            assert np.all(np.diff(series.values) < 0.0)

    check(capsys, 2, "two-point exponent -1/(1+x/pi) to 1e-8, decreasing series",
          1.0, body)


# ---------------------------------------------------------------------------
# 3. kinetic ratio stays small


def test_criterion_03_kinetic_ratio(capsys):
    def body():
        z_s = 1.0e-3
        betas = []
        for d in np.linspace(0.05, 0.08, 7):
            cfg = mirror_config(delta=(d, d))
            bk = kinetic_ratio(cfg, derive_params(cfg), z_s)
            assert max(bk) <= 0.05, (d, bk)
            betas.append(bk[UP])
        assert betas[-1] == pytest.approx(0.023306226851591557, rel=1e-10)
        assert betas[0] == pytest.approx(0.023306226851591557 * 5.0 / 8.0,
                                         rel=1e-10)
        # report the linewidth dependence alongside: at fixed ratios the
        # ratio scales as 1/gamma, so halving/doubling gamma doubles/halves it
        ref = betas[-1]
        for fac in (0.5, 2.0):
            cfg = mirror_config(delta=(0.08, 0.08),
                                gamma_abs=fac * GAMMA_DEFAULT)
            bk = kinetic_ratio(cfg, derive_params(cfg), z_s)
            assert bk[UP] == pytest.approx(ref / fac, rel=1e-12)

    check(capsys, 3, "quadratic/linear kinetic ratio <= 0.05 on the working "
          "detuning window, scaling 1/gamma", 1.0, body)


# ---------------------------------------------------------------------------
# 4. coherence time


def test_criterion_04_coherence_time(capsys):
    def body():
        # balanced working point: both channels detuned by 4 linewidths
        cfg = balanced_config()
        tau = loss_rates(cfg).coherence_time
        assert tau == pytest.approx(1.8936612302714983e-4, rel=1e-10)
        target = 400.0e-6
        assert target / 3.0 <= tau <= target * 3.0
        # and 1/kappa grows monotonically as everything is detuned further
        taus = []
        for d in np.linspace(2.0, 20.0, 10):
            taus.append(loss_rates(
                balanced_config(delta_same=(d, d), delta_cross=(d, d))
            ).coherence_time)
        assert np.all(np.diff(taus) > 0.0)

    check(capsys, 4, "1/kappa at 4-linewidth detuning within factor 3 of "
          "400 us, monotone in detuning", 1.0, body)


# ---------------------------------------------------------------------------
# 5. regime atlas


def _connected(mask):
    """True when the True cells of a 2D boolean mask are 4-connected."""
    idx = np.argwhere(mask)
    if idx.size == 0:
        return False
    seen = np.zeros_like(mask, dtype=bool)
    queue = deque([tuple(idx[0])])
    seen[tuple(idx[0])] = True
    count = 0
    while queue:
        i, j = queue.popleft()
        count += 1
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if (0 <= a < mask.shape[0] and 0 <= b < mask.shape[1]
                    and mask[a, b] and not seen[a, b]):
                seen[a, b] = True
                queue.append((a, b))
    return count == int(mask.sum())


def test_criterion_05_regime_atlas(capsys):
    def body():
        base = mirror_config()
        spec = sweeps.SweepSpec(
            base=base,
            axes=(
                sweeps.SweepAxis("delta_same.both", 0.2, 20.0, 200, "log"),
                sweeps.SweepAxis("delta_cross.both", 1.0, 100.0, 200, "log"),
            ),
            quantity="interaction_ratio",
        )
        result = sweeps.sweep_2d(spec)
        assert result.n_flagged == 0
        p = derive_params(base)
        cos_dphi = math.cos(p.phi[DOWN] - p.phi[UP])
        ds = result.axes[0][:, None]
        dx = result.axes[1][None, :]
        want = (2.0 + cos_dphi) * ds / (2.0 * dx)
        assert np.max(np.abs(result.values / want - 1.0)) <= 1e-12
        hard = result.values <= 0.1
        assert hard.any()
        assert _connected(hard)
        # every hardcore cell sits at small same-channel detuning relative
        # to the cross channel
        ds_grid = np.broadcast_to(ds, hard.shape)
        dx_grid = np.broadcast_to(dx, hard.shape)
        assert np.all(ds_grid[hard] < 0.1 * dx_grid[hard])

    check(capsys, 5, "interaction-ratio atlas equals closed form to 1e-12 on "
          "200x200; hardcore region connected", 5.0, body)


# ---------------------------------------------------------------------------
# 6. mean-field dynamics


def test_criterion_06_meanfield_dynamics(capsys):
    def body():
        # (a) lossless norm conservation over 1e4 steps
        g = Grid1D(length=1.0, nx=128)
        c = MeanFieldCoefficients(m_nr=(2.0, 2.0), eta=(0.2, -0.2),
                                  omega0=0.5, chi_same=(0.8, 0.6),
                                  chi_cross=0.3, hbar=1.0)
        state = init_gaussian(g, center=0.5, width=0.08, n_photons=(1.0, 0.5))
        n0 = state.norms().sum()
        out = evolve(state, c,
                     EvolutionSpec(dt=4e-5, n_steps=10000,
                                   enforce_stability=False)).final
        assert abs(out.norms().sum() - n0) / n0 < 1e-8

        # (b) free Gaussian width law to 1e-3 relative
        g = Grid1D(length=1.0, nx=512)
        c = MeanFieldCoefficients(m_nr=(1.0, 1.0), eta=(0.0, 0.0),
                                  omega0=0.0, hbar=1.0)
        w = 0.05
        sigma0 = w / math.sqrt(2.0)
        state = init_gaussian(g, center=0.5, width=w)
        t_final = 2.0 * sigma0 ** 2 * math.sqrt(3.0)
        out = evolve(state, c,
                     EvolutionSpec(dt=t_final / 4000, n_steps=4000)).final
        want = dynamics.gaussian_width(sigma0, t_final, 1.0, hbar=1.0)
        got = measure(out, c)["width_up"]
        assert abs(got / want - 1.0) < 1e-3

        # (c) centroid advection at -eta to 1e-3 relative
        g = Grid1D(length=1.0, nx=256)
        c = MeanFieldCoefficients(m_nr=(1.0, 1.0), eta=(0.4, -0.4),
                                  omega0=0.0, hbar=1.0)
        state = init_gaussian(g, center=(0.35, 0.65), width=0.04)
        t_final = 0.5
        out = evolve(state, c,
                     EvolutionSpec(dt=t_final / 2000, n_steps=2000,
                                   include_quadratic=False)).final
        m = measure(out, c, include_quadratic=False)
        assert m["centroid_up"] == pytest.approx(0.35 - 0.4 * t_final, rel=1e-3)
        assert m["centroid_down"] == pytest.approx(0.65 + 0.4 * t_final, rel=1e-3)

        # (d) two-branch dispersion on 8 modes to 1e-6 relative
        g = Grid1D(length=2.0 * math.pi, nx=64)
        eta, o0 = 0.6, 1.1
        c = MeanFieldCoefficients(m_nr=(1.0, 1.0), eta=(-eta, eta),
                                  omega0=o0, hbar=1.0)
        dt = 0.05
        for kidx in range(1, 9):
            state = init_plane_wave(g, k_index=(kidx, kidx), amplitude=(1.0, 0.0))
            traj = evolve(state, c,
                          EvolutionSpec(dt=dt, n_steps=240,
                                        include_quadratic=False,
                                        sample_every=1,
                                        enforce_stability=False))
            freqs = prony_modes(traj.field_mode(UP, kidx), dt, n_modes=2)
            want = math.sqrt(eta * eta * kidx * kidx + o0 * o0)
            assert freqs[0] == pytest.approx(-want, rel=1e-6)
            assert freqs[1] == pytest.approx(+want, rel=1e-6)

        # (e) Strang splitting converges at order 2 (Richardson triplet)
        g = Grid1D(length=1.0, nx=256)
        c = MeanFieldCoefficients(m_nr=(40.0, 60.0), eta=(0.35, -0.15),
                                  omega0=0.9, chi_same=(2.0, 1.5),
                                  chi_cross=0.8, hbar=1.0)
        state = init_gaussian(g, center=(0.45, 0.55), width=0.07,
                              n_photons=(1.0, 0.8))
        finals = []
        for n in (100, 200, 400):
            spec = EvolutionSpec(dt=0.1 / n, n_steps=n, enforce_stability=False)
            finals.append(evolve(state, c, spec).final.psi)
        order = math.log2(np.linalg.norm(finals[0] - finals[1])
                          / np.linalg.norm(finals[1] - finals[2]))
        assert abs(order - 2.0) <= 0.1

    check(capsys, 6, "mean-field dynamics: norm, width law, drift, "
          "two-branch dispersion, Strang order 2", 120.0, body)


# ---------------------------------------------------------------------------
# 7. pulse matching at large optical depth


def test_criterion_07_pulse_matching(capsys):
    def body():
        base = mirror_config(
            omega_plus=(1.5, 1.5), omega_minus=(1.5, 1.5),
            delta=(0.03, 0.03), delta_same=(1e4, 1e4), delta_cross=(1e4, 1e4),
            gamma_abs=1.0, v_empty=1.0, n_z=1.0, v_direct=None, g2nz=18.0,
            n_ph=(1.0, 1.0), length=1.0, n_photons=(1.0, 1.0),
        )
        grid = Grid1D(length=1.0, nx=256)
        targets, ratios = preelim.matching_sweep(
            base, omega_d_values=(300.0, 600.0, 1200.0, 2400.0, 4800.0),
            grid=grid, width=0.1, t_final=0.42,
        )
        assert np.all(ratios < 0.1), ratios
        assert np.all(np.diff(ratios) < 0.0), ratios
        # the statistic tracks the quasistatic estimate ~ 2 v k_rms / W_d,
        # so a 16x detuning span shrinks it ~16x
        assert ratios[0] / ratios[-1] == pytest.approx(16.0, rel=0.15)

    check(capsys, 7, "difference mode below 0.1 and monotone over a 5-point "
          "optical-depth sweep", 120.0, body)


# ---------------------------------------------------------------------------
# 8. fermionization


def test_criterion_08_fermionization(capsys):
    def body():
        res = lattice.fermionization_check(8, 2, j_hop=1.0)
        assert res["max_deviation"] <= 1e-10
        devs = lattice.softcore_deviation(8, 2, (1.0, 10.0, 100.0, 1000.0))
        assert np.all(np.diff(devs) < 0.0), devs
        assert devs[-1] < 1e-3

    check(capsys, 8, "hardcore chain matches free-fermion oracle to 1e-10; "
          "soft-core deviation monotone, < 1e-3 at U/J = 1e3", 60.0, body)


# ---------------------------------------------------------------------------
# 9. detection identity


def test_criterion_09_detection_identity(capsys):
    def body():
        # operator level on the lattice: 20 random states in the Fock basis
        basis = lattice.build_basis(4, 2, hardcore=False)
        rng = np.random.default_rng(12345)
        for _ in range(20):
            psi = rng.normal(size=basis.size) + 1j * rng.normal(size=basis.size)
            assert lattice.detection_identity_residual(basis, psi) < 1e-12
        # and on interacting ground states (hardcore and soft-core)
        for hardcore in (True, False):
            params = lattice.LatticeParams(
                n_sites=4, n_total=2, j_hop=(1.0, 0.8), lam=(0.2, -0.1),
                u_same=(0.0, 0.0) if hardcore else (3.0, 2.0),
                u_cross=1.7, w=0.6, hardcore=hardcore,
            )
            b, h = lattice.build_hamiltonian(params)
            gs = lattice.ground_state(h)
            assert lattice.detection_identity_residual(b, gs.vector) < 1e-12

        # mean-field pointwise version
        g = Grid1D(length=1.0, nx=64)
        psi = rng.normal(size=(2, g.nx)) + 1j * rng.normal(size=(2, g.nx))
        state = FieldState(g, psi)
        direct = spin_plus_direct(state)
        recon = spin_plus_from_rotated(rotated_densities(state))
        assert np.max(np.abs(recon - direct)) < 1e-14

    check(capsys, 9, "polarization-rotation identity: operator residual "
          "< 1e-12, mean-field pointwise < 1e-14", 30.0, body)


# ---------------------------------------------------------------------------
# 10. n-point reduction


def test_criterion_10_n_point_reduction(capsys):
    def body():
        rng = np.random.default_rng(99)
        n_ph = 1.0e3
        for _ in range(100):
            x = rng.uniform(0.0, math.pi * 0.999)
            z = rng.uniform(-1.0, 1.0)
            zp = z + 10.0 ** rng.uniform(-5.0, 0.0)
            d = zp - z  # the separation both sides actually see
            scale = 10.0 ** rng.uniform(-1.0, 2.0)
            got = correlations.n_point([z], [zp], x, n_ph, scale_m=scale)
            want = float(correlations.two_point(d, x, n_ph))
            assert got == pytest.approx(want, rel=1e-14), (x, z, d, scale)
        # permutation invariance is exact (bitwise), not merely approximate
        z = list(rng.uniform(-1.0, 1.0, size=6))
        zp = list(rng.uniform(1.5, 3.5, size=6))
        ref = correlations.n_point(z, zp, 1.1, n_ph, scale_m=2.0)
        for _ in range(20):
            assert correlations.n_point(
                rng.permutation(z), rng.permutation(zp), 1.1, n_ph, scale_m=2.0
            ) == ref

    check(capsys, 10, "n-point at n = 1 equals the two-point form to 1e-14; "
          "permutation invariance exact", 1.0, body)


# ---------------------------------------------------------------------------
# 11. reproducibility through the CLI


def _cli_scenarios(tmp_path):
    optical = {
        "omega_plus": [1.6, 1.4], "omega_minus": [1.4, 1.6],
        "delta": 10.0, "delta_same": 1.0, "delta_cross": 15.0,
        "n_z": 1e7, "v_direct": 100.0, "n_ph": 1000.0,
        "length": 0.01, "n_photons": 10.0,
    }
    ed = {
        "n_sites": 5, "n_total": 2, "hardcore": True, "periodic": True,
        "source": "direct", "j_hop": 1.0, "lam": 0.3, "u_cross": 2.0,
        "w": 0.5, "seed": 0, "n_random_states": 5,
        "u_over_j": [1.0, 100.0],
    }
    scenarios = {
        "params": {"schema_version": 1, "optical": optical},
        "sweep": {
            "schema_version": 1, "optical": optical,
            "sweep": {"quantity": "interaction_ratio",
                      "axis1": {"path": "delta_same.both", "start": 0.5,
                                "stop": 5.0, "points": 7}},
        },
        "correlate": {
            "schema_version": 1, "optical": optical,
            "correlate": {"mode": "two_point",
                          "separations": {"start": 0.2, "stop": 20.0,
                                          "points": 16}},
        },
        "evolve": {
            "schema_version": 1, "optical": optical,
            "evolve": {"nx": 64, "dt": 5e-8, "n_steps": 20,
                       "sample_every": 10,
                       "init": {"kind": "gaussian", "center": 0.005,
                                "width": 0.001, "n_photons": 10.0}},
        },
        "transport": {
            "schema_version": 1,
            "optical": {"omega_plus": 1.5, "omega_minus": 1.5,
                        "delta": 0.03, "delta_same": 1e4, "delta_cross": 1e4,
                        "gamma_abs": 1.0, "v_empty": 1.0, "n_z": 1.0,
                        "g2nz": 18.0, "n_ph": 1.0, "length": 1.0,
                        "n_photons": 1.0},
            "transport": {"nx": 64, "dt": 1.5e-4, "n_steps": 100,
                          "sample_every": 10, "center": 0.5, "width": 0.1},
        },
        "ed ground": {"schema_version": 1, "ed": ed},
        "ed correlate": {"schema_version": 1, "ed": ed},
        "ed check-identity": {"schema_version": 1, "ed": ed},
        "ed check-fermionization": {"schema_version": 1, "ed": ed},
    }
    out = {}
    for name, data in scenarios.items():
        path = tmp_path / (name.replace(" ", "_") + ".json")
        path.write_text(json.dumps(data), encoding="utf-8")
        out[name] = str(path)
    return out


def test_criterion_11_reproducibility(capsys, tmp_path):
    def body():
        configs = _cli_scenarios(tmp_path)
        for command, cfg in configs.items():
            argv = command.split() + ["--config", cfg]
            runs = []
            for tag in ("a", "b"):
                out_dir = tmp_path / (command.replace(" ", "_") + "_" + tag)
                code = cli.main(argv + ["--out", str(out_dir)])
                capsys.readouterr()  # swallow the summary line
                assert code == 0, command
                runs.append(out_dir)
            man = []
            for out_dir in runs:
                man.append(json.loads((out_dir / "manifest.json").read_text()))
            assert man[0]["outputs"] == man[1]["outputs"], command
            assert man[0]["config_sha256"] == man[1]["config_sha256"], command
            for name in man[0]["outputs"]:
                blob_a = (runs[0] / name).read_bytes()
                blob_b = (runs[1] / name).read_bytes()
                assert blob_a == blob_b, (command, name)

    check(capsys, 11, "all CLI commands rerun byte-identically with matching "
          "manifest digests", None, body)
