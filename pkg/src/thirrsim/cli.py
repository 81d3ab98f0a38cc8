"""Command-line front end.

Every command reads a JSON scenario config, writes deterministic outputs
plus a manifest with sha256 digests into --out, and prints a one-line JSON
summary to stdout. Exit codes: 0 success, 2 config errors, 3 singular or
out-of-domain physics, 4 numerical failures, 5 I/O failures.

    thirrsim params    --config cfg.json [--out DIR] [--set k=v ...]
    thirrsim sweep     --config cfg.json ...
    thirrsim correlate --config cfg.json ...
    thirrsim evolve    --config cfg.json ...
    thirrsim transport --config cfg.json ...
    thirrsim ed {ground,correlate,check-identity,check-fermionization} ...
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, correlations, dynamics, kernels, lattice, preelim, sweeps
from .config import (
    build_optical,
    canonical_bytes,
    load_scenario,
    pair_field,
    require_section,
)
from .constants import DOWN, UP
from .errors import (
    ConfigError,
    DomainError,
    NumericalError,
    SingularityError,
    ThirrsimError,
)
from .manifest import write_manifest
from .params import (
    RegimeThresholds,
    chi_over_eta,
    classify_regime,
    derive_params,
    interaction_ratio,
    interaction_to_kinetic,
    loss_rates,
    momentum_cutoff,
    pulse_extent,
)
from .tableio import dump_json, write_csv, write_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5

DEFAULT_OUT = "thirrsim_out"


# ---------------------------------------------------------------------------
# command implementations: each returns (summary dict, {filename: written})


def _cmd_params(data, out_dir):
    cfg = build_optical(data)
    p = derive_params(cfg)
    losses = loss_rates(cfg)
    regime = classify_regime(p)
    beta_i = interaction_to_kinetic(p, which="same")
    ratios = interaction_ratio(p)
    x = chi_over_eta(p)

    per_species = {
        "phi_rad": p.phi,
        "theta_rad": p.theta,
        "omega_bar_gamma": p.omega_bar,
        "alpha_plus": p.alpha_plus,
        "alpha_minus": p.alpha_minus,
        "v_m_per_s": p.v,
        "eta_m_per_s": p.eta,
        "m_nr_kg": p.m_nr,
        "m_0_kg": tuple(m if m is not None else float("nan") for m in p.m_0),
        "chi_same_J_m": p.chi_same,
        "chi_cross_J_m": p.chi_cross,
        "chi_same_im_J_m": p.chi_same_im,
        "chi_cross_im_J_m": p.chi_cross_im,
        "interaction_ratio": ratios,
        "beta_interaction": beta_i,
        "kappa_same_per_s": losses.kappa_same,
        "kappa_cross_per_s": losses.kappa_cross,
    }
    write_csv(out_dir + "/params.csv", {
        "quantity": np.array(list(per_species), dtype=object),
        "up": np.array([float(v[UP]) for v in per_species.values()]),
        "down": np.array([float(v[DOWN]) for v in per_species.values()]),
    })
    blob = {
        "per_species": {k: list(map(float, v)) for k, v in per_species.items()},
        "chi_tm_J_m": p.chi_tm,
        "chi_over_eta": x,
        "omega0_abs_rad_per_s": p.omega0_abs,
        "gamma_abs_rad_per_s": p.gamma_abs,
        "loss_total_per_s": losses.total,
        "coherence_time_s": losses.coherence_time,
        "regime": regime.as_dict(),
    }
    write_json(out_dir + "/params.json", blob)
    summary = {
        "eta_m_per_s": list(p.eta),
        "chi_over_eta": x,
        "coherence_time_s": losses.coherence_time,
        "regime": regime.as_dict(),
    }
    return summary, ["params.csv", "params.json"]


def _axis_from_section(section, key):
    ax = section.get(key)
    if ax is None:
        return None
    for field in ("path", "start", "stop", "points"):
        if field not in ax:
            raise ConfigError(f"config key 'sweep.{key}.{field}' is required")
    return sweeps.SweepAxis(
        path=ax["path"], start=float(ax["start"]), stop=float(ax["stop"]),
        points=int(ax["points"]), spacing=ax.get("spacing", "linear"),
    )


def _cmd_sweep(data, out_dir):
    section = require_section(data, "sweep")
    cfg = build_optical(data)
    axis1 = _axis_from_section(section, "axis1")
    if axis1 is None:
        raise ConfigError("config key 'sweep.axis1' is required")
    axis2 = _axis_from_section(section, "axis2")
    axes = (axis1,) if axis2 is None else (axis1, axis2)
    thresholds = RegimeThresholds(
        hardcore_ratio_min=float(section.get("interaction_threshold", 10.0)),
        hardcore_beta_min=float(section.get("kinetic_threshold", 10.0)),
    )
    spec = sweeps.SweepSpec(
        base=cfg,
        axes=axes,
        quantity=section.get("quantity", "interaction_ratio"),
        species=int(section.get("species", UP)),
        thresholds=thresholds,
        z_policy=section.get("z_policy", "tonks"),
    )
    result = sweeps.sweep_1d(spec) if axis2 is None else sweeps.sweep_2d(spec)

    if axis2 is None:
        cols = {
            result.axis_paths[0]: result.axes[0],
            "value": result.values,
            "flag": result.flags.astype(int),
            "regime": np.array(result.regimes, dtype=object),
        }
    else:
        a0 = np.repeat(result.axes[0], result.axes[1].size)
        a1 = np.tile(result.axes[1], result.axes[0].size)
        cols = {
            result.axis_paths[0]: a0,
            result.axis_paths[1]: a1,
            "value": result.values.ravel(),
            "flag": result.flags.ravel().astype(int),
            "regime": np.array(result.regimes.ravel(), dtype=object),
        }
    write_csv(out_dir + "/grid.csv", cols)
    summary = {
        "quantity": result.quantity,
        "species": result.species,
        "cells": int(result.values.size),
        "flagged": result.n_flagged,
        "meta": result.meta,
    }
    write_json(out_dir + "/sweep.json", summary)
    return summary, ["grid.csv", "sweep.json"]


def _correlate_inputs(data):
    """x and n_ph either given directly or derived from the optical section."""
    section = require_section(data, "correlate")
    x = section.get("x")
    n_ph = section.get("n_ph")
    if x is None or n_ph is None:
        cfg = build_optical(data)
        p = derive_params(cfg)
        if x is None:
            x = chi_over_eta(p)
        if n_ph is None:
            n_ph = cfg.n_ph[UP]
    return section, float(x), float(n_ph)


def _cmd_correlate(data, out_dir):
    section, x, n_ph = _correlate_inputs(data)
    mode = section.get("mode", "two_point")
    if mode == "cutoff":
        series = sweeps.sweep_cutoff(int(section.get("points", 101)), n_ph)
        write_csv(out_dir + "/correlations.csv", {
            "chi_over_eta": series.separations,
            "cutoff_fraction": series.values,
        })
        summary = {"mode": mode, "n_ph": n_ph, "points": len(series.values)}
        write_json(out_dir + "/correlate.json", summary)
        return summary, ["correlations.csv", "correlate.json"]
    if mode != "two_point":
        raise ConfigError(f"correlate.mode must be 'two_point' or 'cutoff', got {mode!r}")
    seps = section.get("separations")
    if seps is None:
        raise ConfigError("config key 'correlate.separations' is required")
    for field in ("start", "stop", "points"):
        if field not in seps:
            raise ConfigError(f"config key 'correlate.separations.{field}' is required")
    series = correlations.two_point_series(
        x, n_ph,
        d_min_nph=float(seps["start"]),
        d_max_nph=float(seps["stop"]),
        n_points=int(seps["points"]),
        cutoff=section.get("cutoff"),
    )
    fitted = correlations.fitted_exponent(series)
    write_csv(out_dir + "/correlations.csv", {
        "separation_nph": series.separations,
        "value_per_m2": series.values,
    })
    summary = {
        "mode": mode,
        "chi_over_eta": x,
        "n_ph": n_ph,
        "cutoff_per_m": series.cutoff,
        "fitted_exponent": fitted,
        "theory_exponent": correlations.correlation_exponent(x),
    }
    write_json(out_dir + "/correlate.json", summary)
    return summary, ["correlations.csv", "correlate.json"]


def _evolve_initial(section, grid):
    init = section.get("init")
    if init is None:
        raise ConfigError("config key 'evolve.init' is required")
    kind = init.get("kind")
    if kind == "gaussian":
        return dynamics.init_gaussian(
            grid,
            center=pair_field(init, "center", 0.5 * grid.length),
            width=pair_field(init, "width", 0.1 * grid.length),
            k0=pair_field(init, "k0", 0.0),
            n_photons=pair_field(init, "n_photons", 1.0),
        )
    if kind == "uniform":
        return dynamics.init_uniform(grid, density=pair_field(init, "density", 1.0))
    if kind == "plane_wave":
        return dynamics.init_plane_wave(
            grid, k_index=int(init.get("k_index", 1)),
            amplitude=float(init.get("amplitude", 1.0)),
        )
    raise ConfigError(
        f"evolve.init.kind must be gaussian, uniform, or plane_wave, got {kind!r}"
    )


def _cmd_evolve(data, out_dir):
    section = require_section(data, "evolve")
    cfg = build_optical(data)
    p = derive_params(cfg)
    coeffs = dynamics.MeanFieldCoefficients.from_params(
        p, lossy=bool(section.get("lossy", False))
    )
    for field in ("nx", "dt", "n_steps"):
        if field not in section:
            raise ConfigError(f"config key 'evolve.{field}' is required")
    grid = dynamics.Grid1D(
        length=float(section.get("length") or cfg.length),
        nx=int(section["nx"]),
    )
    state = _evolve_initial(section, grid)
    spec = dynamics.EvolutionSpec(
        dt=float(section["dt"]),
        n_steps=int(section["n_steps"]),
        include_quadratic=bool(section.get("include_quadratic", True)),
        enforce_stability=bool(section.get("enforce_stability", True)),
        sample_every=int(section.get("sample_every", 100)),
    )
    traj = dynamics.evolve(state, coeffs, spec)

    rows = [
        dynamics.measure(dynamics.FieldState(grid, f, t), coeffs,
                         spec.include_quadratic)
        for t, f in zip(traj.times, traj.fields)
    ]
    row_keys = ("norm_up", "norm_down", "centroid_up", "centroid_down",
                "width_up", "width_down", "energy_kinetic", "energy_dirac",
                "energy_mass", "energy_interaction", "energy_total",
                "peak_density")
    cols: dict = {"time_s": np.array([r["time"] for r in rows])}
    for key in row_keys:
        cols[key] = np.array([r[key] for r in rows])
    write_csv(out_dir + "/trajectory.csv", cols)
    write_csv(out_dir + "/final_state.csv", {
        "z_m": grid.z,
        "psi_up": traj.final.psi[UP],
        "psi_down": traj.final.psi[DOWN],
    })
    last = rows[-1]
    summary = {
        "t_final_s": last["time"],
        "norm": [last["norm_up"], last["norm_down"]],
        "centroid_m": [last["centroid_up"], last["centroid_down"]],
        "width_m": [last["width_up"], last["width_down"]],
        "energy_total_J": last["energy_total"],
        "backend": kernels.BACKEND,
    }
    write_json(out_dir + "/evolve.json", summary)
    return summary, ["trajectory.csv", "final_state.csv", "evolve.json"]


def _cmd_transport(data, out_dir):
    section = require_section(data, "transport")
    cfg = build_optical(data)
    model = preelim.transport_model(cfg)
    for field in ("nx", "dt", "n_steps"):
        if field not in section:
            raise ConfigError(f"config key 'transport.{field}' is required")
    grid = dynamics.Grid1D(
        length=float(section.get("length") or cfg.length),
        nx=int(section["nx"]),
    )
    state = preelim.init_matched(
        grid,
        center=float(section.get("center", 0.5 * grid.length)),
        width=float(section.get("width", 0.1 * grid.length)),
    )
    traj = preelim.evolve_transport(
        state, model,
        dt=float(section["dt"]),
        n_steps=int(section["n_steps"]),
        sample_every=int(section.get("sample_every", 10)),
    )
    rms = traj.windowed_rms_ratio(float(section.get("window_frac", 0.7)))
    write_csv(out_dir + "/matching.csv", {
        "time_s": traj.times,
        "mismatch_ratio": traj.ratio,
    })
    summary = {
        "windowed_rms_ratio": rms,
        "omega_d_rad_per_s": list(model.omega_d),
        "max_char_speed_m_per_s": model.max_speed,
    }
    write_json(out_dir + "/transport.json", summary)
    return summary, ["matching.csv", "transport.json"]


def _ed_params(data) -> lattice.LatticeParams:
    section = require_section(data, "ed")
    for field in ("n_sites", "n_total"):
        if field not in section:
            raise ConfigError(f"config key 'ed.{field}' is required")
    hardcore = section.get("hardcore", True)
    if isinstance(hardcore, dict):
        hardcore = (hardcore["up"], hardcore["down"])
    elif isinstance(hardcore, list):
        hardcore = tuple(hardcore)
    common = dict(
        n_sites=int(section["n_sites"]),
        n_total=int(section["n_total"]),
        hardcore=hardcore,
        periodic=bool(section.get("periodic", True)),
        n_up=section.get("n_up"),
    )
    source = section.get("source", "direct")
    if source == "optical":
        cfg = build_optical(data)
        p = derive_params(cfg)
        if "spacing" not in section:
            raise ConfigError("config key 'ed.spacing' is required with source=optical")
        return lattice.from_polariton(p, spacing=float(section["spacing"]), **common)
    if source != "direct":
        raise ConfigError(f"ed.source must be 'direct' or 'optical', got {source!r}")
    return lattice.LatticeParams(
        j_hop=pair_field(section, "j_hop", (1.0, 1.0)),
        lam=pair_field(section, "lam", (0.0, 0.0)),
        u_same=pair_field(section, "u_same", (0.0, 0.0)),
        u_cross=float(section.get("u_cross", 0.0)),
        w=float(section.get("w", 0.0)),
        **common,
    )


def _cmd_ed_ground(data, out_dir):
    params = _ed_params(data)
    section = require_section(data, "ed")
    basis, h = lattice.build_hamiltonian(params)
    gs = lattice.ground_state(h, seed=int(section.get("seed", 0)))
    dens = lattice.densities(basis, gs.vector)
    write_csv(out_dir + "/densities.csv", {
        "site": np.arange(params.n_sites),
        "density_up": dens[UP],
        "density_down": dens[DOWN],
    })
    summary = {
        "energy": gs.energy,
        "residual": gs.residual,
        "dimension": basis.size,
        "hermiticity_defect": lattice.hermiticity_defect(h),
    }
    write_json(out_dir + "/ground.json", summary)
    return summary, ["densities.csv", "ground.json"]


def _cmd_ed_correlate(data, out_dir):
    params = _ed_params(data)
    section = require_section(data, "ed")
    basis, h = lattice.build_hamiltonian(params)
    gs = lattice.ground_state(h, seed=int(section.get("seed", 0)))
    table = lattice.density_correlations(basis, gs.vector)
    m2 = 2 * params.n_sites
    i_idx = np.repeat(np.arange(m2), m2)
    j_idx = np.tile(np.arange(m2), m2)
    write_csv(out_dir + "/density_correlations.csv", {
        "mode_i": i_idx, "mode_j": j_idx, "value": table.ravel(),
    })
    spins = lattice.spin_correlations(basis, gs.vector)
    m = params.n_sites
    write_csv(out_dir + "/spin_correlations.csv", {
        "site_i": np.repeat(np.arange(m), m),
        "site_j": np.tile(np.arange(m), m),
        "value": spins.ravel(),
    })
    summary = {
        "energy": gs.energy,
        "dimension": basis.size,
        "total_density": float(np.sum(lattice.densities(basis, gs.vector))),
    }
    write_json(out_dir + "/ed_correlate.json", summary)
    return summary, ["density_correlations.csv", "spin_correlations.csv",
                     "ed_correlate.json"]


def _cmd_ed_identity(data, out_dir):
    params = _ed_params(data)
    section = require_section(data, "ed")
    if params.n_up is not None:
        raise ConfigError("the detection identity needs an unrestricted basis (no n_up)")
    basis, h = lattice.build_hamiltonian(params)
    rng = np.random.default_rng(int(section.get("seed", 0)))
    n_random = int(section.get("n_random_states", 20))
    residuals = []
    for _ in range(n_random):
        psi = rng.normal(size=basis.size) + 1j * rng.normal(size=basis.size)
        residuals.append(lattice.detection_identity_residual(basis, psi))
    gs = lattice.ground_state(h, seed=int(section.get("seed", 0)))
    gs_residual = lattice.detection_identity_residual(basis, gs.vector)
    summary = {
        "max_residual_random": float(max(residuals)) if residuals else 0.0,
        "residual_ground_state": gs_residual,
        "n_random_states": n_random,
        "dimension": basis.size,
    }
    write_json(out_dir + "/identity.json", summary)
    return summary, ["identity.json"]


def _cmd_ed_fermionization(data, out_dir):
    section = require_section(data, "ed")
    for field in ("n_sites", "n_total"):
        if field not in section:
            raise ConfigError(f"config key 'ed.{field}' is required")
    j_hop = pair_field(section, "j_hop", (1.0, 1.0))
    lam = pair_field(section, "lam", (0.0, 0.0))
    if not isinstance(j_hop, tuple):
        j_hop = (float(j_hop), float(j_hop))
    if not isinstance(lam, tuple):
        lam = (float(lam), float(lam))
    res = lattice.fermionization_check(
        int(section["n_sites"]), int(section["n_total"]),
        j_hop=float(j_hop[0]), lam=float(lam[0]),
        periodic=bool(section.get("periodic", True)),
    )
    m = int(section["n_sites"])
    write_csv(out_dir + "/fermionization.csv", {
        "site_i": np.repeat(np.arange(m), m),
        "site_j": np.tile(np.arange(m), m),
        "hardcore": res["hardcore"].ravel(),
        "free_fermion": res["wick"].ravel(),
    })
    summary = {
        "max_deviation": res["max_deviation"],
        "energy": res["energy"],
        "boundary": res["boundary"],
    }
    if "u_over_j" in section:
        devs = lattice.softcore_deviation(
            int(section["n_sites"]), int(section["n_total"]),
            section["u_over_j"], j_hop=float(j_hop[0]),
            periodic=bool(section.get("periodic", True)),
        )
        summary["softcore_u_over_j"] = [float(u) for u in section["u_over_j"]]
        summary["softcore_deviation"] = [float(d) for d in devs]
    write_json(out_dir + "/fermionization.json", summary)
    return summary, ["fermionization.csv", "fermionization.json"]


# ---------------------------------------------------------------------------
# dispatch


_COMMANDS = {
    "params": _cmd_params,
    "sweep": _cmd_sweep,
    "correlate": _cmd_correlate,
    "evolve": _cmd_evolve,
    "transport": _cmd_transport,
    ("ed", "ground"): _cmd_ed_ground,
    ("ed", "correlate"): _cmd_ed_correlate,
    ("ed", "check-identity"): _cmd_ed_identity,
    ("ed", "check-fermionization"): _cmd_ed_fermionization,
}


def _add_common(parser):
    parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--out", default=DEFAULT_OUT,
                        help=f"output directory (default {DEFAULT_OUT})")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a config entry (dotted path, repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thirrsim",
        description="stationary-light polariton simulator",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("params", "derive effective-theory parameters, losses, and regime"),
        ("sweep", "scan a quantity over 1 or 2 config axes"),
        ("correlate", "exact correlators or the momentum cutoff curve"),
        ("evolve", "split-step mean-field evolution"),
        ("transport", "coupled transport before adiabatic elimination"),
    ):
        _add_common(sub.add_parser(name, help=help_text))
    ed = sub.add_parser("ed", help="exact diagonalization")
    ed_sub = ed.add_subparsers(dest="ed_command", required=True)
    for name, help_text in (
        ("ground", "ground state energy and densities"),
        ("correlate", "density and spin correlation tables"),
        ("check-identity", "polarization-rotation detection identity residuals"),
        ("check-fermionization", "hardcore chain versus free fermions"),
    ):
        _add_common(ed_sub.add_parser(name, help=help_text))
    return parser


def run(args) -> dict:
    """Load the scenario, run the selected command, write the manifest."""
    data = load_scenario(args.config, overrides=args.overrides)
    if args.command == "ed":
        handler = _COMMANDS[("ed", args.ed_command)]
        command_name = f"ed {args.ed_command}"
    else:
        handler = _COMMANDS[args.command]
        command_name = args.command
    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)
    summary, outputs = handler(data, out_dir)
    manifest_path = write_manifest(
        out_dir, command_name, canonical_bytes(data), outputs
    )
    summary = dict(summary)
    summary["command"] = command_name
    summary["out_dir"] = out_dir
    summary["manifest"] = manifest_path
    return summary


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary = run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularityError, DomainError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ThirrsimError as exc:  # pragma: no cover - base-class safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    sys.stdout.write(dump_json(summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
