"""End-to-end checks of the command-line layer: exit codes, overrides,
config lookup, output determinism, and the per-command file sets."""

import hashlib
import json
import os

import numpy as np
import pytest

from thirrsim.cli import (
    EXIT_CONFIG,
    EXIT_DOMAIN,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    main,
)


def write_config(path, data):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=1)
    return str(path)


def demo_scenario():
    return {
        "schema_version": 1,
        "optical": {
            "omega_plus": [1.6, 1.4],
            "omega_minus": [1.4, 1.6],
            "delta": 10.0,
            "delta_same": 1.0,
            "delta_cross": 15.0,
            "n_z": 1e7,
            "v_direct": 100.0,
            "n_ph": 1000.0,
            "length": 0.01,
            "n_photons": 10.0,
        },
    }


def balanced_scenario():
    data = demo_scenario()
    data["optical"]["omega_plus"] = 1.5
    data["optical"]["omega_minus"] = 1.5
    return data


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    summary = json.loads(captured.out) if code == EXIT_OK else None
    return code, summary, captured.err


# ---------------------------------------------------------------------------
# exit codes


def test_params_success(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", demo_scenario())
    code, summary, _ = run_cli(capsys, "params", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["command"] == "params"
    assert summary["regime"]["mass"] == "massless"
    for name in ("params.json", "params.csv", "manifest.json"):
        assert (tmp_path / "out" / name).exists()


def test_balanced_config_is_a_domain_error(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", balanced_scenario())
    code, _, _ = run_cli(capsys, "params", "--config", cfg,
                      "--out", str(tmp_path / "out"))
    assert code == EXIT_DOMAIN


def test_unknown_key_rejected(tmp_path, capsys):
    data = demo_scenario()
    data["optical"]["typo_field"] = 1.0
    cfg = write_config(tmp_path / "cfg.json", data)
    code, _, err = run_cli(capsys, "params", "--config", cfg,
                           "--out", str(tmp_path / "out"))
    assert code == EXIT_CONFIG
    assert "optical.typo_field" in err


def test_missing_file_is_io_error(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "params",
                      "--config", str(tmp_path / "does_not_exist.json"))
    assert code == EXIT_IO


def test_malformed_json_is_config_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    code, _, _ = run_cli(capsys, "params", "--config", str(path))
    assert code == EXIT_CONFIG


def test_wrong_schema_version_rejected(tmp_path, capsys):
    data = demo_scenario()
    data["schema_version"] = 99
    cfg = write_config(tmp_path / "cfg.json", data)
    code, _, _ = run_cli(capsys, "params", "--config", cfg)
    assert code == EXIT_CONFIG


def test_stability_violation_is_numerical_error(tmp_path, capsys):
    data = demo_scenario()
    data["evolve"] = {
        "nx": 64,
        "dt": 1.0,  # far beyond any stability scale of this configuration
        "n_steps": 10,
        "init": {"kind": "gaussian", "center": 0.005, "width": 0.001},
    }
    cfg = write_config(tmp_path / "cfg.json", data)
    code, _, _ = run_cli(capsys, "evolve", "--config", cfg,
                      "--out", str(tmp_path / "out"))
    assert code == EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# overrides and config lookup


def test_set_override_changes_output(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", demo_scenario())
    _, base, _ = run_cli(capsys, "params", "--config", cfg,
                         "--out", str(tmp_path / "a"))
    code, moved, _ = run_cli(capsys, "params", "--config", cfg,
                             "--set", "optical.delta_cross=30.0",
                             "--out", str(tmp_path / "b"))
    assert code == EXIT_OK
    # the cross-species channel sets the Thirring coupling and part of the
    # loss, so doubling its detuning weakens chi and lengthens the coherence
    assert abs(moved["chi_over_eta"]) < abs(base["chi_over_eta"])
    assert moved["coherence_time_s"] > base["coherence_time_s"]


def test_set_promotes_scalar_to_pair(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", demo_scenario())
    code, summary, _ = run_cli(capsys, "params", "--config", cfg,
                            "--set", "optical.delta.up=12.0",
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    blob = json.loads((tmp_path / "out" / "params.json").read_text())
    m_up, m_down = blob["per_species"]["m_nr_kg"]
    # mass scales as 1/delta per species: up at 12 gamma, down still at 10
    assert m_up / m_down == pytest.approx(10.0 / 12.0, rel=1e-9)


def test_config_dir_fallback(tmp_path, capsys, monkeypatch):
    write_config(tmp_path / "shared.json", demo_scenario())
    monkeypatch.setenv("THIRRSIM_CONFIG_DIR", str(tmp_path))
    monkeypatch.chdir(tmp_path / "..")
    code, _, _ = run_cli(capsys, "params", "--config", "shared.json",
                      "--out", str(tmp_path / "out"))
    assert code == EXIT_OK


def test_default_out_dir(tmp_path, capsys, monkeypatch):
    cfg = write_config(tmp_path / "cfg.json", demo_scenario())
    monkeypatch.chdir(tmp_path)
    code, summary, _ = run_cli(capsys, "params", "--config", cfg)
    assert code == EXIT_OK
    assert summary["out_dir"] == "thirrsim_out"
    assert (tmp_path / "thirrsim_out" / "manifest.json").exists()


# ---------------------------------------------------------------------------
# determinism


def test_rerun_is_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", demo_scenario())
    for sub in ("a", "b"):
        code, _, _ = run_cli(capsys, "params", "--config", cfg,
                          "--out", str(tmp_path / sub))
        assert code == EXIT_OK
    for name in ("params.json", "params.csv"):
        blob_a = (tmp_path / "a" / name).read_bytes()
        blob_b = (tmp_path / "b" / name).read_bytes()
        assert blob_a == blob_b, name
    man_a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    man_b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert man_a["outputs"] == man_b["outputs"]
    assert man_a["config_sha256"] == man_b["config_sha256"]


def test_manifest_digests_match_files(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", demo_scenario())
    run_cli(capsys, "params", "--config", cfg, "--out", str(tmp_path / "out"))
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    for name, digest in manifest["outputs"].items():
        blob = (tmp_path / "out" / name).read_bytes()
        assert hashlib.sha256(blob).hexdigest() == digest, name


# ---------------------------------------------------------------------------
# remaining commands produce their documented outputs


def test_sweep_outputs(tmp_path, capsys):
    data = demo_scenario()
    data["sweep"] = {
        "quantity": "interaction_ratio",
        "axis1": {"path": "delta_same.both", "start": 0.5, "stop": 5.0,
                  "points": 11},
    }
    cfg = write_config(tmp_path / "cfg.json", data)
    code, summary, _ = run_cli(capsys, "sweep", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["cells"] == 11
    assert summary["flagged"] == 0
    header = (tmp_path / "out" / "grid.csv").read_text().splitlines()[0]
    assert header == "delta_same.both,value,flag,regime"


def test_sweep_2d_outputs(tmp_path, capsys):
    data = demo_scenario()
    data["sweep"] = {
        "quantity": "loss_total",
        "axis1": {"path": "delta_same.both", "start": 0.5, "stop": 5.0,
                  "points": 4},
        "axis2": {"path": "delta_cross.both", "start": 5.0, "stop": 50.0,
                  "points": 3},
    }
    cfg = write_config(tmp_path / "cfg.json", data)
    code, summary, _ = run_cli(capsys, "sweep", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["cells"] == 12
    rows = (tmp_path / "out" / "grid.csv").read_text().splitlines()
    assert len(rows) == 13  # header + 12 cells


def test_correlate_outputs(tmp_path, capsys):
    data = demo_scenario()
    data["correlate"] = {
        "mode": "two_point",
        "separations": {"start": 0.2, "stop": 20.0, "points": 32,
                        "spacing": "log"},
    }
    cfg = write_config(tmp_path / "cfg.json", data)
    code, summary, _ = run_cli(capsys, "correlate", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["fitted_exponent"] == pytest.approx(
        summary["theory_exponent"], rel=1e-6)
    assert (tmp_path / "out" / "correlations.csv").exists()


def test_correlate_cutoff_mode(tmp_path, capsys):
    data = demo_scenario()
    data["correlate"] = {"mode": "cutoff", "points": 41, "n_ph": 500.0}
    cfg = write_config(tmp_path / "cfg.json", data)
    code, summary, _ = run_cli(capsys, "correlate", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["points"] == 41
    body = (tmp_path / "out" / "correlations.csv").read_text().splitlines()
    first = [float(x) for x in body[1].split(",")]
    last = [float(x) for x in body[-1].split(",")]
    assert first[1] == pytest.approx(1.0, abs=1e-12)
    assert last[1] == pytest.approx(0.0, abs=1e-12)


def test_evolve_outputs(tmp_path, capsys):
    data = demo_scenario()
    data["evolve"] = {
        "nx": 128,
        "dt": 5e-8,
        "n_steps": 40,
        "sample_every": 10,
        "init": {"kind": "gaussian", "center": 0.005, "width": 0.001,
                 "n_photons": 10.0},
    }
    cfg = write_config(tmp_path / "cfg.json", data)
    code, summary, _ = run_cli(capsys, "evolve", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["norm"][0] == pytest.approx(10.0, rel=1e-6)
    traj = (tmp_path / "out" / "trajectory.csv").read_text().splitlines()
    assert len(traj) == 6  # header + t=0 + 4 samples
    final = (tmp_path / "out" / "final_state.csv").read_text().splitlines()
    assert final[0] == "z_m,psi_up_re,psi_up_im,psi_down_re,psi_down_im"
    assert len(final) == 129


def test_transport_outputs(tmp_path, capsys):
    data = {
        "schema_version": 1,
        "optical": {
            "omega_plus": 1.5, "omega_minus": 1.5,
            "delta": 0.03, "delta_same": 1e4, "delta_cross": 1e4,
            "gamma_abs": 1.0, "v_empty": 1.0, "n_z": 1.0, "g2nz": 18.0,
            "n_ph": 1.0, "length": 1.0, "n_photons": 1.0,
        },
        "transport": {
            "nx": 128, "dt": 1.5e-4, "n_steps": 400,
            "sample_every": 10, "center": 0.5, "width": 0.1,
        },
    }
    cfg = write_config(tmp_path / "cfg.json", data)
    code, summary, _ = run_cli(capsys, "transport", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["omega_d_rad_per_s"] == [600.0, 600.0]
    assert 0.0 < summary["windowed_rms_ratio"] < 0.2
    assert (tmp_path / "out" / "matching.csv").exists()


def ed_scenario(**extra):
    section = {
        "n_sites": 5, "n_total": 2, "hardcore": True, "periodic": True,
        "source": "direct", "j_hop": 1.0, "lam": 0.3, "u_cross": 2.0,
        "w": 0.5, "seed": 0,
    }
    section.update(extra)
    return {"schema_version": 1, "ed": section}


def test_ed_ground_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", ed_scenario())
    code, summary, _ = run_cli(capsys, "ed", "ground", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["hermiticity_defect"] == 0.0
    dens = (tmp_path / "out" / "densities.csv").read_text().splitlines()
    assert len(dens) == 6  # header + 5 sites
    totals = np.array([[float(x) for x in row.split(",")[1:]]
                       for row in dens[1:]])
    assert totals.sum() == pytest.approx(2.0, abs=1e-12)


def test_ed_correlate_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", ed_scenario())
    code, summary, _ = run_cli(capsys, "ed", "correlate", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["total_density"] == pytest.approx(2.0, abs=1e-12)
    table = (tmp_path / "out" / "density_correlations.csv").read_text().splitlines()
    assert len(table) == 101  # header + (2*5)^2 mode pairs
    assert (tmp_path / "out" / "spin_correlations.csv").exists()


def test_ed_identity_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json",
                       ed_scenario(n_random_states=5))
    code, summary, _ = run_cli(capsys, "ed", "check-identity", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["max_residual_random"] < 1e-12
    assert summary["residual_ground_state"] < 1e-12


def test_ed_fermionization_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json",
                       ed_scenario(u_over_j=[1.0, 100.0]))
    code, summary, _ = run_cli(capsys, "ed", "check-fermionization",
                            "--config", cfg, "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert summary["max_deviation"] < 1e-10
    assert summary["softcore_deviation"][1] < summary["softcore_deviation"][0]
    assert (tmp_path / "out" / "fermionization.csv").exists()


def test_ed_from_optical_source(tmp_path, capsys):
    data = demo_scenario()
    data["ed"] = {
        "n_sites": 4, "n_total": 2, "hardcore": True,
        "source": "optical", "spacing": 1e-6, "seed": 0,
    }
    cfg = write_config(tmp_path / "cfg.json", data)
    code, summary, _ = run_cli(capsys, "ed", "ground", "--config", cfg,
                            "--out", str(tmp_path / "out"))
    assert code == EXIT_OK
    assert np.isfinite(summary["energy"])


def test_version_flag():
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
