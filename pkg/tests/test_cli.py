import os
import time

import numpy as np
import pytest

import chono.assembly
from chono import cli
from chono.io import load_config, parse_config, read_series, read_snapshot_csv

TINY = """
nx = 6
ny = 6
dt = 0.005
t_end = 0.05
tau_v = 100
sigma = 100
alpha = 0.01
beta = -0.9
v_bar = 0
snapshot_times = 0, 0.05
series_every = 2
"""


@pytest.fixture
def tiny_cfg(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY, encoding="utf-8")
    return path


def run_cli(*argv):
    return cli.main(list(argv))


def test_run_writes_series_and_snapshots(tiny_cfg, tmp_path):
    out = tmp_path / "out"
    assert run_cli("run", "--config", str(tiny_cfg), "--output", str(out)) == 0
    records = read_series(out / "series.csv")
    assert [round(r.t / 0.005) for r in records] == [0, 2, 4, 6, 8, 10]
    for name in ("snapshot_u_t0.csv", "snapshot_v_t0.csv",
                 "snapshot_u_t0.05.csv", "snapshot_v_t0.05.csv",
                 "run_config.cfg", "series.csv"):
        assert (out / name).exists()
    x, y, values = read_snapshot_csv(out / "snapshot_u_t0.05.csv")
    assert len(values) == 49
    # u-mass conserved along the run
    assert records[-1].mass_u == pytest.approx(records[0].mass_u, abs=1e-9)


def test_run_vtk_format(tiny_cfg, tmp_path):
    out = tmp_path / "out"
    assert run_cli("run", "--config", str(tiny_cfg), "--output", str(out),
                   "--snapshot-format", "vtk", "--fields", "u") == 0
    assert (out / "snapshot_u_t0.05.vtk").exists()
    assert not (out / "snapshot_v_t0.05.vtk").exists()


def test_dump_config_roundtrips(tiny_cfg, capsys):
    assert run_cli("run", "--config", str(tiny_cfg), "--dump-config") == 0
    echoed = capsys.readouterr().out
    assert parse_config(echoed) == load_config(tiny_cfg)


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nx = 8\nny = 8\ndt = 0\nt_end = 1\n", encoding="utf-8")
    assert run_cli("run", "--config", str(bad)) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert run_cli("run", "--config", str(tmp_path / "absent.cfg")) == cli.EXIT_CONFIG


def test_bad_expression_is_config_error(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text('nx = 4\nny = 4\ndt = 0.01\nt_end = 0.02\nu0 = "sin("\n',
                   encoding="utf-8")
    assert run_cli("run", "--config", str(bad)) == cli.EXIT_CONFIG


def test_wvv_terminates_via_blowup_exit(tmp_path, capsys):
    cfg = tmp_path / "wvv.cfg"
    cfg.write_text(
        "nx = 6\nny = 6\ndt = 0.005\nt_end = 10\n"
        'u0 = "sin(x*y)"\nscheme = wvv\n'
        "tau_v = 1\nsigma = 0.3\nalpha = 0.5\nbeta = 0.8\nseries_every = 20\n",
        encoding="utf-8")
    out = tmp_path / "out"
    assert run_cli("run", "--config", str(cfg), "--output", str(out)) == cli.EXIT_BLOWUP
    assert "blow-up at step" in capsys.readouterr().err
    # partial series preserved
    records = read_series(out / "series.csv")
    assert len(records) >= 1 and records[0].t == 0.0


def test_compare_zip_and_conservation(tiny_cfg, tmp_path, capsys):
    out = tmp_path / "cmp"
    # alpha = beta = 0 variant: od2 and ls both conserve the u-mass exactly
    cfg = tmp_path / "nocouple.cfg"
    cfg.write_text(TINY.replace("alpha = 0.01", "alpha = 0")
                   .replace("beta = -0.9", "beta = 0"), encoding="utf-8")
    assert run_cli("compare", "--config", str(cfg), "--schemes", "od2,ls",
                   "--dts", "0.005", "--output", str(out)) == 0
    lines = (out / "compare.csv").read_text().splitlines()
    assert lines[0].startswith("scheme,dt,completed,steps,status")
    assert len(lines) == 3
    od2 = lines[1].split(",")
    ls = lines[2].split(",")
    assert od2[0] == "od2" and ls[0] == "ls"
    assert od2[2] == "true" and ls[2] == "true"
    assert float(od2[5]) == pytest.approx(float(ls[5]), abs=1e-8)  # final u masses


def test_compare_single_pair(tiny_cfg, tmp_path):
    out = tmp_path / "cmp1"
    assert run_cli("compare", "--config", str(tiny_cfg), "--schemes", "ey",
                   "--dts", "0.005", "--output", str(out)) == 0
    assert len((out / "compare.csv").read_text().splitlines()) == 2


def test_compare_mismatched_lists(tiny_cfg):
    assert run_cli("compare", "--config", str(tiny_cfg), "--schemes", "od2,ls,ey",
                   "--dts", "0.005,0.001") == cli.EXIT_CONFIG


def test_sweep_manifest_order(tiny_cfg, tmp_path):
    out = tmp_path / "sweep"
    assert run_cli("sweep", "--config", str(tiny_cfg), "--param", "tau_v",
                   "--values", "10,250", "--output", str(out)) == 0
    lines = (out / "sweep_manifest.csv").read_text().splitlines()
    assert lines[0] == "param,value,path,status"
    assert [l.split(",")[1] for l in lines[1:]] == ["10", "250"]
    for label in ("10", "250"):
        sub = out / f"tau_v_{label}"
        assert (sub / "series.csv").exists()
        assert load_config(sub / "run_config.cfg").tau_v == float(label)


def test_sweep_empty_values_is_config_error(tiny_cfg):
    assert run_cli("sweep", "--config", str(tiny_cfg), "--param", "tau_v",
                   "--values", " , ") == cli.EXIT_CONFIG
    assert run_cli("sweep", "--config", str(tiny_cfg), "--param", "nx",
                   "--values", "1,2") == cli.EXIT_CONFIG


def test_sweep_parallel_jobs(tiny_cfg, tmp_path):
    out = tmp_path / "psweep"
    assert run_cli("sweep", "--config", str(tiny_cfg), "--param", "sigma",
                   "--values", "0,50", "--jobs", "2", "--output", str(out)) == 0
    lines = (out / "sweep_manifest.csv").read_text().splitlines()
    assert [l.split(",")[1] for l in lines[1:]] == ["0", "50"]


def test_verify_quick_passes_fast(capsys):
    start = time.monotonic()
    assert run_cli("verify", "--level", "quick") == 0
    assert time.monotonic() - start < 10.0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_verify_full_includes_energy_decay(capsys):
    assert run_cli("verify", "--level", "full") == 0
    out = capsys.readouterr().out
    assert "energy decay" in out
    assert "FAIL" not in out


def test_verify_catches_injected_stiffness_sign_flip(monkeypatch, capsys):
    true_stiffness = chono.assembly.stiffness_matrix
    monkeypatch.setattr(chono.assembly, "stiffness_matrix",
                        lambda mesh: -true_stiffness(mesh))
    assert run_cli("verify", "--level", "quick") == cli.EXIT_VERIFY
    assert "FAIL" in capsys.readouterr().out


def test_mesh_info(capsys, tiny_cfg):
    assert run_cli("mesh-info", "--nx", "20", "--ny", "20") == 0
    out = capsys.readouterr().out
    assert "vertices:  441" in out and "triangles: 800" in out
    assert run_cli("mesh-info", "--config", str(tiny_cfg)) == 0
    assert "49" in capsys.readouterr().out
    assert run_cli("mesh-info") == cli.EXIT_CONFIG


def test_output_root_env(tiny_cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("CHONO_OUTPUT_ROOT", str(tmp_path / "root"))
    monkeypatch.chdir(tmp_path)
    assert run_cli("run", "--config", str(tiny_cfg)) == 0
    assert (tmp_path / "root" / "out" / "series.csv").exists()
