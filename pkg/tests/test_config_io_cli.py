import numpy as np
import pytest

from dlrbgk import config, io
from dlrbgk.cli import main, slice_rows
from dlrbgk.errors import ConfigError, GridMismatchError
from dlrbgk.grids import make_grids, SpatialGrid
from dlrbgk.maxwell import MomentState
from dlrbgk.runner import OUTPUT_ENV, run
from dlrbgk.scenarios import beam_init

TINY = ["nx=8", "ny=8", "nv=8", "rank=2", "dt=1e-3", "t_end=5e-3", "diag_every=1", "eps=0.1"]


def test_parse_text_comments_and_types():
    vals = config.parse_text("# c\nnx = 16  # trailing\n\nscenario = beam\nsnapshot_times = 0.1, 0.2\n")
    cfg = config.ScenarioConfig(**config._coerce_all(vals))
    assert cfg.nx == 16 and cfg.scenario == "beam" and cfg.snapshot_times == (0.1, 0.2)


def test_presets_and_overrides(tmp_path):
    cfg = config.load("shear-flow", ["rank=5", "figures=false"])
    assert cfg.rank == 5 and cfg.figures is False and cfg.nx == 64
    f = tmp_path / "c.txt"
    f.write_text("preset = beam\nnv = 64\n")
    cfg = config.load(str(f), ["eps=0.5"])
    assert (cfg.scenario, cfg.nv, cfg.eps) == ("beam", 64, 0.5)
    for name in config.PRESETS:
        assert config.preset(name).scenario == name
    with pytest.raises(ConfigError):
        config.load(str(tmp_path / "missing.txt"))


@pytest.mark.parametrize("bad", [["nx=7"], ["nope=1"], ["rank=0"], ["disc=weno"], ["nx=abc"], ["dt"], ["figures=maybe"]])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        config.load("custom", bad)


def test_config_roundtrip_text(tmp_path):
    cfg = config.load("explosion", ["snapshot_times=0.1,0.3"])
    f = tmp_path / "c.txt"
    f.write_text(cfg.to_text())
    assert config.load(str(f)) == cfg


def test_snapshot_roundtrip(tmp_path, rng):
    xg, vg = make_grids(8, 6, 16)
    mom, st = beam_init(xg, vg, 2)
    mom = MomentState(mom.rho + 0.01 * rng.standard_normal(xg.shape), mom.u)
    stem = io.write_snapshot(tmp_path / "s", 0.25, 7, mom, xg, st)
    snap = io.read_snapshot(str(stem) + ".hdr")
    assert snap.time == 0.25 and snap.step == 7
    np.testing.assert_array_equal(snap.rho, mom.rho)
    back = snap.lowrank()
    for a in ("X", "S", "V"):
        np.testing.assert_array_equal(getattr(back, a), getattr(st, a))
    assert (stem.with_suffix(".bin")).stat().st_size == 8 * (48 + 96 + 2 * 48 + 4 + 2 * 256)


def test_snapshot_corruption_is_config_error(tmp_path):
    xg = SpatialGrid(4, 4)
    stem = io.write_snapshot(tmp_path / "s", 0.0, 0, MomentState(np.ones(xg.shape), np.zeros((2, 4, 4))), xg)
    with open(stem.with_suffix(".bin"), "ab") as fh:
        fh.write(b"\0" * 8)
    with pytest.raises(ConfigError):
        io.read_snapshot(stem)


def test_compare_injection_and_mismatch(tmp_path):
    fine, coarse = SpatialGrid(8, 8), SpatialGrid(4, 4)
    X, Y = fine.mesh()
    rho = 1 + 0.1 * np.sin(2 * np.pi * X)
    a = io.write_snapshot(tmp_path / "a", 0, 0, MomentState(rho, np.zeros((2, 8, 8))), fine)
    b = io.write_snapshot(tmp_path / "b", 0, 0, MomentState(rho[::2, ::2] + 1e-3, np.zeros((2, 4, 4))), coarse)
    d = io.moment_differences(io.read_snapshot(a), io.read_snapshot(b))
    assert d["rho"] == pytest.approx(1e-3) and d["momentum"] == 0
    c = io.write_snapshot(tmp_path / "c", 0, 0, MomentState(np.ones((6, 6)), np.zeros((2, 6, 6))), SpatialGrid(6, 6))
    with pytest.raises(GridMismatchError):
        io.moment_differences(io.read_snapshot(a), io.read_snapshot(c))
    assert main(["compare", str(a), str(c)]) == 1


def test_run_outputs_and_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    cfg = config.load("custom", TINY + ["output_dir=" + str(tmp_path / "ignored")])
    res = run(cfg)
    assert res.output_dir == tmp_path / "env"
    header, rows = io.read_csv(res.diagnostics)
    t = [float(r[0]) for r in rows]
    assert len(rows) == 6 and all(b > a for a, b in zip(t, t[1:]))
    mass = [float(r[header.index("mass")]) for r in rows]
    assert max(abs(m - mass[0]) for m in mass) < 1e-13
    assert [p.name for p in res.figures] == ["diagnostics.png", "fields_final.png", "g_slice_final.png"]
    assert all(p.stat().st_size > 0 for p in res.figures)
    assert not (tmp_path / "ignored").exists()


def test_reruns_are_bit_identical(tmp_path):
    outs = []
    for k in range(2):
        res = run(config.load("custom", TINY + [f"output_dir={tmp_path / str(k)}", "figures=0"]))
        outs.append(res.snapshots[-1].with_suffix(".bin").read_bytes())
    assert outs[0] == outs[1]


def test_cli_run_compare_slice(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "custom", *sum([["--override", o] for o in TINY], []), "--override", f"output_dir={out}"]) == 0
    snap = sorted(out.glob("snap_*.hdr"))[-1]
    assert main(["compare", str(snap), str(snap)]) == 0
    assert "moment error = 0.000000e+00" in capsys.readouterr().out
    assert main(["slice", str(snap), "--plane", "velocity", "--ix", "1", "--iy", "2", "--output", str(tmp_path / "v.csv")]) == 0
    header, rows = io.read_csv(tmp_path / "v.csv")
    assert header == ["v", "w", "g"] and len(rows) == 64
    assert main(["slice", str(snap), "--plane", "space", "--iv", "0", "--iw", "3"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 65
    assert main(["slice", str(snap), "--plane", "moments", "--iy", "0"]) == 0
    assert main(["slice", str(snap), "--plane", "velocity", "--ix", "1"]) == 1
    assert main(["slice", str(snap), "--plane", "space", "--iv", "99", "--iw", "0"]) == 1


def test_slice_values_match_state():
    xg, vg = make_grids(4, 4, 16)
    mom, st = beam_init(xg, vg, 2)
    snap = io.Snapshot(0.0, 0, xg, {"rho": mom.rho, "u": mom.u, "X": st.X, "S": st.S, "V": st.V}, vg)
    _, rows = slice_rows(snap, "space", iv=3, iw=5)
    np.testing.assert_allclose([r[2] for r in rows], st.full()[:, :, 3, 5].ravel(), rtol=1e-12)


def test_cli_exit_codes(tmp_path):
    assert main(["run", "no-such-preset"]) == 1
    assert main(["run", "custom", "--override", "rank=-1"]) == 1
    # a huge time step drives the density negative
    code = main(["run", "custom", "--override", "solver=fluid", "--override", "dt=0.5", "--override", "t_end=5",
                 "--override", "amplitude=0.9", "--override", f"output_dir={tmp_path}", "--override", "figures=0"])
    assert code == 2
