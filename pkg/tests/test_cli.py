import json
import math
import shlex
from pathlib import Path

import numpy as np
import pytest

from bfcwalk import __version__
from bfcwalk.cli import main, parse_range
from bfcwalk.state import SpectralPhaseProfile, make_maximal_state
from bfcwalk.walk import ModulatorConfig, biphoton_jsi


def run(args, tmp_path):
    return main(shlex.split(args) + ["--out-dir", str(tmp_path)])


def read_matrix(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    ks = [int(x) for x in lines[0].split(",")[1:]]
    js, rows = [], []
    for line in lines[1:]:
        parts = line.split(",")
        js.append(int(parts[0]))
        rows.append([float(x) for x in parts[1:]])
    return js, ks, np.array(rows)


def test_parse_range():
    assert parse_range("0:0.5:6") == [0.5 * i for i in range(13)]
    assert parse_range("1,2,4.5") == [1.0, 2.0, 4.5]
    assert parse_range("2:1:8", integer=True) == list(range(2, 9))
    assert parse_range("0.1:0.1:0.3") == pytest.approx([0.1, 0.2, 0.3])
    for bad in ("1:0:3", "1:2", "3:1:1"):
        with pytest.raises(ValueError):
            parse_range(bad)
    with pytest.raises(ValueError):
        parse_range("1.5,2", integer=True)


def test_jsi_command(tmp_path):
    assert run("jsi --d 8 --profile fermionic --delta 6.1", tmp_path) == 0
    assert {p.name for p in tmp_path.iterdir()} == {"jsi.csv", "jsi.pgm", "manifest.json"}
    js, ks, vals = read_matrix(tmp_path / "jsi.csv")
    ref = biphoton_jsi(make_maximal_state(8, SpectralPhaseProfile.fermionic()), ModulatorConfig(6.1))
    assert js == ref.j_axis.tolist() and ks == ref.k_axis.tolist()
    np.testing.assert_allclose(vals, ref.values, rtol=1e-11, atol=1e-300)
    assert abs(vals.sum(axis=1).sum() - 1.0) < 1e-9
    assert abs(vals.sum(axis=0).sum() - 1.0) < 1e-9
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["version"] == __version__
    assert manifest["config"]["command"] == "jsi"
    assert manifest["config"]["profile"]["slope_a"] == math.pi
    assert manifest["diagnostics"]["normalization_residual"] < 1e-9


def test_single_walk_zero_depth(tmp_path):
    assert run("single-walk --delta 0", tmp_path) == 0
    lines = (tmp_path / "single_walk.csv").read_text().splitlines()
    assert lines == ["n,P", "0,1.00000000000e+00"]


def test_sweep_depth_command(tmp_path):
    assert run("sweep-depth --d 8 --profile bosonic --deltas 0:0.5:6", tmp_path) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "delta,mean,sigma,sigma_single"
    assert len(lines) == 14
    sigma = [float(line.split(",")[2]) for line in lines[1:]]
    assert all(b >= a for a, b in zip(sigma, sigma[1:]))


def test_sweep_dimension_command(tmp_path):
    assert run("sweep-dimension --profile fermionic --delta 6.1 --dims 2,4,8", tmp_path) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["2", "4", "8"]


def test_transfer_command(tmp_path):
    assert run("transfer --d 8 --profile fermionic --delta 6.1", tmp_path) == 0
    diag = json.loads((tmp_path / "manifest.json").read_text())["diagnostics"]
    assert diag["antidiag_mass"] == pytest.approx(0.445133813927674, abs=1e-9)
    rows = (tmp_path / "transfer.csv").read_text().splitlines()
    assert rows[0] == "u,P"


def test_incoherent_and_sample(tmp_path):
    assert run("incoherent --d 4 --delta 1 --no-pgm", tmp_path / "a") == 0
    assert not (tmp_path / "a" / "jsi.pgm").exists()
    assert run("sample --d 8 --delta 0 --counts 8000 --seed 5", tmp_path / "b") == 0
    js, ks, counts = read_matrix(tmp_path / "b" / "counts.csv")
    assert np.count_nonzero(counts) == 8
    assert (tmp_path / "b" / "counts.pgm").exists()


def test_custom_profile_flags(tmp_path):
    assert run("jsi --d 3 --thetas 0,1,2 --delta 1", tmp_path) == 0
    cfg = json.loads((tmp_path / "manifest.json").read_text())["config"]
    assert cfg["profile"]["kind"] == "custom"
    assert cfg["profile"]["custom_thetas"] == [0.0, 1.0, 2.0]


def test_config_file_and_flag_override(tmp_path):
    cfg = {"command": "jsi", "d": 4, "delta": 1.0, "profile": "anyonic", "emit_pgm": False}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "o"
    assert main(["jsi", "--config", str(path), "--delta", "2.5", "--out-dir", str(out)]) == 0
    resolved = json.loads((out / "manifest.json").read_text())["config"]
    assert resolved["delta"] == 2.5
    assert resolved["d"] == 4
    assert resolved["profile"]["slope_a"] == pytest.approx(math.pi / 2)
    assert not (out / "jsi.pgm").exists()


def test_manifest_round_trip(tmp_path):
    first = tmp_path / "first"
    assert run("sweep-depth --d 4 --profile quadratic --curvature 0.3 --theta0 1 --deltas 0:1:3", first) == 0
    second = tmp_path / "second"
    assert main(["run", "--config", str(first / "manifest.json"), "--out-dir", str(second)]) == 0
    assert (first / "sweep.csv").read_bytes() == (second / "sweep.csv").read_bytes()


@pytest.mark.parametrize(
    "args, field",
    [
        ("jsi --d 0", "d"),
        ("jsi --delta -1", "delta"),
        ("jsi --profile spinning", "profile"),
        ("sweep-depth --d 2", "deltas"),
        ("sweep-dimension --delta 1", "dims"),
        ("sample --delta 1", "counts"),
        ("sample --counts -5", "counts"),
        ("jsi --d 3 --thetas 0,1", "profile"),
        ("sweep-depth --deltas 1:0:3", "deltas"),
        ("jsi --epsilon 2", "epsilon"),
        ("sample --counts 10 --seed -1", "seed"),
    ],
)
def test_invalid_config_exit_2(args, field, tmp_path, capsys):
    assert run(args, tmp_path) == 2
    err = capsys.readouterr().err
    assert f"field {field}" in err


def test_bad_config_files(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["jsi", "--config", str(bad)]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"dimension": 3}))
    assert main(["jsi", "--config", str(unknown)]) == 2
    assert "field dimension" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    nocmd = tmp_path / "nocmd.json"
    nocmd.write_text(json.dumps({"d": 2}))
    assert main(["run", "--config", str(nocmd)]) == 2


def test_normalization_violation_exit_3(tmp_path, capsys):
    assert run("jsi --d 2 --delta 4.6 --epsilon 0.3", tmp_path) == 3
    assert "normalization residual" in capsys.readouterr().err
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["diagnostics"]["normalization_residual"] > 1e-6


def test_outputs_are_lf_utf8(tmp_path):
    assert run("transfer --d 2 --delta 1", tmp_path) == 0
    for name in ("transfer.csv", "manifest.json"):
        data = (tmp_path / name).read_bytes()
        assert b"\r" not in data
        data.decode("utf-8")
