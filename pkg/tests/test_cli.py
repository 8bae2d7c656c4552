import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from dunklhp.atoms import atom_from_json, atom_to_json
from dunklhp.cli import (
    DEFAULTS,
    ConfigError,
    RunConfig,
    _grid,
    main,
    num_threads,
    rows_to_csv,
)


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_dunkl_kernel_rows(capsys):
    code, out, _ = _run(["eval", "dunkl-kernel", "--lambda", "1"], capsys)
    rows = _csv(out)
    assert code == 0
    assert rows[0] == ["x", "xi", "value_re", "value_im"]
    assert len(rows) == 1 + 64
    z = float(rows[10][0])
    s, c = np.sin(z), np.cos(z)
    # E_1(iz) = j_{1/2}(z) + i z j_{3/2}(z) / 3
    re, im = float(rows[10][2]), float(rows[10][3])
    assert re == pytest.approx(s / z, rel=1e-12)
    assert im == pytest.approx((s - z * c) / z**2, rel=1e-12)


def test_transform_csv_matches_gaussian(capsys):
    code, out, _ = _run(["eval", "transform"], capsys)
    rows = _csv(out)[1:]
    xi = np.array([float(r[0]) for r in rows])
    vals = np.array([complex(float(r[1]), float(r[2])) for r in rows])
    assert code == 0 and xi.size == 41
    assert np.abs(vals - np.exp(-xi**2 / 2)).max() < 1e-6


@pytest.mark.parametrize("subject, ncol", [("kernel-h", 4), ("kernel-p", 5), ("kernel-q", 5)])
def test_kernel_tables(subject, ncol, capsys):
    code, out, _ = _run(["eval", subject], capsys)
    rows = _csv(out)
    assert code == 0 and all(len(r) == ncol for r in rows)
    assert len(rows) - 1 == 8 * 7 * (1 if subject == "kernel-h" else 3)


def test_kernel_p_at_zero_height(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grids": {"y": [0.0]}}))
    code, out, err = _run(["eval", "kernel-p", "--config", str(cfg)], capsys)
    assert code == 2 and out == "" and "y > 0" in err


def test_csv_uses_lf_and_full_precision(tmp_path, capsys):
    path = tmp_path / "k.csv"
    assert _run(["eval", "kernel-h", "--out", str(path)], capsys)[0] == 0
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    assert raw.splitlines()[1].split(b",")[0] == b"-3.500000000000000e+00"


def test_non_finite_output_is_refused():
    with pytest.raises(ArithmeticError):
        rows_to_csv(["a"], [(float("nan"),)])


def test_atom_auto_kappa(capsys):
    code, out, _ = _run(["atom", "--lambda", "1", "--p", "0.7"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["kappa"] == 2
    assert list(doc) == ["lambda", "p", "x0", "delta0", "kappa", "coeffs", "sup_bound"]


def test_atom_round_trips_bytes(capsys):
    _, out, _ = _run(["atom", "--p", "0.8", "--kappa", "4"], capsys)
    assert atom_to_json(atom_from_json(out)) + "\n" == out


def test_atom_bad_delta(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"x0": 2.0, "delta0": 1.0}))
    code, _, err = _run(["atom", "--config", str(cfg)], capsys)
    assert code == 2 and "delta0" in err


def test_flags_override_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lambda": 2.0, "p": 0.9}))
    _, out, _ = _run(["atom", "--config", str(cfg), "--lambda", "1.0"], capsys)
    doc = json.loads(out)
    assert doc["lambda"] == 1.0 and doc["p"] == 0.9


@pytest.mark.parametrize("argv", [
    ["eval", "kernel-x"],
    ["verify", "--suite", "everything"],
    ["atom", "--kappa", "two"],
    ["atom", "--kappa", "1"],
    ["atom", "--config", "/nonexistent/cfg.json"],
])
def test_invalid_invocations_exit_2(argv, capsys):
    assert _run(argv, capsys)[0] == 2


def test_verify_paley_range(capsys):
    code, out, _ = _run(["verify", "--suite", "paley", "--p", "0.6"], capsys)
    assert code == 2 and out == ""


def test_verify_estimates_pass(capsys):
    code, out, err = _run(["verify", "--suite", "estimates"], capsys)
    lines = out.splitlines()
    assert code == 0 and err == ""
    assert len(lines) == 5
    docs = [json.loads(line) for line in lines]
    assert all(d["pass"] for d in docs)
    assert [d["name"] for d in docs] == ["estimate_b(k=2)", "estimate_b(k=3)", "estimate_a", "estimate_c", "estimate_d"]


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    path = tmp_path_factory.mktemp("verify") / "all.jsonl"
    code = main(["verify", "--suite", "all", "--out", str(path)])
    return code, path.read_text()


def test_verify_all_emits_every_report(full_run):
    code, text = full_run
    docs = [json.loads(line) for line in text.splitlines()]
    assert len(docs) >= 12
    assert len({d["name"] for d in docs}) == len(docs)
    assert code == (0 if all(d["pass"] for d in docs) else 1)
    for d in docs:
        assert d["params"]["seed"] == 0
        for key in ("computed", "envelope", "ratio", "truncation_error"):
            assert d[key] is not None and np.isfinite(d[key])


def test_config_grid_specs():
    assert np.allclose(_grid([1, 2], "g"), [1.0, 2.0])
    assert np.allclose(_grid({"kind": "geometric", "lo": 1, "hi": 100, "count": 3}, "g"), [1, 10, 100])
    for bad in ({"kind": "geometric", "lo": 0, "hi": 1, "count": 3}, {"kind": "log", "lo": 1, "hi": 2, "count": 2},
                {"kind": "linear", "lo": 1, "hi": 2}, "1..2", [float("nan")]):
        with pytest.raises(ConfigError):
            _grid(bad, "g")


@pytest.mark.parametrize("raw", [{"mu": 1}, {"grids": {"w": [1]}}, {"tolerances": {"paley": "wide"}},
                                 {"kappa": 1.5}, {"profile": "box"}, {"lambda": float("inf")}])
def test_config_rejects(raw):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(raw)


def test_config_defaults():
    cfg = RunConfig.from_dict({})
    assert cfg.lam == DEFAULTS["lambda"] and cfg.resolved_kappa() == 0
    assert cfg.grids["z"].size == 64


def test_num_threads(monkeypatch):
    monkeypatch.delenv("DUNKL_NUM_THREADS", raising=False)
    assert num_threads() == 1
    monkeypatch.setenv("DUNKL_NUM_THREADS", "3")
    assert num_threads() == 3
    monkeypatch.setenv("DUNKL_NUM_THREADS", "0")
    with pytest.raises(ConfigError):
        num_threads()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dunklhp", "atom"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["kappa"] == 0
