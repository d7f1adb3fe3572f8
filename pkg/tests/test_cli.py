import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import w
from hororadon import Tree, VertexFunction, radon
from hororadon import io as hio
from hororadon.cli import main


def run(args, tmp_path, *extra):
    return main([*args, "--out", str(tmp_path / "out"), *extra])


def write_f(path, f):
    path.write_text(hio.dump_vertex_function(f))
    return str(path)


def test_selftest_default_passes(tmp_path, capsys):
    assert run(["selftest"], tmp_path) == 0
    doc = json.loads((tmp_path / "out" / "selftest_report.json").read_text())
    assert doc["pass"] and doc["first_failure"] is None
    assert doc["config"] == {"q": 2, "radius": 3, "M": 4096, "seed": 42}
    names = {r["condition"] for r in doc["reports"]}
    assert {"unitarity", "plancherel_weight", "range_cc", "reducibility_witness"} <= names


def test_selftest_underresolved_grid_fails_on_unitarity(tmp_path, capsys):
    assert run(["selftest", "--grid", "8"], tmp_path) == 1
    doc = json.loads((tmp_path / "out" / "selftest_report.json").read_text())
    assert doc["first_failure"] == "unitarity"
    assert "unitarity" in capsys.readouterr().err


def test_q1_is_usage_error_before_work(tmp_path, capsys):
    assert run(["selftest", "--q", "1"], tmp_path) == 2
    assert not (tmp_path / "out").exists()
    assert "--q" in capsys.readouterr().err


def test_bad_grid_is_usage_error(tmp_path):
    assert run(["selftest", "--grid", "100"], tmp_path) == 2


def test_unknown_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["selftest", "--bogus"])
    assert e.value.code == 2


def test_transform_delta(tmp_path):
    f = write_f(tmp_path / "f.json", VertexFunction.delta(Tree(2)))
    assert run(["transform", "--in", f, "--radius", "0"], tmp_path) == 0
    F = hio.load_horofunction((tmp_path / "out" / "horofunction.json").read_text())
    assert F.n_min == F.n_max == 0 and (F.values == 1).all()
    assert {p.name for p in (tmp_path / "out").iterdir()} == \
        {"horofunction.json", "hf_laurent.json", "q_grid.csv"}


def test_transform_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["transform", "--radius", "2", "--grid", "64", "--out", str(a)]) == 0
    assert main(["transform", "--radius", "2", "--grid", "64", "--out", str(b)]) == 0
    for name in ("f.json", "horofunction.json", "hf_laurent.json", "q_grid.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_transform_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"q": 2, "entries": [\n  {"word": [0], "re": }\n]}')
    assert run(["transform", "--in", str(bad)], tmp_path) == 2
    assert "line 2" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_transform_radius_overflow(tmp_path, capsys):
    f = write_f(tmp_path / "f.json", VertexFunction.delta(Tree(2), w("012")))
    assert run(["transform", "--in", f, "--radius", "2"], tmp_path) == 2
    assert "exceeds" in capsys.readouterr().err


@pytest.mark.parametrize("source", ["q_grid.csv", "hf_laurent.json"])
def test_transform_invert_round_trip(tmp_path, source):
    out = tmp_path / "out"
    assert main(["transform", "--q", "3", "--radius", "2", "--out", str(out)]) == 0
    assert main(["invert", "--in", str(out / source), "--radius", "2",
                 "--out", str(tmp_path / "inv")]) == 0
    f = hio.load_vertex_function((out / "f.json").read_text())
    g = hio.load_vertex_function((tmp_path / "inv" / "f_rounded.json").read_text())
    assert g == f
    summary = json.loads((tmp_path / "inv" / "invert_summary.json").read_text())
    assert summary["nearest_integer_residual"] <= 1e-8
    assert summary["norm_residual"] <= 1e-8


def test_invert_delta0_residual_table(tmp_path):
    f = write_f(tmp_path / "f.json", VertexFunction.delta(Tree(2), w("0")))
    assert run(["transform", "--in", f, "--radius", "1"], tmp_path) == 0
    assert main(["invert", "--in", str(tmp_path / "out" / "q_grid.csv"), "--radius", "2",
                 "--out", str(tmp_path / "inv")]) == 0
    rows = json.loads((tmp_path / "inv" / "invert_summary.json").read_text())["residuals"]
    for row in rows:
        expect = 1.0 if row["word"] == [0] else 0.0
        assert abs(row["value_re"] - expect) <= 1e-8 and abs(row["value_im"]) <= 1e-8


def test_invert_identity_laurent(tmp_path):
    doc = {"q": 2, "base": [], "depth": 0,
           "cylinders": [{"prefix": [], "coeffs": [{"n": 0, "re": 1.0, "im": 0.0}]}]}
    p = tmp_path / "one.json"
    p.write_text(json.dumps(doc))
    assert run(["invert", "--in", str(p), "--radius", "2"], tmp_path) == 0
    g = hio.load_vertex_function((tmp_path / "out" / "f_rounded.json").read_text())
    assert g == VertexFunction.delta(Tree(2))


def test_invert_q_mismatch(tmp_path, capsys):
    assert run(["transform", "--radius", "1", "--grid", "16"], tmp_path) == 0
    assert main(["invert", "--in", str(tmp_path / "out" / "q_grid.csv"), "--q", "3",
                 "--out", str(tmp_path / "inv")]) == 2
    assert "q=2" in capsys.readouterr().err


def _horofile(tmp_path, F, name="F.json"):
    p = tmp_path / name
    p.write_text(hio.dump_horofunction(F))
    return str(p)


def test_verify_radon_passes(tmp_path):
    F = radon(VertexFunction.random(Tree(2), 2, np.random.default_rng(51)))
    assert run(["verify", "--in", _horofile(tmp_path, F), "--radius", "2"], tmp_path) == 0
    out = tmp_path / "out"
    for name in ("range_cc", "flat", "sharp"):
        assert json.loads((out / f"{name}_report.json").read_text())["pass"]


def test_verify_perturbed_fails(tmp_path):
    F = radon(VertexFunction.random(Tree(2), 2, np.random.default_rng(52)))
    vals = F.values.copy()
    vals[0, 0] += 3
    G = type(F)(F.tree, F.base, F.depth, F.n_min, vals)
    assert run(["verify", "--in", _horofile(tmp_path, G)], tmp_path) == 1


def test_verify_empty_table(tmp_path):
    doc = {"q": 2, "base": [], "depth": 0, "n_min": 0, "n_max": 0, "values": []}
    p = tmp_path / "empty.json"
    p.write_text(json.dumps(doc))
    assert run(["verify", "--in", str(p)], tmp_path) == 0
    for name in ("range_cc", "flat", "sharp"):
        rep = json.loads((tmp_path / "out" / f"{name}_report.json").read_text())
        assert rep["max_residual"] == 0


def test_plotdata(tmp_path):
    M = 4096
    assert run(["plotdata", "--radius", "1", "--grid", str(M)], tmp_path) == 0
    out = tmp_path / "out"
    lines = (out / "w.csv").read_text().splitlines()
    assert len(lines) == M + 1 and lines[0].startswith("#")
    data = np.loadtxt(out / "w.csv")
    assert data[0, 1] == 0
    t2 = Tree(2)
    assert data[-1, 0] == pytest.approx(t2.T)
    h = np.diff(data[:, 0])
    integral = np.sum(h * (data[1:, 1] + data[:-1, 1]) / 2)
    assert integral / t2.T == pytest.approx(1 / float(t2.c_q), abs=1e-8)
    m = np.loadtxt(out / "m.csv")
    assert m.shape == (M, 2)
    hf = sorted(p.name for p in out.glob("hf_abs_*.csv"))
    assert hf == ["hf_abs_0.csv", "hf_abs_1.csv", "hf_abs_2.csv"]
    assert np.loadtxt(out / "hf_abs_0.csv").shape == (M, 2)


def test_plotdata_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["plotdata", "--radius", "1", "--grid", "64", "--out", str(a)])
    main(["plotdata", "--radius", "1", "--grid", "64", "--out", str(b)])
    assert sorted(p.name for p in a.iterdir()) == sorted(p.name for p in b.iterdir())
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_demo_reducibility(tmp_path):
    assert run(["demo-reducibility", "--radius", "2"], tmp_path) == 0
    rep = json.loads((tmp_path / "out" / "reducibility_report.json").read_text())
    assert rep["pass"] and rep["residuals"]["coefficient"] <= 1e-12


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HORORADON_OUT", str(tmp_path / "envout"))
    assert main(["plotdata", "--radius", "0", "--grid", "16"]) == 0
    assert (tmp_path / "envout" / "w.csv").exists()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hororadon.cli", "selftest", "--q", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
