import json
import subprocess
import sys
from pathlib import Path

from finps.cli import main

SPECS = Path(__file__).resolve().parent.parent / "specs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_discchain_machine(capsys):
    code, out, _ = run(capsys, "analyze", SPECS / "discchain.json", "--format", "machine", "--strict")
    assert code == 0
    rep = json.loads(out)
    assert [b["states"] for b in rep["blocks"] if b["positive"]] == [["c"], ["d", "e"]]
    assert rep["p_inv"] == ["0", "0", "1/3", "2/3"]
    assert rep["e_D"]["rows"][3] == ["0", "0", "0", "2/5", "3/5"]
    assert rep["strict"]["same_as_almost_sure"] is False
    assert rep["strict"]["quotients_isomorphic"] is True
    assert rep["ok"] is True


def test_analyze_report_prints_columns(capsys):
    code, out, _ = run(capsys, "analyze", "fixture:discchain")
    assert code == 0
    assert "e_D (column = source):" in out
    assert "p_inv: (0, 0, 1/3, 2/3)" in out


def test_output_is_deterministic(capsys):
    _, a, _ = run(capsys, "analyze", "fixture:discchain", "--format", "machine", "--seed", "4")
    _, b, _ = run(capsys, "analyze", "fixture:discchain", "--format", "machine", "--seed", "4")
    assert a == b


def test_validation_error_object(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"states": ["a", "b"], "dist": ["1/2", "1/2"],
                               "generators": [{"name": "m", "matrix": [["1/2", "1/3"], ["0", "1"]]}]}))
    code, out, err = run(capsys, "analyze", bad)
    assert code == 1 and out == ""
    obj = json.loads(err)
    assert obj["error"]["kind"] == "validation"
    assert obj["error"]["path"] == "generators[0].matrix[0]"
    assert "5/6" in obj["error"]["message"]


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", tmp_path / "nope.json")
    assert code == 1 and json.loads(err)["error"]["kind"] == "validation"


def test_exchangeable_uniform(capsys):
    code, out, _ = run(capsys, "exchangeable", "--base", "0,1", "--n", "3", "--format", "machine")
    assert code == 0
    rep = json.loads(out)
    assert rep["orbit_count"] == 4
    assert [o["mass"] for o in rep["orbits"]] == ["1/8", "3/8", "3/8", "1/8"]
    assert [d["weight"] for d in rep["decomposition"]] == ["1/8", "3/8", "3/8", "1/8"]


def test_exchangeable_rejects_non_exchangeable(capsys):
    code, _, err = run(capsys, "exchangeable", "--base", "0,1", "--n", "2", "--dist", "1/2,1/2,0,0")
    assert code == 1
    assert json.loads(err)["error"]["witness"]["transposition"] == [1, 2]


def test_split(capsys):
    code, out, _ = run(capsys, "split", SPECS / "idempotent.json", "--format", "machine")
    assert code == 0
    rep = json.loads(out)
    assert rep["mid"]["p"] == ["0", "0", "1/3", "2/3"]
    assert [p["side"] for p in rep["probes"]] == ["coequalizer", "none", "equalizer"]


def test_split_needs_flag(capsys):
    code, _, err = run(capsys, "split", "fixture:discchain")
    assert code == 1 and "idempotent" in json.loads(err)["error"]["message"]


def test_split_not_idempotent(capsys, tmp_path):
    spec = json.loads((SPECS / "discchain.json").read_text())
    spec["generators"][0]["idempotent"] = True
    path = tmp_path / "s.json"
    path.write_text(json.dumps(spec))
    code, _, err = run(capsys, "split", path)
    assert code == 1 and json.loads(err)["error"]["kind"] == "precondition"


def test_axioms(capsys):
    code, out, _ = run(capsys, "axioms", "--law", "comonoid", "--law", "dag-id", "--cases", "20",
                       "--format", "machine")
    assert code == 0
    rep = json.loads(out)
    assert [r["law"] for r in rep["laws"]] == ["comonoid", "dag-id"]
    assert all(r["cases"] == 20 and r["failures"] == [] for r in rep["laws"])


def test_axioms_failure_exit_code(capsys, monkeypatch):
    from finps import laws
    monkeypatch.setitem(laws.LAWS, "bogus", ("false", lambda rng, gen: (False, {"x": "1/2"}), None))
    code, _, err = run(capsys, "axioms", "--law", "bogus", "--cases", "2")
    assert code == 2
    obj = json.loads(err)
    assert obj["error"]["kind"] == "theorem-failure"
    assert obj["error"]["counterexample"]["counterexample"]["data"] == {"x": "1/2"}


def test_axioms_unknown_law(capsys):
    code, _, _ = run(capsys, "axioms", "--law", "nope")
    assert code == 1


def test_iso(capsys):
    code, out, _ = run(capsys, "iso", "fixture:partition-sketch", "fixture:partition-sketch",
                       "--format", "machine")
    assert code == 0 and json.loads(out)["isomorphic"] is True
    code, out, _ = run(capsys, "iso", "fixture:discchain", "fixture:seanexample", "--format", "machine")
    assert code == 0 and json.loads(out)["isomorphic"] is False


def test_dot(capsys):
    code, out, _ = run(capsys, "dot", "fixture:discchain")
    assert code == 0 and out.startswith("digraph")
    for label in ('"1/2"', '"1/3"', '"2/3"'):
        assert f"label={label}" in out
    assert 'fillcolor="#cccccc"' in out  # null block drawn grey


def test_partition_section(capsys):
    code, out, _ = run(capsys, "analyze", "fixture:partition-sketch", "--format", "machine")
    rep = json.loads(out)
    assert code == 0
    assert [b["mass"] for b in rep["partition"]["blocks"]] == ["3/5", "2/5", "0"]


def test_plot_dir(capsys, tmp_path):
    code, out, _ = run(capsys, "analyze", "fixture:discchain", "--format", "machine",
                       "--plot-dir", tmp_path / "figs")
    assert code == 0
    files = json.loads(out)["figures"]
    assert all(Path(f).stat().st_size > 0 for f in files)
    assert {Path(f).name for f in files} >= {"e_D.png", "p.png", "p_inv.png"}
    code, out, _ = run(capsys, "exchangeable", "--base", "0,1", "--n", "2", "--format", "machine",
                       "--plot-dir", tmp_path / "figs")
    assert Path(json.loads(out)["figures"][0]).exists()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "finps.cli", "dot", "fixture:seanexample"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "digraph" in proc.stdout


def test_stdin_spec(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO((SPECS / "seanexample.json").read_text()))
    code, out, _ = run(capsys, "analyze", "-", "--format", "machine")
    assert code == 0 and json.loads(out)["p_inv"] == ["1/2", "0", "1/2"]
