import json
import subprocess
import sys

import pytest

from perfectforms.cli import main
from perfectforms.qform import catalog_form, format_form, read_form
from perfectforms.voronoi import ClassificationState


def write_form(tmp_path, name, A):
    p = tmp_path / f"{name}.form"
    p.write_text(format_form(A))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_json_and_state(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("VORONOI_STATE_DIR", str(tmp_path))
    code, out, _ = run(capsys, "classify", "--dim", "4", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["perfect"] == 2 and rep["extreme"] == 2 and rep["complete"]
    assert rep["maximizer"]["name"] == "D4"
    assert (tmp_path / "classify-d4.json").exists()
    # refusing to clobber an existing state
    code, _, err = run(capsys, "classify", "--dim", "4")
    assert code == 1 and "--resume" in err


def test_classify_partial_then_resume(tmp_path, capsys):
    state = str(tmp_path / "s5.json")
    code, out, _ = run(capsys, "classify", "--dim", "5", "--max-forms", "1", "--state", state)
    assert code == 2
    assert not ClassificationState.load(state).complete
    code, out, _ = run(capsys, "classify", "--dim", "5", "--resume", state, "--report", str(tmp_path / "r.json"))
    assert code == 0
    assert "D5" in out
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["version"] == 1 and rep["perfect"] == 3


def test_classify_guards(tmp_path, capsys):
    code, _, err = run(capsys, "classify", "--dim", "8", "--state", str(tmp_path / "x.json"))
    assert code == 1 and "months" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, _, err = run(capsys, "classify", "--dim", "4", "--resume", str(bad))
    assert code == 1 and "version" in err
    with pytest.raises(SystemExit):
        main(["classify", "--dim", "4", "--resume", str(bad), "--overwrite"])


def test_analyze(tmp_path, capsys):
    f = write_form(tmp_path, "e6", catalog_form("E6"))
    code, out, _ = run(capsys, "analyze", f, "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["min_count"] == 72 and rep["perfect"] and rep["extreme"]
    assert rep["aut_order"] == 103680


def test_analyze_rejects_indefinite(tmp_path, capsys):
    p = tmp_path / "ind.form"
    p.write_text("2\n1 2\n2 1\n")
    code, _, err = run(capsys, "analyze", str(p))
    assert code == 1 and "witness" in err


def test_bad_form_file(tmp_path, capsys):
    p = tmp_path / "bad.form"
    p.write_text("2\n1 x\n0 1\n")
    code, _, err = run(capsys, "analyze", str(p))
    assert code == 1 and "line 2, column 3" in err
    code, _, err = run(capsys, "analyze", str(tmp_path / "missing.form"))
    assert code == 1 and "cannot read" in err


def test_facets_and_flip(tmp_path, capsys):
    f = write_form(tmp_path, "d5", catalog_form("D5"))
    code, out, _ = run(capsys, "facets", f, "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["orbits"] == 4 and rep["facets"] == 400
    code, out, _ = run(capsys, "facets", f, "--format", "json", "--plain-dd-max-rays", "0", "--no-bank")
    assert json.loads(out)["facets"] == 400
    out_form = tmp_path / "nb.form"
    code, out, _ = run(capsys, "flip", f, "--facet", "3", "-o", str(out_form), "--format", "json")
    assert code == 0
    assert read_form(out_form).minimum == 2
    code, _, err = run(capsys, "flip", f, "--facet", "9")
    assert code == 1 and "out of range" in err


def test_flip_rejects_non_perfect(tmp_path, capsys):
    f = write_form(tmp_path, "z2", read_form_text("2\n1 0\n0 1\n", tmp_path))
    code, _, err = run(capsys, "flip", f)
    assert code == 1 and "not perfect" in err


def read_form_text(text, tmp_path):
    p = tmp_path / "t.form"
    p.write_text(text)
    return read_form(p)


def test_isom_and_autgroup(tmp_path, capsys):
    a = write_form(tmp_path, "a", catalog_form("D4"))
    b = tmp_path / "b.form"
    b.write_text("4\n2 1 0 0\n1 2 1 1\n0 1 2 0\n0 1 0 2\n")
    code, out, _ = run(capsys, "isom", a, str(b), "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["equivalent"] and rep["verified"]
    c = write_form(tmp_path, "c", catalog_form("A4"))
    code, out, _ = run(capsys, "isom", a, c, "--format", "json")
    assert not json.loads(out)["equivalent"]
    code, out, _ = run(capsys, "autgroup", a, "--format", "json")
    rep = json.loads(out)
    assert rep["order"] == 1152 and rep["order_on_min_lines"] == 576


def test_dual_desc_roundtrip(tmp_path, capsys):
    p = tmp_path / "c.cone"
    p.write_text("V 3 4\n1 0 0\n0 1 0\n0 0 1\n1 1 -1\n")
    code, out, _ = run(capsys, "dual-desc", str(p))
    assert code == 0 and out.startswith("H 3 4")
    q = tmp_path / "c.h"
    q.write_text(out)
    code, back, _ = run(capsys, "dual-desc", str(q))
    assert code == 0
    assert sorted(back.splitlines()[1:]) == sorted(p.read_text().splitlines()[1:])


def test_dual_desc_degenerate(tmp_path, capsys):
    p = tmp_path / "d.cone"
    p.write_text("V 3 2\n1 0 0\n0 1 0\n")
    code, _, err = run(capsys, "dual-desc", str(p))
    assert code == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "perfectforms", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "classify" in res.stdout
