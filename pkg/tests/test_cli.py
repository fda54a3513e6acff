import io
import json

import pytest

from foamcalc.cli import main
from foamcalc.foam import Birth, Handle, Death, Movie


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_homology_text(capsys):
    rc, out, _ = run(capsys, "homology", "--name", "unknot")
    assert rc == 0 and out == "q^-2 + 1 + q^2\n"


def test_homology_braid_with_euler(capsys):
    rc, out, _ = run(capsys, "homology", "--braid", "2;1,1,1", "--check-euler")
    lines = out.splitlines()
    assert rc == 0 and lines[1].startswith("euler check: ok")


def test_empty_inputs(capsys):
    assert run(capsys, "homology", "--braid", "2;")[1] == "q^-4 + 2*q^-2 + 3 + 2*q^2 + q^4\n"
    assert run(capsys, "homology", "--pd", "")[1] == "1\n"


def test_json_report_is_stable(capsys):
    rc, a, _ = run(capsys, "homology", "--name", "hopf", "--json", "--check-euler")
    _, b, _ = run(capsys, "homology", "--name", "hopf", "--json", "--check-euler")
    assert rc == 0 and a == b
    rep = json.loads(a)
    assert set(rep) == {"input", "poincare", "quantum", "checks"}
    assert rep["input"] == {"name": "hopf"}
    assert rep["checks"] == {"d2": True, "euler": True}
    assert all(set(t) == {"t", "q", "dim"} for t in rep["poincare"])


def test_methods_agree(capsys):
    a = run(capsys, "homology", "--name", "trefoil", "--method", "direct")[1]
    b = run(capsys, "homology", "--name", "trefoil")[1]
    assert a == b


def test_parse_errors_exit_1(capsys):
    rc, _, err = run(capsys, "homology", "--pd", "Xp[1,2,2,1]\n  junk")
    assert rc == 1 and "line 2" in err and "column 3" in err
    rc, _, err = run(capsys, "quantum", "--braid", "2;1,x")
    assert rc == 1 and "column 5" in err


def test_missing_file_exits_1(capsys, tmp_path):
    rc, _, err = run(capsys, "homology", "--pd-file", str(tmp_path / "nope.pd"))
    assert rc == 1 and "cannot read" in err


def test_pd_file(capsys, tmp_path):
    p = tmp_path / "kink.pd"
    p.write_text("Xp[1,2,2,1]\n")
    assert run(capsys, "homology", "--pd-file", str(p))[1] == "q^-2 + 1 + q^2\n"


def test_quantum(capsys):
    rc, out, _ = run(capsys, "quantum", "--name", "unknot")
    assert rc == 0 and out == "q^-2 + 1 + q^2\n"


def test_eval_foam(capsys, tmp_path):
    p = tmp_path / "torus.json"
    p.write_text(json.dumps(Movie.closed([Birth("a"), Handle("a"), Death("a")]).to_json()))
    assert run(capsys, "eval-foam", str(p)) == (0, "3\n", "")
    rc, out, _ = run(capsys, "eval-foam", str(p), "--json")
    assert json.loads(out)["value"] == "3"


def test_eval_foam_errors(capsys, tmp_path, monkeypatch):
    bad = {"events": [{"op": "birth", "id": "a"}, {"op": "death", "id": "b"}]}
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(bad)))
    rc, _, err = run(capsys, "eval-foam", "-")
    assert rc == 1 and "event 1" in err
    monkeypatch.setattr("sys.stdin", io.StringIO("{"))
    assert run(capsys, "eval-foam", "-")[0] == 1
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"events": [{"op": "birth", "id": "a"}]})))
    rc, _, err = run(capsys, "eval-foam", "-")
    assert rc == 1 and "closed" in err


def test_fixtures_listing(capsys):
    rc, out, _ = run(capsys, "fixtures")
    names = [line.split("\t")[0] for line in out.splitlines()]
    assert rc == 0 and names == ["unknot", "unlink2", "hopf", "trefoil", "figure8", "t2_5", "t2_7"]


def test_argparse_rejects_two_inputs():
    with pytest.raises(SystemExit):
        main(["homology", "--name", "hopf", "--braid", "2;1"])
