import json
import subprocess
import sys

import numpy as np
import pytest

from lie4moduli.automorphisms import aut_family, sample_automorphism
from lie4moduli.canonical import canonical_metric, make_form
from lie4moduli.catalog import ALGEBRA_IDS, make_algebra
from lie4moduli.cli import main
from lie4moduli.metric import pullback, random_inner_product


def _doc(path, alg_id, g, **params):
    path.write_text(json.dumps({"algebra": alg_id, **params, "metric": np.asarray(g).tolist()}))
    return str(path)


def test_list_table(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 17
    row = next(l for l in lines if l.startswith("A4_12"))
    assert row.split()[1] == "6"


def test_list_json(capsys):
    assert main(["list", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["algebra"] for r in rows] == list(ALGEBRA_IDS)
    assert {"moduli_dim", "published_dim", "constraint", "params"} <= set(rows[0])


def test_list_one(capsys):
    assert main(["list", "A4_5"]) == 0
    assert "αβ≠0, −1≤α≤β≤1, α+β≠−1" in capsys.readouterr().out
    assert main(["list", "nope"]) == 2


def test_canonicalize_identity(tmp_path, capsys):
    assert main(["canonicalize", _doc(tmp_path / "g.json", "A4_4", np.eye(4))]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["branch"] == 1
    assert set(out["params"]) == {"b12", "b22", "b33", "b44"}


def test_canonicalize_orbit_pair(tmp_path, capsys):
    alg = make_algebra("A4_9", beta=0.5)
    rng = np.random.default_rng(3)
    g = random_inner_product(rng)
    h = pullback(sample_automorphism(aut_family(alg), rng, scale=1.0), g)
    main(["canonicalize", _doc(tmp_path / "a.json", "A4_9", g, beta=0.5)])
    a = json.loads(capsys.readouterr().out)
    main(["canonicalize", _doc(tmp_path / "b.json", "A4_9", h, beta=0.5)])
    b = json.loads(capsys.readouterr().out)
    assert a["branch"] == b["branch"]
    assert a["params"] == pytest.approx(b["params"], abs=1e-6)


def test_canonicalize_stdin(monkeypatch, capsys):
    import io
    doc = json.dumps({"algebra": "A4_4", "metric": np.eye(4).tolist()})
    monkeypatch.setattr(sys, "stdin", io.StringIO(doc))
    assert main(["canonicalize", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["algebra"] == "A4_4"


@pytest.mark.parametrize("doc, code", [
    ({"algebra": "A4_4", "metric": np.eye(3).tolist()}, 2),
    ({"algebra": "A4_4"}, 2),
    ({"algebra": "A4_4", "metric": np.eye(4).tolist(), "gamma": 1}, 2),
    ({"algebra": "A9", "metric": np.eye(4).tolist()}, 2),
    ({"algebra": "A4_4", "metric": np.diag([1, 1, -1, 1]).tolist()}, 3),
    ({"algebra": "A4_9", "metric": np.eye(4).tolist()}, 4),
    ({"algebra": "A4_9", "beta": 5.0, "metric": np.eye(4).tolist()}, 4),
    ({"algebra": "A4_4", "alpha": 1.0, "metric": np.eye(4).tolist()}, 4),
])
def test_canonicalize_errors(tmp_path, doc, code):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    assert main(["canonicalize", str(p)]) == code


def test_unreadable(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    assert main(["canonicalize", str(p)]) == 2
    assert main(["canonicalize", str(tmp_path / "missing.json")]) == 2


def test_equiv_codes(tmp_path, capsys):
    alg = make_algebra("A4_7")
    rng = np.random.default_rng(1)
    g = random_inner_product(rng)
    h = pullback(sample_automorphism(aut_family(alg), rng, scale=1.0), g)
    a, b = _doc(tmp_path / "a.json", "A4_7", g), _doc(tmp_path / "b.json", "A4_7", h)
    assert main(["equiv", a, b]) == 0
    assert "witness" in json.loads(capsys.readouterr().out)

    base = {"b12": 0.2, "b13": 0.1, "b33": 1.0, "b44": 1.0}
    g1 = canonical_metric(make_form(alg, 1, {**base, "b11": 1.0}))
    g2 = canonical_metric(make_form(alg, 1, {**base, "b11": 2.0}))
    c, d = _doc(tmp_path / "c.json", "A4_7", g1), _doc(tmp_path / "d.json", "A4_7", g2)
    assert main(["equiv", c, d, "--restarts", "5"]) == 1
    assert json.loads(capsys.readouterr().out)["verdict"] == "distinct"

    e = _doc(tmp_path / "e.json", "A4_4", g)
    assert main(["equiv", a, e]) == 2


def test_equiv_unknown(tmp_path, capsys):
    alg = make_algebra("A3_7+A1", alpha=1.0)
    g1 = canonical_metric(make_form(alg, 1, {"b22": 1 - 5e-8, "b33": 1.0, "b14": 0.3, "b24": 0.2}))
    a = _doc(tmp_path / "a.json", "A3_7+A1", g1, alpha=1.0)
    b = _doc(tmp_path / "b.json", "A3_7+A1", np.eye(4), alpha=1.0)
    assert main(["equiv", a, b, "--restarts", "2"]) == 5


def test_fuzz(capsys):
    assert main(["fuzz", "A3_7+A1", "--trials", "100", "--seed", "7"]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["fuzz", "A4_4", "--trials", "5", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_fuzz_all(capsys):
    assert main(["fuzz", "all", "--trials", "3"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 17


def test_fuzz_usage():
    with pytest.raises(SystemExit) as exc:
        main(["fuzz", "A4_4", "--trials", "0"])
    assert exc.value.code == 2
    assert main(["fuzz", "nope", "--trials", "1"]) == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "lie4moduli", "list", "A4_12", "--json"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert json.loads(r.stdout)[0]["moduli_dim"] == 6
