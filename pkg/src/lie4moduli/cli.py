"""Command-line front end.

Usage
-----
    lie4moduli list [ALGEBRA] [--json]
    lie4moduli canonicalize DOC.json|-
    lie4moduli equiv A.json B.json [--tol T] [--restarts N] [--seed S]
    lie4moduli fuzz ALGEBRA|all [--trials N] [--seed S] [--json]

A metric document is ``{"algebra": id, "alpha": x, "beta": y, "metric": 4x4}``.

Exit codes
----------
    0  success / equivalent
    1  distinct (equiv) or a property failure (fuzz)
    2  usage, schema or algebra-mismatch error
    3  metric not positive definite
    4  algebra parameters out of range, missing or unexpected
    5  equivalence unknown
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .canonical import PARAM_TOL, canonicalize, moduli_dim
from .catalog import (ALGEBRA_IDS, PUBLISHED_MODULI_DIMS, constraint_text, default_algebra,
                      make_algebra, required_params)
from .errors import (NotPositiveDefinite, ParamMissing, ParamOutOfRange, ParamUnexpected,
                     SchemaError, UnsupportedAlgebra)
from .fuzz import idempotence_run, orbit_run
from .metric import load_inner_product
from .oracle import decide_equivalence


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _read_doc(path: str) -> dict:
    try:
        raw = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        doc = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    if not isinstance(doc, dict) or "algebra" not in doc or "metric" not in doc:
        raise SchemaError(f"{path}: expected an object with 'algebra' and 'metric'")
    extra = set(doc) - {"algebra", "alpha", "beta", "metric"}
    if extra:
        raise SchemaError(f"{path}: unexpected keys {sorted(extra)}")
    if doc["algebra"] not in ALGEBRA_IDS:
        raise SchemaError(f"{path}: unknown algebra {doc['algebra']!r}")
    for key in ("alpha", "beta"):
        if key in doc and not isinstance(doc[key], (int, float)):
            raise SchemaError(f"{path}: {key} must be a number")
    return doc


def _load(path: str):
    doc = _read_doc(path)
    alg = make_algebra(doc["algebra"], doc.get("alpha"), doc.get("beta"))
    return alg, load_inner_product(doc["metric"])


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def cmd_list(args) -> int:
    ids = [args.algebra] if args.algebra else list(ALGEBRA_IDS)
    for alg_id in ids:
        if alg_id not in ALGEBRA_IDS:
            raise SchemaError(f"unknown algebra {alg_id!r}")
    rows = [{
        "algebra": a,
        "params": list(required_params(a)),
        "constraint": constraint_text(a),
        "moduli_dim": moduli_dim(a),
        "published_dim": PUBLISHED_MODULI_DIMS[a],
    } for a in ids]
    if args.json:
        _emit(rows)
        return 0
    print(f"{'algebra':<14}{'dim':>4}{'published':>11}  constraint")
    for r in rows:
        print(f"{r['algebra']:<14}{r['moduli_dim']:>4}{r['published_dim']:>11}  {r['constraint']}")
    return 0


def cmd_canonicalize(args) -> int:
    alg, g = _load(args.doc)
    form = canonicalize(alg, g)
    _emit(form.to_json())
    return 0


def cmd_equiv(args) -> int:
    alg1, g1 = _load(args.a)
    alg2, g2 = _load(args.b)
    if alg1 != alg2:
        raise SchemaError(f"algebra mismatch: {alg1.to_json()} vs {alg2.to_json()}")
    v = decide_equivalence(alg1, g1, g2, tol=args.tol, restarts=args.restarts, seed=args.seed)
    _emit(v.to_json())
    return v.exit_code


def cmd_fuzz(args) -> int:
    ids = list(ALGEBRA_IDS) if args.algebra == "all" else [args.algebra]
    reports = []
    for alg_id in ids:
        if alg_id not in ALGEBRA_IDS:
            raise SchemaError(f"unknown algebra {alg_id!r}")
        alg = default_algebra(alg_id)
        rep = orbit_run(alg, args.trials, 1, seed=args.seed, tol=args.tol)
        idem = idempotence_run(alg, max(1, args.trials // 10), seed=args.seed)
        out = rep.to_json()
        out["max_idempotence"] = max(idem.values())
        out["passed"] = rep.passed and out["max_idempotence"] <= 1e-8 and rep.max_roundtrip <= 1e-10
        reports.append(out)
    ok = all(r["passed"] for r in reports)
    if args.json:
        _emit({"passed": ok, "reports": reports})
    else:
        print(f"{'algebra':<14}{'pairs':>6}{'flagged':>8}{'param gap':>11}"
              f"{'fp gap':>10}{'recon':>10}{'idem':>10}  result")
        for r in reports:
            print(f"{r['algebra']:<14}{r['pairs']:>6}{r['flagged']:>8}{r['max_param_gap']:>11.1e}"
                  f"{r['max_fingerprint_gap']:>10.1e}{r['max_reconstruction']:>10.1e}"
                  f"{r['max_idempotence']:>10.1e}  {'PASS' if r['passed'] else 'FAIL'}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lie4moduli", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("list", help="list the catalog")
    s.add_argument("algebra", nargs="?")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("canonicalize", help="canonical form of a metric document")
    s.add_argument("doc")
    s.set_defaults(func=cmd_canonicalize)

    s = sub.add_parser("equiv", help="decide automorphism-equivalence of two metrics")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--tol", type=float, default=PARAM_TOL)
    s.add_argument("--restarts", type=_positive_int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("fuzz", help="randomized property run")
    s.add_argument("algebra")
    s.add_argument("--trials", type=_positive_int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=PARAM_TOL)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, UnsupportedAlgebra) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotPositiveDefinite as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParamOutOfRange, ParamMissing, ParamUnexpected) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
