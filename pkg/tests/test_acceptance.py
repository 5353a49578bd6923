"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly
(``python tests/test_acceptance.py``). A pulled-back metric with condition
number above ``COND_FLAG`` is outside the numerical contract; such pairs are
counted and reported on the criterion line but are not compared at 1e-6.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from lie4moduli.automorphisms import aut_family, is_automorphism, sample_automorphism  # noqa: E402
from lie4moduli.canonical import (branch_tags, canonical_metric, generic_branch, layout,  # noqa: E402
                                  make_form, moduli_dim, sample_form)
from lie4moduli.catalog import (ALGEBRA_IDS, PUBLISHED_MODULI_DIMS, default_algebra,  # noqa: E402
                                is_unimodular, jacobi_residual, make_algebra, parameter_grid)
from lie4moduli.curvature import fingerprint  # noqa: E402
from lie4moduli.fuzz import idempotence_run, orbit_run  # noqa: E402
from lie4moduli.metric import (COND_FLAG, condition_number, gram_schmidt, psi, pullback,  # noqa: E402
                               random_inner_product, random_upper_basis)
from lie4moduli.oracle import decide_equivalence, find_witness  # noqa: E402
from test_curvature import koszul_scalar  # noqa: E402

EXPECTED_DIMS = {
    "A2+2A1": 5, "2A2": 7, "A3_2+A1": 5, "A3_3+A1": 3, "A3_5+A1": 5, "A3_7+A1": 5,
    "A4_2_generic": 4, "A4_2_alpha1": 3, "A4_3": 4, "A4_4": 4, "A4_5": 4, "A4_6": 4,
    "A4_7": 5, "A4_9": 5, "A4_11": 5, "A4_12": 6,
}


def report(n: int, ok: bool, detail: str) -> bool:
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def _in_contract_pair(alg, fam, rng):
    """Random (g, pullback(A, g)) with both metrics inside COND_FLAG; returns
    the pair and the number of rejected draws."""
    rejected = 0
    while True:
        g = random_inner_product(rng)
        h = pullback(sample_automorphism(fam, rng), g)
        if condition_number(h) <= COND_FLAG:
            return g, h, rejected
        rejected += 1


def criterion_1() -> bool:
    t0 = time.perf_counter()
    mismatched = []
    generic_ok = True
    for alg_id in ALGEBRA_IDS:
        alg = default_algebra(alg_id)
        d = moduli_dim(alg)
        generic_ok &= d == len(layout(alg).branch(generic_branch(alg)).free)
        if d != EXPECTED_DIMS[alg_id]:
            mismatched.append(f"{alg_id} {d}!={EXPECTED_DIMS[alg_id]}")
    dt = time.perf_counter() - t0
    assert PUBLISHED_MODULI_DIMS == EXPECTED_DIMS
    ok = not mismatched and generic_ok and dt < 1.0
    return report(1, ok, f"{16 - len(mismatched)}/16 match, generic-branch count "
                         f"{'agrees' if generic_ok else 'DISAGREES'}, {dt:.2f}s"
                         + (f"; mismatches: {', '.join(mismatched)}" if mismatched else ""))


def criterion_2() -> bool:
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    bad, total, points = [], 0, 0
    for alg_id in ALGEBRA_IDS:
        for p in parameter_grid(alg_id):
            alg = make_algebra(alg_id, **p)
            fam = aut_family(alg)
            points += 1
            for _ in range(200):
                total += 1
                if not is_automorphism(alg, sample_automorphism(fam, rng), 1e-9):
                    bad.append((alg_id, p))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    return report(2, ok, f"{total} samples over {points} grid points, {len(bad)} failures, {dt:.1f}s")


def criterion_3() -> bool:
    t0 = time.perf_counter()
    failures, pairs, flagged, worst = 0, 0, 0, 0.0
    per_alg = []
    for i, alg_id in enumerate(ALGEBRA_IDS):
        rep = orbit_run(default_algebra(alg_id), 100, 20, seed=300 + i, tol=1e-6,
                        fingerprints=False)
        failures += rep.failures
        pairs += rep.pairs
        flagged += rep.flagged
        worst = max(worst, rep.max_param_gap)
        if rep.flagged:
            per_alg.append(f"{alg_id}:{rep.flagged}")
    dt = time.perf_counter() - t0
    ok = failures == 0 and dt < 300
    return report(3, ok, f"{pairs - flagged}/{pairs} pairs in contract, {failures} failures, "
                         f"max rel gap {worst:.1e}, {dt:.1f}s; flagged cond>{COND_FLAG:.0e}: "
                         f"{', '.join(per_alg) or 'none'}")


def criterion_4() -> bool:
    rng = np.random.default_rng(4)
    rt = 0.0
    for _ in range(1000):
        X = random_upper_basis(rng)
        rt = max(rt, float(np.max(np.abs(gram_schmidt(psi(X)) - X))))
        g = random_inner_product(rng)
        rt = max(rt, float(np.max(np.abs(psi(gram_schmidt(g)) - g))))
    idem = 0.0
    for i, alg_id in enumerate(ALGEBRA_IDS):
        idem = max(idem, max(idempotence_run(default_algebra(alg_id), 50, seed=400 + i).values()))
    ok = rt <= 1e-10 and idem <= 1e-8
    return report(4, ok, f"round trip max {rt:.1e} (tol 1e-10), idempotence max {idem:.1e} (tol 1e-8)")


def _perturbed(alg, form, name, rng):
    for _ in range(200):
        p = dict(form.params)
        p[name] += rng.uniform(0.1, 0.6) * rng.choice([-1.0, 1.0])
        try:
            return make_form(alg, form.branch, p)
        except ValueError:
            continue
    raise RuntimeError(f"cannot perturb {name}")


def _distinct(alg, f1, f2, fam, rng) -> bool:
    g1 = pullback(sample_automorphism(fam, rng, scale=1.0), canonical_metric(f1))
    g2 = pullback(sample_automorphism(fam, rng, scale=1.0), canonical_metric(f2))
    v = decide_equivalence(alg, g1, g2, restarts=5)
    fp_differ = not fingerprint(alg, g1).close_to(fingerprint(alg, g2))
    return v.verdict == "distinct" and (fp_differ or f1.branch != f2.branch)


def criterion_5() -> bool:
    rng = np.random.default_rng(5)
    eq_fail, dist_fail, rejected, worst = [], [], 0, 0.0
    for alg_id in ALGEBRA_IDS:
        alg = default_algebra(alg_id)
        fam = aut_family(alg)
        for k in range(20):
            g, h, r = _in_contract_pair(alg, fam, rng)
            rejected += r
            w = find_witness(alg, g, h, restarts=50, seed=k)
            if w is None:
                eq_fail.append(alg_id)
            else:
                worst = max(worst, w.residual)
        tags = branch_tags(alg)
        for k in range(20):
            tag = tags[k % len(tags)]
            f1 = sample_form(alg, tag, rng)
            names = layout(alg).branch(tag).free
            f2 = _perturbed(alg, f1, names[k % len(names)], rng)
            if not _distinct(alg, f1, f2, fam, rng):
                dist_fail.append(alg_id)

    forced = []
    a2 = make_algebra("2A2")
    base = {"b11": 1.5, "b33": 1.2, "b13": 0.2, "b23": 0.3, "b14": 0.4, "b24": 0.1}
    for name in ("b11", "b33"):
        forced.append(("2A2", name, _distinct(a2, make_form(a2, 1, base),
                                               make_form(a2, 1, {**base, name: base[name] + 0.3}),
                                               aut_family(a2), rng)))
    a7 = make_algebra("A4_7")
    base = {"b11": 1.0, "b12": 0.2, "b13": 0.1, "b33": 1.0, "b44": 1.0}
    forced.append(("A4_7", "b11", _distinct(a7, make_form(a7, 1, base),
                                            make_form(a7, 1, {**base, "b11": 2.0}),
                                            aut_family(a7), rng)))
    forced_bad = [f"{a}/{n}" for a, n, ok in forced if not ok]
    ok = not eq_fail and not dist_fail and not forced_bad
    return report(5, ok, f"equivalent 320 pairs: {len(eq_fail)} misses, max residual {worst:.1e} "
                         f"({rejected} draws over cond {COND_FLAG:.0e} redrawn); distinct 320 pairs: "
                         f"{len(dist_fail)} misses; forced equalities "
                         f"{len(forced) - len(forced_bad)}/{len(forced)}")


def criterion_6() -> bool:
    s1 = koszul_scalar(make_algebra("A3_3+A1"), np.eye(4))[0]
    s2 = koszul_scalar(make_algebra("A2+2A1"), np.eye(4))[0]
    f1 = fingerprint(make_algebra("A3_3+A1"), np.eye(4)).scalar
    f2 = fingerprint(make_algebra("A2+2A1"), np.eye(4)).scalar
    spot = abs(s1 + 6) <= 1e-9 and abs(s2 + 2) <= 1e-9 and abs(f1 + 6) <= 1e-9 and abs(f2 + 2) <= 1e-9
    rng = np.random.default_rng(6)
    worst, rejected = 0.0, 0
    for alg_id in ALGEBRA_IDS:
        alg = default_algebra(alg_id)
        fam = aut_family(alg)
        for _ in range(100):
            g, h, r = _in_contract_pair(alg, fam, rng)
            rejected += r
            worst = max(worst, fingerprint(alg, g).distance(fingerprint(alg, h)))
    ok = spot and worst <= 1e-6
    return report(6, ok, f"A3_3+A1 {f1:.12f} (oracle {s1:.12f}), A2+2A1 {f2:.12f} (oracle {s2:.12f}); "
                         f"fingerprint gap max {worst:.1e} over 1600 pairs ({rejected} redrawn)")


def criterion_7() -> bool:
    worst, unimodular, n = 0.0, [], 0
    for alg_id in ALGEBRA_IDS:
        for p in parameter_grid(alg_id):
            alg = make_algebra(alg_id, **p)
            n += 1
            worst = max(worst, jacobi_residual(alg))
            if is_unimodular(alg):
                unimodular.append((alg_id, p))
    ok = worst <= 1e-12 and not unimodular
    return report(7, ok, f"{n} instances, Jacobi max {worst:.1e}, unimodular {len(unimodular)}")


def test_criterion_1_moduli_dimensions():
    assert criterion_1()


def test_criterion_2_automorphism_families():
    assert criterion_2()


def test_criterion_3_orbit_invariance():
    assert criterion_3()


def test_criterion_4_round_trips():
    assert criterion_4()


def test_criterion_5_oracle_agreement():
    assert criterion_5()


def test_criterion_6_curvature():
    assert criterion_6()


def test_criterion_7_structure():
    assert criterion_7()


if __name__ == "__main__":
    results = [c() for c in (criterion_1, criterion_2, criterion_3, criterion_4,
                             criterion_5, criterion_6, criterion_7)]
    raise SystemExit(0 if all(results) else 1)
