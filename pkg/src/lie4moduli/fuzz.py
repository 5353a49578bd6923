"""Randomized property runs shared by the CLI and the acceptance suite.

A pair (g, pullback(A, g)) is "in contract" when both metrics have condition
number at most ``metric.COND_FLAG``. Beyond that the input has already lost
the digits the 1e-6 comparison needs, so such pairs are counted and reported
separately instead of being compared at that tolerance.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .automorphisms import aut_family, sample_automorphism
from .canonical import branch_tags, canonical_basis, canonicalize, sample_form
from .catalog import LieAlgebra
from .curvature import fingerprint
from .errors import NotPositiveDefinite
from .metric import COND_FLAG, condition_number, gram_schmidt, psi, pullback, random_inner_product


@dataclass
class OrbitReport:
    algebra: str
    pairs: int = 0
    flagged: int = 0
    failures: int = 0
    max_param_gap: float = 0.0
    max_flagged_gap: float = 0.0
    max_reconstruction: float = 0.0
    max_fingerprint_gap: float = 0.0
    max_roundtrip: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def _gap(f1, f2) -> float:
    if f1.branch != f2.branch:
        return float("inf")
    return max((abs(f1.params[k] - f2.params[k]) / max(1.0, abs(f1.params[k]), abs(f2.params[k]))
                for k in f1.params), default=0.0)


def orbit_run(alg: LieAlgebra, n_metrics: int, n_auts: int, seed: int = 0,
              tol: float = 1e-6, fingerprints: bool = True) -> OrbitReport:
    """Canonical-form invariance, reconstruction, fingerprint invariance and
    Gram-Schmidt round trips over ``n_metrics`` metrics x ``n_auts`` samples."""
    rng = np.random.default_rng(seed)
    family = aut_family(alg)
    rep = OrbitReport(alg.id)
    for _ in range(n_metrics):
        g = random_inner_product(rng)
        X = gram_schmidt(g)
        rep.max_roundtrip = max(rep.max_roundtrip, float(np.max(np.abs(psi(X) - g))))
        base = canonicalize(alg, g)
        fp = fingerprint(alg, g) if fingerprints else None
        rep.max_reconstruction = max(rep.max_reconstruction, base.reconstruction_residual)
        for _ in range(n_auts):
            A = sample_automorphism(family, rng)
            h = pullback(A, g)
            rep.pairs += 1
            flagged = condition_number(h) > COND_FLAG or condition_number(g) > COND_FLAG
            try:
                other = canonicalize(alg, h)
                gap = _gap(base, other)
            except (NotPositiveDefinite, RuntimeError):
                if not flagged:
                    raise
                gap = float("inf")
            if flagged:
                rep.flagged += 1
                rep.max_flagged_gap = max(rep.max_flagged_gap, gap)
                continue
            rep.max_param_gap = max(rep.max_param_gap, gap)
            rep.max_reconstruction = max(rep.max_reconstruction, other.reconstruction_residual)
            if gap > tol:
                rep.failures += 1
            if fp is not None:
                d = fp.distance(fingerprint(alg, h))
                rep.max_fingerprint_gap = max(rep.max_fingerprint_gap, d)
                if d > tol:
                    rep.failures += 1
    return rep


def idempotence_run(alg: LieAlgebra, n_per_branch: int, seed: int = 0) -> dict:
    """Max parameter error of canonicalize(psi(canonical_basis(f))) against f,
    per branch, over random valid forms f."""
    rng = np.random.default_rng(seed)
    out = {}
    for tag in branch_tags(alg):
        worst = 0.0
        for _ in range(n_per_branch):
            f = sample_form(alg, tag, rng)
            back = canonicalize(alg, psi(canonical_basis(f)))
            worst = max(worst, _gap(f, back))
        out[tag] = worst
    return out
