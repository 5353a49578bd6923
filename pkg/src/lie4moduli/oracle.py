"""Automorphism-equivalence decisions.

``find_witness`` searches the automorphism family directly for ``A`` with
``C^{-1} A B`` orthogonal, where ``B`` and ``C`` are the Gram-Schmidt bases of
the two metrics. It never consults the canonicalizer, so the two routes check
each other. The search is one-sided: failing to find a witness proves nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import least_squares

from .automorphisms import AutFamily, aut_family, is_automorphism
from .canonical import PARAM_TOL, CanonicalForm, canonicalize
from .catalog import LieAlgebra
from .curvature import FINGERPRINT_TOL, CurvatureFingerprint, fingerprint
from .errors import Singular
from .metric import DET_GUARD, gram_schmidt

ACCEPT = 1e-6      # witness residual accepted as proof of equivalence
BORDERLINE = 1e-4  # residuals in [ACCEPT, BORDERLINE) make the verdict unknown
EARLY_STOP = 1e-11
START_RANGE = 2.0

_TRIU = np.triu_indices(4)


@dataclass(frozen=True)
class EquivalenceWitness:
    A: np.ndarray
    U: np.ndarray
    residual: float

    def to_json(self) -> dict:
        return {"A": self.A.tolist(), "U": self.U.tolist(), "residual": self.residual}


def residual(alg: LieAlgebra, A, B, C) -> float:
    """``||M M^T - I||_F`` for ``M = C^{-1} A B``."""
    A = np.asarray(A, float)
    if abs(np.linalg.det(A)) < DET_GUARD:
        raise Singular("A is singular")
    M = np.linalg.solve(np.asarray(C, float), A @ np.asarray(B, float))
    return float(np.linalg.norm(M @ M.T - np.eye(4)))


def _polar(M) -> np.ndarray:
    V, _, Wt = np.linalg.svd(M)
    return V @ Wt


@dataclass
class SearchResult:
    A: np.ndarray | None = None
    residual: float = float("inf")
    shape_index: int = -1
    starts: int = 0


def search(alg: LieAlgebra, g1, g2, restarts: int = 50, seed: int = 0,
           family: AutFamily | None = None) -> SearchResult:
    """Multi-start damped least squares over every discrete component.

    Start ``k`` of shape ``s`` is drawn from ``default_rng((seed, s, k))`` so
    the outcome depends only on ``(restarts, seed)``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    family = family or aut_family(alg)
    B = gram_schmidt(g1)
    C = gram_schmidt(g2)
    Cinv = scipy.linalg.solve_triangular(C, np.eye(4), lower=False)
    best = SearchResult()

    for shape in range(family.discrete_components):
        def fun(x, shape=shape):
            M = Cinv @ family.matrix(shape, x) @ B
            return (M @ M.T - np.eye(4))[_TRIU]

        n = len(family.shape_params(shape))
        for k in range(restarts):
            if k == 0 and shape == 0:
                base = family.identity_params().assignment
                x0 = np.array([base[p] for p in family.shape_params(0)])
            else:
                x0 = np.random.default_rng((seed, shape, k)).uniform(-START_RANGE, START_RANGE, n)
            best.starts += 1
            try:
                sol = least_squares(fun, x0, method="lm", xtol=1e-15, ftol=1e-15,
                                    gtol=1e-15, max_nfev=200 * (n + 1))
            except (ValueError, np.linalg.LinAlgError):
                continue
            if not np.all(np.isfinite(sol.x)):
                continue
            A = family.matrix(shape, sol.x)
            if abs(np.linalg.det(A)) < DET_GUARD:
                continue
            r = residual(alg, A, B, C)
            if r < best.residual:
                best.A, best.residual, best.shape_index = A, r, shape
            if best.residual <= EARLY_STOP:
                return best
    return best


def find_witness(alg: LieAlgebra, g1, g2, restarts: int = 50, seed: int = 0,
                 family: AutFamily | None = None) -> EquivalenceWitness | None:
    """Automorphism ``A`` with ``pullback(A, g1) = g2``, or None."""
    found = search(alg, g1, g2, restarts, seed, family)
    return _as_witness(alg, g1, g2, found)


def _as_witness(alg, g1, g2, found: SearchResult) -> EquivalenceWitness | None:
    if found.A is None or found.residual > ACCEPT:
        return None
    if not is_automorphism(alg, found.A, 1e-8):
        return None
    B, C = gram_schmidt(g1), gram_schmidt(g2)
    U = _polar(np.linalg.solve(C, found.A @ B))
    return EquivalenceWitness(found.A, U, found.residual)


@dataclass
class Verdict:
    verdict: str
    reason: str
    witness: EquivalenceWitness | None = None
    residual: float | None = None
    forms: tuple = field(default=(), repr=False)
    fingerprints: tuple = field(default=(), repr=False)

    @property
    def exit_code(self) -> int:
        return {"equivalent": 0, "distinct": 1, "unknown": 5}[self.verdict]

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "reason": self.reason, "residual": self.residual}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.forms:
            out["forms"] = [f.to_json() for f in self.forms]
        if self.fingerprints:
            out["fingerprints"] = [f.to_json() for f in self.fingerprints]
        return out


def decide_equivalence(alg: LieAlgebra, g1, g2, tol: float = PARAM_TOL,
                       restarts: int = 50, seed: int = 0) -> Verdict:
    """Combine canonical forms, curvature fingerprints and witness search.

    equivalent: forms match and a witness is found.
    distinct: branches differ, or forms and fingerprints both differ.
    unknown: anything else, including inputs inside the branch-boundary band.
    """
    f1: CanonicalForm = canonicalize(alg, g1)
    f2: CanonicalForm = canonicalize(alg, g2)
    p1: CurvatureFingerprint = fingerprint(alg, g1)
    p2: CurvatureFingerprint = fingerprint(alg, g2)
    ctx = dict(forms=(f1, f2), fingerprints=(p1, p2))

    if f1.near_boundary or f2.near_boundary:
        return Verdict("unknown", "input lies inside the branch-boundary band", **ctx)
    if f1.matches(f2, tol):
        found = search(alg, g1, g2, restarts, seed)
        w = _as_witness(alg, g1, g2, found)
        if w is not None:
            return Verdict("equivalent", "canonical forms match and a witness was found",
                           witness=w, residual=w.residual, **ctx)
        return Verdict("unknown", "canonical forms match but no witness was found",
                       residual=found.residual, **ctx)
    if f1.branch != f2.branch:
        return Verdict("distinct", f"branches differ ({f1.branch} vs {f2.branch})", **ctx)
    if not p1.close_to(p2, FINGERPRINT_TOL):
        return Verdict("distinct", "canonical forms and curvature fingerprints differ", **ctx)
    return Verdict("unknown", "canonical forms differ but fingerprints agree", **ctx)
