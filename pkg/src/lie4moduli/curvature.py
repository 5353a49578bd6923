"""Curvature of left-invariant metrics, evaluated at the identity.

Everything is left-invariant, so the Levi-Civita connection follows from the
Koszul formula on basis fields and the curvature tensor has no derivative
terms. ``scalar_curvature_frame`` is an independent route through an
orthonormal frame and the Killing form, kept as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .catalog import _tensor
from .metric import check_inner_product, gram_schmidt

FINGERPRINT_TOL = 1e-6


@dataclass(frozen=True)
class CurvatureFingerprint:
    scalar: float
    ricci_eigs: tuple

    def close_to(self, other: "CurvatureFingerprint", tol: float = FINGERPRINT_TOL) -> bool:
        return self.distance(other) <= tol

    def distance(self, other: "CurvatureFingerprint") -> float:
        """Largest entrywise gap, relative above magnitude 1."""
        a = np.array((self.scalar,) + self.ricci_eigs)
        b = np.array((other.scalar,) + other.ricci_eigs)
        return float(np.max(np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))))

    def to_json(self) -> dict:
        return {"scalar": self.scalar, "ricci_eigs": list(self.ricci_eigs)}


def _connection_ricci(alg, g):
    c = _tensor(alg)
    g = check_inner_product(np.asarray(g, float), sym_tol=1e-9)
    return _kernels.connection_ricci(c, g, np.linalg.inv(g))


def levi_civita(alg, g) -> np.ndarray:
    """``gamma[i, j, k]``: the e_k component of nabla_{e_i} e_j."""
    return _connection_ricci(alg, g)[0]


def ricci_tensor(alg, g) -> np.ndarray:
    ric = _connection_ricci(alg, g)[1]
    return 0.5 * (ric + ric.T)


def ricci_operator(alg, g) -> np.ndarray:
    return np.linalg.solve(np.asarray(g, float), ricci_tensor(alg, g))


def frame_structure_constants(alg, g) -> np.ndarray:
    """Structure constants in the Gram-Schmidt orthonormal frame of ``g``:
    ``[X_a, X_b] = sum_c cf[a, b, c] X_c``."""
    X = gram_schmidt(np.asarray(g, float))
    Xinv = scipy.linalg.solve_triangular(X, np.eye(4), lower=False)
    return np.einsum("ia,jb,ijk,ck->abc", X, X, _tensor(alg), Xinv)


def fingerprint(alg, g) -> CurvatureFingerprint:
    """Scalar curvature and sorted Ricci-operator eigenvalues.

    Computed in an orthonormal frame, where the Ricci operator is the
    symmetric Ricci matrix; this avoids forming g^{-1} for badly scaled g.
    """
    check_inner_product(np.asarray(g, float), sym_tol=1e-9)
    cf = frame_structure_constants(alg, g)
    eye = np.eye(4)
    ric = _kernels.connection_ricci(cf, eye, eye)[1]
    eigs = np.linalg.eigvalsh(0.5 * (ric + ric.T))
    eigs = tuple(float(e) for e in np.sort(eigs))
    return CurvatureFingerprint(float(sum(eigs)), eigs)


def scalar_curvature_frame(alg, g) -> float:
    """Scalar curvature from an orthonormal frame.

    s = -1/4 sum |c_ij^k|^2 - 1/2 sum_i B(X_i, X_i) - |H|^2, where B is the
    Killing form and H = sum_i tr(ad X_i) X_i.
    """
    cf = frame_structure_constants(alg, g)
    ads = np.einsum("abc->acb", cf)           # ads[a] is ad(X_a) in the frame
    killing = np.einsum("aij,bji->ab", ads, ads)
    traces = np.einsum("aii->a", ads)
    return float(-0.25 * np.sum(cf ** 2) - 0.5 * np.trace(killing) - np.sum(traces ** 2))
