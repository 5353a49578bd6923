"""Inner products, orthonormal upper-triangular bases and the pullback action.

An inner product is a symmetric positive definite 4x4 array ``g``. A basis
matrix ``X`` holds an orthonormal basis in its columns, so ``X.T @ g @ X = I``.
``psi`` and ``gram_schmidt`` are mutually inverse between inner products and
upper-triangular bases with positive diagonal.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import NotPositiveDefinite, SchemaError, Singular

DET_GUARD = 1e-12
COND_FLAG = 1e8


def _square4(M, what="matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.shape != (4, 4):
        raise SchemaError(f"{what} must be 4x4, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise SchemaError(f"{what} has non-finite entries")
    return M


def check_inner_product(g, sym_tol: float = 1e-12) -> np.ndarray:
    """Validate an inner product and return it as a float array."""
    g = _square4(g, "inner product")
    if np.max(np.abs(g - g.T)) > sym_tol * max(1.0, np.max(np.abs(g))):
        raise NotPositiveDefinite("inner product is not symmetric")
    for k in range(1, 5):
        if not np.linalg.det(g[:k, :k]) > 0:
            raise NotPositiveDefinite(f"leading minor {k} is not positive")
    return g


def load_inner_product(rows, sym_tol: float = 1e-9) -> np.ndarray:
    """Parse a row-major nested list, validate symmetry and symmetrize exactly."""
    try:
        g = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"metric is not a numeric array: {exc}") from None
    g = _square4(g, "metric")
    if np.max(np.abs(g - g.T)) > sym_tol:
        raise NotPositiveDefinite("metric is not symmetric within 1e-9")
    g = 0.5 * (g + g.T)
    return check_inner_product(g)


def condition_number(g) -> float:
    w = np.linalg.eigvalsh(np.asarray(g, float))
    if not w[0] > 0:
        return float("inf")
    return float(w[-1] / w[0])


def is_ill_conditioned(g) -> bool:
    return condition_number(g) > COND_FLAG


def is_upper_basis(X, tol: float = 0.0) -> bool:
    X = np.asarray(X, float)
    return bool(np.all(np.tril(X, -1) == 0) and np.all(np.diag(X) > tol))


def psi(B) -> np.ndarray:
    """Inner product for which the columns of ``B`` are orthonormal."""
    B = np.asarray(B, float)
    Binv = np.linalg.inv(B)
    g = Binv.T @ Binv
    return 0.5 * (g + g.T)


def gram_schmidt(g) -> np.ndarray:
    """Orthonormalize e_1..e_4 in order; the inverse of ``psi``."""
    g = np.asarray(g, dtype=float)
    X, ok = _kernels.gram_schmidt(g)
    if not ok:
        raise NotPositiveDefinite("Gram-Schmidt met a non-positive norm")
    return X


def _check_det(A, what="matrix"):
    if abs(np.linalg.det(A)) < DET_GUARD:
        raise Singular(f"{what} is singular (|det| < {DET_GUARD})")


def pullback(A, g) -> np.ndarray:
    """``A^{-T} g A^{-1}``: the inner product ``(u, v) -> g(A^{-1}u, A^{-1}v)``."""
    A = np.asarray(A, float)
    _check_det(A, "automorphism")
    Ainv = np.linalg.inv(A)
    h = Ainv.T @ np.asarray(g, float) @ Ainv
    return 0.5 * (h + h.T)


def retriangularize(M):
    """Factor ``M = T @ U`` with ``T`` upper triangular, positive diagonal and
    ``U`` orthogonal."""
    M = np.asarray(M, float)
    _check_det(M)
    T, U, ok = _kernels.rq(M)
    if not ok:
        raise Singular("matrix is rank deficient")
    return T, U


def is_orthogonal(M, tol: float = 1e-9) -> bool:
    M = np.asarray(M, float)
    return bool(np.max(np.abs(M @ M.T - np.eye(M.shape[0]))) <= tol)


def random_inner_product(rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    """Random SPD matrix ``X X^T + 0.5 I`` with Gaussian ``X``."""
    X = rng.normal(scale=spread, size=(4, 4))
    g = X @ X.T + 0.5 * np.eye(4)
    return 0.5 * (g + g.T)


def random_upper_basis(rng: np.random.Generator) -> np.ndarray:
    T = np.triu(rng.uniform(-1.0, 1.0, size=(4, 4)), 1)
    T[np.diag_indices(4)] = rng.uniform(0.3, 2.0, size=4)
    return T
