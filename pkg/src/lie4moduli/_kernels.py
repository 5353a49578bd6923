"""Dense 4x4 kernels behind every metric, automorphism and curvature call.

Each kernel exists twice: an explicit-loop version compiled with numba, and a
vectorized numpy/scipy version. The loop versions are used when numba imports
and ``LIE4MODULI_NUMBA`` is not set to ``0``; otherwise the numpy versions are
used. Both return identical layouts so callers never branch on the backend.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np
import scipy.linalg

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


# -- loop versions (numba-compatible) ---------------------------------------

def _gram_schmidt_loops(g):
    n = g.shape[0]
    X = np.zeros((n, n))
    v = np.zeros(n)
    for j in range(n):
        for a in range(n):
            v[a] = 0.0
        v[j] = 1.0
        # two passes: the second cleans up what the first left behind
        for _ in range(2):
            for k in range(j):
                d = 0.0
                for a in range(k + 1):
                    for b in range(j + 1):
                        d += X[a, k] * g[a, b] * v[b]
                for a in range(k + 1):
                    v[a] -= d * X[a, k]
        nrm2 = 0.0
        for a in range(j + 1):
            for b in range(j + 1):
                nrm2 += v[a] * g[a, b] * v[b]
        if not nrm2 > 0.0:
            return X, False
        s = np.sqrt(nrm2)
        for a in range(j + 1):
            X[a, j] = v[a] / s
    return X, True


def _rq_loops(M):
    n = M.shape[0]
    T = np.zeros((n, n))
    U = np.zeros((n, n))
    v = np.zeros(n)
    for i in range(n - 1, -1, -1):
        for a in range(n):
            v[a] = M[i, a]
        for _ in range(2):
            for k in range(i + 1, n):
                d = 0.0
                for a in range(n):
                    d += U[k, a] * v[a]
                T[i, k] += d
                for a in range(n):
                    v[a] -= d * U[k, a]
        nrm2 = 0.0
        for a in range(n):
            nrm2 += v[a] * v[a]
        if not nrm2 > 0.0:
            return T, U, False
        s = np.sqrt(nrm2)
        T[i, i] = s
        for a in range(n):
            U[i, a] = v[a] / s
    return T, U, True


def _aut_residual_loops(c, A):
    n = A.shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                lhs = 0.0
                for m in range(n):
                    lhs += A[k, m] * c[i, j, m]
                rhs = 0.0
                for p in range(n):
                    if A[p, i] == 0.0:
                        continue
                    for q in range(n):
                        rhs += A[p, i] * A[q, j] * c[p, q, k]
                r = abs(lhs - rhs)
                if r > worst:
                    worst = r
    return worst


def _jacobi_residual_loops(c):
    n = c.shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            for l in range(n):
                for k in range(n):
                    s = 0.0
                    for m in range(n):
                        s += c[i, j, m] * c[m, l, k]
                        s += c[j, l, m] * c[m, i, k]
                        s += c[l, i, m] * c[m, j, k]
                    if abs(s) > worst:
                        worst = abs(s)
    return worst


def _connection_ricci_loops(c, g, ginv):
    n = g.shape[0]
    cg = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = 0.0
                for m in range(n):
                    s += c[i, j, m] * g[m, k]
                cg[i, j, k] = s
    gam = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for l in range(n):
                s = 0.0
                for k in range(n):
                    koszul = 0.5 * (cg[i, j, k] - cg[j, k, i] + cg[k, i, j])
                    s += koszul * ginv[k, l]
                gam[i, j, l] = s
    # R(e_i, e_j) e_k = sum_l R[i, j, l, k] e_l
    R = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for l in range(n):
                for k in range(n):
                    s = 0.0
                    for m in range(n):
                        s += gam[i, m, l] * gam[j, k, m] - gam[j, m, l] * gam[i, k, m]
                        s -= c[i, j, m] * gam[m, k, l]
                    R[i, j, l, k] = s
    ric = np.zeros((n, n))
    for j in range(n):
        for k in range(n):
            s = 0.0
            for i in range(n):
                s += R[i, j, i, k]
            ric[j, k] = s
    return gam, ric


# -- numpy versions ----------------------------------------------------------

def _gram_schmidt_numpy(g):
    try:
        R = scipy.linalg.cholesky(g, lower=False)
    except np.linalg.LinAlgError:
        return np.zeros_like(g), False
    X = scipy.linalg.solve_triangular(R, np.eye(g.shape[0]), lower=False)
    return np.triu(X), True


def _rq_numpy(M):
    n = M.shape[0]
    P = np.eye(n)[::-1]
    Q, R = np.linalg.qr((P @ M).T)
    T = P @ R.T @ P
    U = P @ Q.T
    d = np.sign(np.diag(T))
    if np.any(d == 0):
        return T, U, False
    T = np.triu(T * d)
    U = d[:, None] * U
    return T, U, True


def _aut_residual_numpy(c, A):
    lhs = np.einsum("ijm,km->ijk", c, A)
    rhs = np.einsum("pi,qj,pqk->ijk", A, A, c)
    return float(np.max(np.abs(lhs - rhs)))


def _jacobi_residual_numpy(c):
    J = (np.einsum("ijm,mlk->ijlk", c, c)
         + np.einsum("jlm,mik->ijlk", c, c)
         + np.einsum("lim,mjk->ijlk", c, c))
    return float(np.max(np.abs(J)))


def _connection_ricci_numpy(c, g, ginv):
    cg = np.einsum("ijm,mk->ijk", c, g)
    koszul = 0.5 * (cg - cg.transpose(2, 0, 1) + cg.transpose(1, 2, 0))
    gam = np.einsum("ijk,kl->ijl", koszul, ginv)
    R = (np.einsum("iml,jkm->ijlk", gam, gam)
         - np.einsum("jml,ikm->ijlk", gam, gam)
         - np.einsum("ijm,mkl->ijlk", c, gam))
    ric = np.einsum("ijik->jk", R)
    return gam, ric


_LOOPS = dict(
    gram_schmidt=_gram_schmidt_loops,
    rq=_rq_loops,
    aut_residual=_aut_residual_loops,
    jacobi_residual=_jacobi_residual_loops,
    connection_ricci=_connection_ricci_loops,
)

_NUMPY = dict(
    gram_schmidt=_gram_schmidt_numpy,
    rq=_rq_numpy,
    aut_residual=_aut_residual_numpy,
    jacobi_residual=_jacobi_residual_numpy,
    connection_ricci=_connection_ricci_numpy,
)

HAVE_NUMBA = numba is not None


def backend(name: str) -> SimpleNamespace:
    """Return the kernel set for ``"numba"`` or ``"numpy"``."""
    if name == "numpy":
        return SimpleNamespace(name="numpy", **_NUMPY)
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not importable")
        return _numba_backend()
    raise ValueError(f"unknown kernel backend {name!r}")


_jitted = None


def _numba_backend() -> SimpleNamespace:
    global _jitted
    if _jitted is None:
        _jitted = SimpleNamespace(
            name="numba",
            **{k: numba.njit(cache=True)(f) for k, f in _LOOPS.items()},
        )
    return _jitted


def _default_backend() -> str:
    if os.environ.get("LIE4MODULI_NUMBA", "1") == "0" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


ACTIVE = backend(_default_backend())


def gram_schmidt(g: np.ndarray):
    return ACTIVE.gram_schmidt(np.ascontiguousarray(g, dtype=np.float64))


def rq(M: np.ndarray):
    return ACTIVE.rq(np.ascontiguousarray(M, dtype=np.float64))


def aut_residual(c: np.ndarray, A: np.ndarray) -> float:
    return float(ACTIVE.aut_residual(np.ascontiguousarray(c, dtype=np.float64),
                                     np.ascontiguousarray(A, dtype=np.float64)))


def jacobi_residual(c: np.ndarray) -> float:
    return float(ACTIVE.jacobi_residual(np.ascontiguousarray(c, dtype=np.float64)))


def connection_ricci(c: np.ndarray, g: np.ndarray, ginv: np.ndarray):
    return ACTIVE.connection_ricci(np.ascontiguousarray(c, dtype=np.float64),
                                   np.ascontiguousarray(g, dtype=np.float64),
                                   np.ascontiguousarray(ginv, dtype=np.float64))
