"""Canonical forms of inner products under the automorphism group.

A metric is represented by an orthonormal frame ``F`` whose column ``j`` is
``X_j = sum_i b_ij e_i``. Each algebra fixes a frame order in which ``F`` is
kept upper triangular; the reduction then left-multiplies ``F`` by elements of
the algebra's automorphism family and re-triangularizes, zeroing entries in
closed form, until only the canonical parameters ``b_ij`` remain. Every element
applied is accumulated into a witness ``W`` with ``pullback(W, g) = psi(F)``.

All canonical frames happen to be upper triangular in the natural order, so
``canonical_basis`` and ``canonical_frame`` coincide.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .automorphisms import AutFamily, aut_family, family_is_complete
from .catalog import ALGEBRA_IDS, LieAlgebra, make_algebra
from .errors import NotPositiveDefinite, UnsupportedAlgebra
from .metric import check_inner_product, gram_schmidt, is_ill_conditioned, psi, pullback

BRANCH_BAND = 1e-7      # |x - 1| at or below this picks the x = 1 branch
BOUNDARY_NOISE = 1e-10  # below this, x = 1 is taken as exact rather than near
ZERO_TOL = 1e-9         # sign-normalized values this close to 0 are stored as +0
PARAM_TOL = 1e-6
SHAPE_TOL = 1e-6        # internal check that the reduced frame has the right shape

SWAP_ORDER = "dist(e1,e2)<=dist(e3,e4)"


# -- layouts -----------------------------------------------------------------

@dataclass(frozen=True)
class Branch:
    tag: int
    free: tuple
    ones: tuple
    constraints: tuple


@dataclass(frozen=True)
class Layout:
    order: tuple
    branches: tuple

    def branch(self, tag: int) -> Branch:
        for b in self.branches:
            if b.tag == tag:
                return b
        raise KeyError(tag)


def _ones(*names):
    return tuple((int(n[1]), int(n[2])) for n in names)


_POS_DIAG = ("b11>0", "b22>0", "b33>0", "b44>0")


def _rot3(extra_free=(), extra_cons=()):
    """Three-branch layout of A4_6/A4_11: rotation block on (e2, e3)."""
    free = extra_free + ("b12", "b13", "b33", "b44")
    cons = extra_cons + ("b33>0", "b33<1", "b44>0")
    return (
        Branch(1, free, _ones("b11", "b22") if not extra_free else _ones("b22"),
               cons + ("b12>=0", "b13>=0")),
        Branch(2, free, _ones("b11", "b22") if not extra_free else _ones("b22"),
               cons + ("b12>0", "b13<0")),
        Branch(3, extra_free + ("b12", "b44"),
               _ones("b11", "b22", "b33") if not extra_free else _ones("b22", "b33"),
               extra_cons + ("b44>0", "b12>=0")),
    )


LAYOUTS = {
    "A2+2A1": Layout((2, 3, 4, 1), (
        Branch(1, ("b11", "b23"), _ones("b22", "b33", "b44"), ("b11>0", "b23>=0")),)),
    "2A2": Layout((2, 1, 4, 3), (
        Branch(1, ("b11", "b33", "b13", "b23", "b14", "b24"), _ones("b22", "b44"),
               ("b11>0", "b33>0", "b23>=0", "b14>=0", "b23=0 -> b24>=0",
                "b14=0 -> b24>=0", SWAP_ORDER)),)),
    "A3_2+A1": Layout((1, 2, 4, 3), (
        Branch(1, ("b11", "b33", "b14", "b24"), _ones("b22", "b44"),
               ("b11>0", "b33>0", "b24>=0", "b24=0 -> b14>=0")),)),
    "A3_3+A1": Layout((1, 2, 4, 3), (
        Branch(1, ("b33", "b14"), _ones("b11", "b22", "b44"), ("b33>0", "b14>=0")),)),
    "A3_5+A1": Layout((1, 2, 4, 3), (
        Branch(1, ("b12", "b33", "b14", "b24"), _ones("b11", "b22", "b44"),
               ("b33>0", "b14>=0", "b24>=0", "b14=0 -> b12>=0", "b24=0 -> b12>=0")),)),
    "A3_7+A1": Layout((1, 2, 4, 3), (
        Branch(1, ("b22", "b33", "b14", "b24"), _ones("b11", "b44"),
               ("b22>0", "b22<1", "b33>0", "b14>=0", "b24>=0")),
        Branch(2, ("b22", "b33", "b14", "b24"), _ones("b11", "b44"),
               ("b22>0", "b22<1", "b33>0", "b14>0", "b24<0")),
        Branch(3, ("b33", "b14"), _ones("b11", "b22", "b44"), ("b33>0", "b14>=0")),
    )),
    "A4_2_generic": Layout((1, 2, 3, 4), (
        Branch(1, ("b12", "b22", "b13", "b44"), _ones("b11", "b33"),
               ("b22>0", "b44>0", "b12>=0", "b12=0 -> b13>=0")),)),
    "A4_2_alpha1": Layout((2, 1, 3, 4), (
        Branch(1, ("b22", "b44"), _ones("b11", "b33"), ("b22>0", "b44>0")),)),
    "A4_4": Layout((1, 2, 3, 4), (
        Branch(1, ("b12", "b22", "b33", "b44"), _ones("b11"), ("b22>0", "b33>0", "b44>0")),)),
    "A4_5": Layout((1, 2, 3, 4), (
        Branch(1, ("b12", "b13", "b23", "b44"), _ones("b11", "b22", "b33"),
               ("b44>0", "b12>=0", "b13>=0", "b12=0 -> b23>=0", "b13=0 -> b23>=0")),)),
    "A4_6": Layout((1, 2, 3, 4), _rot3()),
    "A4_7": Layout((1, 2, 3, 4), (
        Branch(1, ("b11", "b12", "b13", "b33", "b44"), _ones("b22"),
               ("b11>0", "b33>0", "b44>0", "b12>=0", "b12=0 -> b13>=0")),)),
    "A4_9": Layout((1, 2, 3, 4), (
        Branch(1, ("b11", "b12", "b13", "b23", "b44"), _ones("b22", "b33"),
               ("b11>0", "b44>0", "b12>=0", "b13>=0", "b12=0 -> b23>=0",
                "b13=0 -> b23>=0")),)),
    "A4_11": Layout((1, 2, 3, 4), _rot3(("b11",), ("b11>0",))),
    "A4_12": Layout((1, 2, 3, 4), (
        Branch(1, ("b22", "b33", "b14", "b24", "b34", "b44"), _ones("b11"),
               ("b22>0", "b22<1", "b33>0", "b44>0", "b14>=0", "b24>=0",
                "b14=0 -> b34>=0", "b24=0 -> b34>=0")),
        Branch(3, ("b33", "b14", "b34", "b44"), _ones("b11", "b22"),
               ("b33>0", "b44>0", "b14>=0", "b34>=0")),
    )),
}
LAYOUTS["A4_3"] = LAYOUTS["A4_2_generic"]


def layout(alg) -> Layout:
    alg_id = alg.id if isinstance(alg, LieAlgebra) else alg
    try:
        return LAYOUTS[alg_id]
    except KeyError:
        raise UnsupportedAlgebra(alg_id) from None


def moduli_dim(alg) -> int:
    """Number of continuous parameters of the generic canonical form, which is
    10 minus the generic orbit dimension of the automorphism group."""
    return max(len(b.free) for b in layout(alg).branches)


# -- constraint records ------------------------------------------------------

_ATOM = re.compile(r"^(b\d\d)(>=|<=|>|<|=)(-?\d+(?:\.\d+)?)$")


def _dist_to_span(g, i, j):
    """Length of e_i's component orthogonal to e_j under g (0-based)."""
    return float(np.sqrt(g[i, i] - g[i, j] ** 2 / g[j, j]))


def swap_distances(g):
    return _dist_to_span(g, 0, 1), _dist_to_span(g, 2, 3)


def _atom_holds(text, params, tol):
    m = _ATOM.match(text)
    name, op, rhs = m.group(1), m.group(2), float(m.group(3))
    v = params[name]
    if op == ">":
        return v > rhs
    if op == "<":
        return v < rhs
    if op == ">=":
        return v >= rhs - tol
    if op == "<=":
        return v <= rhs + tol
    return abs(v - rhs) <= tol


def constraint_holds(text: str, params: dict, frame=None, tol: float = ZERO_TOL) -> bool:
    if text == SWAP_ORDER:
        d12, d34 = swap_distances(psi(frame))
        return d12 <= d34 * (1 + tol)
    if "->" in text:
        cond, then = (s.strip() for s in text.split("->"))
        return (not _atom_holds(cond, params, tol)) or _atom_holds(then, params, tol)
    return _atom_holds(text, params, tol)


# -- canonical form ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CanonicalForm:
    algebra: LieAlgebra
    branch: int
    params: dict
    constraints: tuple
    witness: np.ndarray | None = field(default=None, repr=False)
    reconstruction_residual: float | None = None
    near_boundary: bool = False
    ill_conditioned: bool = False
    family_complete: bool = True

    def __post_init__(self):
        br = layout(self.algebra).branch(self.branch)
        if set(self.params) != set(br.free):
            raise ValueError(f"params {sorted(self.params)} do not match branch {self.branch}")
        frame = _frame(self.algebra.id, br, self.params)
        bad = [c for c in self.constraints if not constraint_holds(c, self.params, frame)]
        if bad:
            raise ValueError(f"constraints violated: {bad} for {self.params}")

    @property
    def free_count(self) -> int:
        return len(self.params)

    def matches(self, other: "CanonicalForm", tol: float = PARAM_TOL) -> bool:
        return (self.algebra == other.algebra and self.branch == other.branch
                and set(self.params) == set(other.params)
                and all(params_close(self.params[k], other.params[k], tol) for k in self.params))

    def max_param_gap(self, other: "CanonicalForm") -> float:
        if self.branch != other.branch:
            return float("inf")
        return max((abs(self.params[k] - other.params[k]) for k in self.params), default=0.0)

    def to_json(self) -> dict:
        out = {
            "algebra": self.algebra.id,
            "alpha": self.algebra.alpha,
            "beta": self.algebra.beta,
            "branch": self.branch,
            "params": {k: self.params[k] for k in layout(self.algebra).branch(self.branch).free},
            "constraints": list(self.constraints),
            "near_boundary": self.near_boundary,
            "ill_conditioned": self.ill_conditioned,
            "family_complete": self.family_complete,
        }
        if self.reconstruction_residual is not None:
            out["reconstruction_residual"] = self.reconstruction_residual
        if self.witness is not None:
            out["witness"] = self.witness.tolist()
        return out


def params_close(a: float, b: float, tol: float = PARAM_TOL) -> bool:
    """Relative comparison for magnitudes above 1, absolute below."""
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def make_form(alg: LieAlgebra, branch: int, params: dict) -> CanonicalForm:
    br = layout(alg).branch(branch)
    return CanonicalForm(alg, branch, {k: float(params[k]) for k in br.free}, br.constraints)


def _frame(alg_id, br: Branch, params) -> np.ndarray:
    F = np.zeros((4, 4))
    for i, j in br.ones:
        F[i - 1, j - 1] = 1.0
    for name in br.free:
        F[int(name[1]) - 1, int(name[2]) - 1] = params[name]
    return F


def canonical_frame(form: CanonicalForm) -> np.ndarray:
    """Columns X_1..X_4 of the canonical orthonormal basis in e_1..e_4."""
    return _frame(form.algebra.id, layout(form.algebra).branch(form.branch), form.params)


def canonical_basis(form: CanonicalForm) -> np.ndarray:
    F = canonical_frame(form)
    assert np.all(np.tril(F, -1) == 0)
    return F


def canonical_metric(form: CanonicalForm) -> np.ndarray:
    return psi(canonical_basis(form))


# -- 2x2 block reducers --------------------------------------------------------

def reduce_block_diag_ratio(T):
    """Scale-rotation normal form of a 2x2 block.

    Returns ``(x, Q, s)`` with ``Q`` a rotation, ``s > 0`` and
    ``s * Q @ T @ U = diag(1, x)`` for some orthogonal ``U``; ``x`` is the
    ratio of the smaller to the larger singular value of ``T``.
    """
    T = np.asarray(T, float)
    V, sig, Wt = np.linalg.svd(T)
    if np.linalg.det(V) < 0:
        V = V * np.array([-1.0, 1.0])
    return float(sig[1] / sig[0]), V.T, float(1.0 / sig[0])


def block_diag_ratio_completion(T, x, Q, s):
    """The orthogonal ``U`` that finishes ``reduce_block_diag_ratio``."""
    return np.linalg.solve(s * Q @ np.asarray(T, float), np.diag([1.0, x]))


def reduce_block_halfplane(T):
    """Normal form under diagonal and anti-diagonal invertible matrices.

    Returns ``(x, D, U)`` with ``D @ T @ U = [[1, x], [0, 1]]`` and ``x >= 0``.
    """
    T = np.asarray(T, float)
    t11, t12, t22 = T[0, 0], T[0, 1], T[1, 1]
    sign = 1.0 if t12 >= 0 else -1.0
    D = np.diag([1.0 / t11, sign / t22])
    U = np.diag([1.0, sign])
    return abs(t12) / t11, D, U


def o2_orbit_rep(v, group: str = "O2") -> np.ndarray:
    """Orbit representative of a plane vector under O(2), SO(2) or {+I, -I}."""
    v = np.asarray(v, float)
    if group in ("O2", "SO2"):
        return np.array([float(np.hypot(*v)), 0.0])
    if group == "signs":
        first = v[0] if abs(v[0]) > ZERO_TOL else 0.0
        if first < 0 or (first == 0 and v[1] < 0):
            v = -v
        return v + 0.0
    raise ValueError(f"unknown group {group!r}")


# -- reduction machinery ---------------------------------------------------------

class _Reducer:
    """Frame ``F`` (triangular in frame order) plus accumulated witness ``W``."""

    def __init__(self, family: AutFamily, g, order):
        self.family = family
        self.p = np.array(order) - 1
        self.ix = np.ix_(self.p, self.p)
        X = gram_schmidt(g[self.ix])
        self.F = np.zeros((4, 4))
        self.F[self.ix] = X
        self.W = np.eye(4)
        self.near_boundary = False

    def copy(self) -> "_Reducer":
        new = object.__new__(_Reducer)
        new.__dict__.update(self.__dict__)
        new.F = self.F.copy()
        new.W = self.W.copy()
        return new

    def b(self, name: str) -> float:
        return float(self.F[int(name[1]) - 1, int(name[2]) - 1])

    def block(self, i: int, j: int) -> np.ndarray:
        """2x2 sub-block on rows/columns (e_i, e_j), 1-based."""
        k = [i - 1, j - 1]
        return self.F[np.ix_(k, k)]

    def element(self, shape: int = 0, **params) -> np.ndarray:
        names = self.family.shape_params(shape)
        base = self.family.identity_params().assignment if shape == 0 else {}
        vals = [float(params.get(n, base.get(n, 0.0))) for n in names]
        return self.family.matrix(shape, vals)

    def apply(self, A: np.ndarray) -> None:
        M = A @ self.F
        T, _, ok = _kernels.rq(np.ascontiguousarray(M[self.ix]))
        if not ok:
            raise NotPositiveDefinite("frame became singular during reduction")
        self.F = np.zeros((4, 4))
        self.F[self.ix] = T
        self.W = A @ self.W

    def act(self, shape: int = 0, **params) -> None:
        self.apply(self.element(shape, **params))

    def kill(self, targets, names, shape: int = 0, **fixed) -> None:
        """Zero the entries ``targets`` (b_ij names) by solving the affine
        equations in the parameters ``names``; the rest sit at ``fixed`` or
        the identity."""
        idx = [(int(t[1]) - 1, int(t[2]) - 1) for t in targets]

        def entries(x):
            A = self.element(shape, **fixed, **dict(zip(names, x)))
            M = A @ self.F
            return np.array([M[i, j] for i, j in idx])

        x0 = np.zeros(len(names))
        f0 = entries(x0)
        J = np.column_stack([entries(e) - f0 for e in np.eye(len(names))])
        x = np.linalg.solve(J, -f0)
        self.act(shape, **fixed, **dict(zip(names, x)))

    def scale_rotate(self, i: int, j: int, cos_name: str, sin_name: str) -> float:
        """Bring the (e_i, e_j) block to diag(1, x) with a rotation-scaling
        element whose block is [[c, s], [-s, c]]. Returns x."""
        x, Q, s = reduce_block_diag_ratio(self.block(i, j))
        self.act(**{cos_name: s * Q[0, 0], sin_name: s * Q[0, 1]})
        return x

    def rotate_to_axis(self, v, cos_name: str, sin_name: str, scale: float = 1.0) -> None:
        """Apply the block rotation [[c, s], [-s, c]] that sends v to (|v|, 0)."""
        r = float(np.hypot(*v))
        if r <= ZERO_TOL:
            return
        c, s = v[0] / r, v[1] / r
        self.act(**{cos_name: scale * c, sin_name: scale * s})

    def signs(self, generators, priority) -> "_Reducer":
        """Exhaustive search over products of sign generators; keep the first
        whose priority parameters are lexicographically most non-negative."""
        best, best_score = None, None
        for mask in itertools.product((False, True), repeat=len(generators)):
            trial = self.copy()
            for use, (shape, kw) in zip(mask, generators):
                if use:
                    trial.act(shape, **kw)
            score = tuple(trial.b(n) >= -ZERO_TOL for n in priority)
            if best is None or score > best_score:
                best, best_score = trial, score
        return best

    def branch_for_ratio(self, x: float) -> bool:
        """True for the x = 1 branch; records near-boundary inputs."""
        gap = abs(x - 1.0)
        if BOUNDARY_NOISE < gap <= BRANCH_BAND:
            self.near_boundary = True
        return gap <= BRANCH_BAND


def _sign(**kw):
    return (0, kw)


def _sign_shape(shape, **kw):
    return (shape, kw)


# Each reducer returns (reducer, branch tag).

def _red_a2_2a1(r: _Reducer):
    r.kill(("b21", "b31", "b41"), ("a5", "a9", "a13"))
    r.act(a6=1.0 / r.b("b22"))
    K = np.linalg.inv(r.block(3, 4))
    r.act(a11=K[0, 0], a12=K[0, 1], a15=K[1, 0], a16=K[1, 1])
    # v -> K v on the (X3, X4) entries of row e2
    c, s = _axis_rotation((r.b("b23"), r.b("b24")))
    r.act(a11=c, a12=s, a15=-s, a16=c)
    return r, 1


def _red_2a2_once(r: _Reducer):
    r.kill(("b21", "b43"), ("a5", "a15"))
    r.act(a6=1.0 / r.b("b22"), a16=1.0 / r.b("b44"))
    r = r.signs([_sign(a6=-1.0), _sign(a16=-1.0)], ("b23", "b14", "b24"))
    return r


def _red_a3_common(r: _Reducer):
    r.kill(("b13", "b23", "b43"), ("a3", "a7", "a15"))
    r.act(a16=1.0 / r.b("b44"))


def _red_a3_2(r: _Reducer):
    _red_a3_common(r)
    r.act(a1=1.0 / r.b("b22"))
    r.kill(("b12",), ("a2",))
    r = r.signs([_sign(a16=-1.0)], ("b24", "b14"))
    return r, 1


def _red_a3_3(r: _Reducer):
    _red_a3_common(r)
    K = np.linalg.inv(r.block(1, 2))
    r.act(a1=K[0, 0], a2=K[0, 1], a5=K[1, 0], a6=K[1, 1])
    c, s = _axis_rotation((r.b("b14"), r.b("b24")))
    r.act(a1=c, a2=s, a5=-s, a6=c)
    return r, 1


def _red_a3_5(r: _Reducer):
    _red_a3_common(r)
    r.act(a1=1.0 / r.b("b11"), a6=1.0 / r.b("b22"))
    r = r.signs([_sign(a1=-1.0), _sign(a6=-1.0), _sign(a16=-1.0)], ("b14", "b24", "b12"))
    return r, 1


def _red_a3_7(r: _Reducer):
    _red_a3_common(r)
    x = r.scale_rotate(1, 2, "a1", "a2")
    if r.branch_for_ratio(x):
        r.rotate_to_axis((r.b("b14"), r.b("b24")), "a1", "a2")
        return r, 3
    r = r.signs([_sign(a16=-1.0)], ("b14", "b24"))
    return r, (1 if r.b("b24") >= -ZERO_TOL else 2)


def _red_a4_2(r: _Reducer):
    r.kill(("b14", "b24", "b34"), ("a4", "a8", "a12"))
    r.act(a1=1.0 / r.b("b11"), a6=1.0 / r.b("b33"))
    r.kill(("b23",), ("a7",))
    r = r.signs([_sign(a1=-1.0)], ("b12", "b13"))
    return r, 1


def _red_a4_2_alpha1(r: _Reducer):
    r.kill(("b14", "b24", "b34"), ("a4", "a8", "a12"))
    r.act(a1=1.0 / r.b("b11"), a6=1.0 / r.b("b33"))
    r.kill(("b21", "b13", "b23"), ("a5", "a3", "a7"))
    return r, 1


def _red_a4_4(r: _Reducer):
    r.kill(("b14", "b24", "b34"), ("a4", "a8", "a12"))
    r.act(a1=1.0 / r.b("b11"))
    r.kill(("b13", "b23"), ("a2", "a3"))
    return r, 1


def _red_a4_5(r: _Reducer):
    r.kill(("b14", "b24", "b34"), ("a4", "a8", "a12"))
    r.act(a1=1.0 / r.b("b11"), a6=1.0 / r.b("b22"), a11=1.0 / r.b("b33"))
    r = r.signs([_sign(a1=-1.0), _sign(a6=-1.0), _sign(a11=-1.0)], ("b12", "b13", "b23"))
    return r, 1


def _red_rot3(r: _Reducer, scale_first):
    r.kill(("b14", "b24", "b34"), ("a4", "a8", "a12"))
    if scale_first:
        r.act(a1=1.0 / r.b("b11"))
    x = r.scale_rotate(2, 3, "a6", "a7")
    if r.branch_for_ratio(x):
        r.rotate_to_axis((r.b("b12"), r.b("b13")), "a6", "a7")
        return r, 3
    r = r.signs([_sign(a6=-1.0, a7=0.0)], ("b12", "b13"))
    return r, (1 if r.b("b13") >= -ZERO_TOL else 2)


def _red_a4_6(r: _Reducer):
    return _red_rot3(r, scale_first=True)


def _red_a4_11(r: _Reducer):
    return _red_rot3(r, scale_first=False)


def _red_a4_7(r: _Reducer):
    r.kill(("b14", "b24", "b34"), ("a4", "a8", "a12"))
    r.act(a6=1.0 / r.b("b22"))
    r.kill(("b23",), ("a7",))
    r = r.signs([_sign(a6=-1.0)], ("b12", "b13"))
    return r, 1


def _red_a4_9(r: _Reducer):
    r.kill(("b14", "b24", "b34"), ("a4", "a8", "a12"))
    r.act(a6=1.0 / r.b("b22"), a11=1.0 / r.b("b33"))
    r = r.signs([_sign(a6=-1.0), _sign(a11=-1.0)], ("b12", "b13", "b23"))
    return r, 1


def _red_a4_12(r: _Reducer):
    r.kill(("b13", "b23"), ("a3", "a4"))
    x = r.scale_rotate(1, 2, "a1", "a2")
    flip = _sign_shape(1, a1=-1.0)   # diag(-1, 1, 1, -1)
    if r.branch_for_ratio(x):
        r.rotate_to_axis((r.b("b14"), r.b("b24")), "a1", "a2")
        r = r.signs([flip], ("b34",))
        return r, 3
    r = r.signs([_sign(a1=-1.0), _sign_shape(1, a1=1.0), flip], ("b14", "b24", "b34"))
    return r, 1


def _axis_rotation(v):
    r = float(np.hypot(*v))
    if r <= ZERO_TOL:
        return 1.0, 0.0
    return v[0] / r, v[1] / r


_REDUCERS = {
    "A2+2A1": _red_a2_2a1,
    "A3_2+A1": _red_a3_2,
    "A3_3+A1": _red_a3_3,
    "A3_5+A1": _red_a3_5,
    "A3_7+A1": _red_a3_7,
    "A4_2_generic": _red_a4_2,
    "A4_3": _red_a4_2,
    "A4_2_alpha1": _red_a4_2_alpha1,
    "A4_4": _red_a4_4,
    "A4_5": _red_a4_5,
    "A4_6": _red_a4_6,
    "A4_7": _red_a4_7,
    "A4_9": _red_a4_9,
    "A4_11": _red_a4_11,
    "A4_12": _red_a4_12,
}


def _swap_element(family: AutFamily) -> np.ndarray:
    """e1 <-> e3, e2 <-> e4, the second component of Aut(2A2)."""
    return family.matrix(1, [0.0, 1.0, 0.0, 1.0])  # a7, a8, a13, a14


def _reduce_2a2(family, g, order):
    d12, d34 = swap_distances(g)
    candidates = []
    near = abs(d12 - d34) <= BRANCH_BAND * max(d12, d34)
    if d12 <= d34 or near:
        r = _Reducer(family, g, order)
        candidates.append(_red_2a2_once(r))
    if d12 > d34 or near:
        S = _swap_element(family)
        r = _Reducer(family, pullback(S, g), order)
        r.W = S.copy()
        candidates.append(_red_2a2_once(r))
    if len(candidates) == 2:
        br = LAYOUTS["2A2"].branches[0]
        keys = [tuple(np.round([c.b(n) for n in br.free], 6)) for c in candidates]
        chosen = candidates[0] if keys[0] >= keys[1] else candidates[1]
        chosen.near_boundary = abs(d12 - d34) > BOUNDARY_NOISE * max(d12, d34)
        candidates = [chosen]
    return candidates[0], 1


@functools.lru_cache(maxsize=256)
def _family_and_completeness(alg_id, alpha, beta):
    alg = make_algebra(alg_id, alpha, beta)
    fam = aut_family(alg)
    return fam, family_is_complete(fam)


def canonicalize(alg: LieAlgebra, g) -> CanonicalForm:
    """Canonical form of ``g`` with a reconstruction witness.

    The returned form carries ``witness`` (an automorphism ``W``) with
    ``pullback(W, g) == psi(canonical_basis(form))``, and the relative residual
    of that identity.
    """
    g = check_inner_product(np.asarray(g, float), sym_tol=1e-9)
    g = 0.5 * (g + g.T)
    lay = layout(alg)
    family, complete = _family_and_completeness(alg.id, alg.alpha, alg.beta)

    if alg.id == "2A2":
        r, tag = _reduce_2a2(family, g, lay.order)
    else:
        r, tag = _REDUCERS[alg.id](_Reducer(family, g, lay.order))

    br = lay.branch(tag)
    params = {n: r.b(n) for n in br.free}
    sign_normalized = {m.group(1) for c in br.constraints for m in [_ATOM.match(c.split("->")[-1].strip())]
                       if m and m.group(2) in (">=", "<=")}
    for n in sign_normalized:
        if abs(params[n]) <= ZERO_TOL:
            params[n] = 0.0
    template = _frame(alg.id, br, params)
    scale = max(1.0, float(np.max(np.abs(template))))
    shape_err = float(np.max(np.abs(r.F - template))) / scale
    if shape_err > SHAPE_TOL and not r.near_boundary:
        raise RuntimeError(f"{alg.id}: reduction left a residual of {shape_err:.2e}")

    target = psi(template)
    recon = pullback(r.W, g)
    residual = float(np.max(np.abs(recon - target)) / max(1.0, np.max(np.abs(target))))
    return CanonicalForm(
        alg, tag, params, br.constraints,
        witness=r.W, reconstruction_residual=residual,
        near_boundary=r.near_boundary, ill_conditioned=is_ill_conditioned(g),
        family_complete=complete,
    )


# -- random valid forms ----------------------------------------------------------

def _bounds(name, constraints):
    lo, hi = None, None
    for c in constraints:
        if "->" in c:
            continue
        m = _ATOM.match(c)
        if not m or m.group(1) != name:
            continue
        op, v = m.group(2), float(m.group(3))
        if op in (">", ">="):
            lo = v
        elif op in ("<", "<="):
            hi = v
    return lo, hi


def sample_form(alg: LieAlgebra, branch: int, rng: np.random.Generator) -> CanonicalForm:
    """Random form satisfying every constraint of the branch, away from its
    boundaries."""
    br = layout(alg).branch(branch)
    for _ in range(1000):
        params = {}
        for n in br.free:
            lo, hi = _bounds(n, br.constraints)
            if lo is not None and hi is not None:
                w = hi - lo
                params[n] = rng.uniform(lo + 0.05 * w, hi - 0.05 * w)
            elif lo is not None:
                params[n] = lo + rng.uniform(0.1, 1.5)
            elif hi is not None:
                params[n] = hi - rng.uniform(0.1, 1.5)
            else:
                params[n] = rng.uniform(-1.5, 1.5)
        frame = _frame(alg.id, br, params)
        if all(constraint_holds(c, params, frame) for c in br.constraints):
            if alg.id == "2A2":
                d12, d34 = swap_distances(psi(frame))
                if d12 > d34 * (1 - 1e-3):
                    continue
            return make_form(alg, branch, params)
    raise RuntimeError("could not sample a valid form")


def branch_tags(alg) -> tuple:
    return tuple(b.tag for b in layout(alg).branches)


def generic_branch(alg) -> int:
    return max(layout(alg).branches, key=lambda b: len(b.free)).tag


__all__ = [
    "ALGEBRA_IDS", "Branch", "CanonicalForm", "LAYOUTS", "Layout", "branch_tags",
    "canonical_basis", "canonical_frame", "canonical_metric", "canonicalize",
    "constraint_holds", "generic_branch", "layout", "make_form", "moduli_dim",
    "o2_orbit_rep", "params_close", "reduce_block_diag_ratio", "reduce_block_halfplane",
    "sample_form",
]
