"""Parametric automorphism families, one per catalog algebra.

Each family is a list of matrix templates ("shapes") whose entries are
expression strings in free parameters ``a1..a16`` and the algebra parameters
``alpha``/``beta``. The same strings drive numeric construction and the JSON
export, so the two can never drift apart.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .catalog import LieAlgebra
from .errors import BadParams, ParamOutOfRange, Singular, UnsupportedAlgebra
from .metric import DET_GUARD

_NAME = re.compile(r"\ba\d+\b")

# Rows of each shape, 1-based parameter names as printed.
_TEMPLATES = {
    "A2+2A1": [[
        ["1", "0", "0", "0"],
        ["a5", "a6", "0", "0"],
        ["a9", "0", "a11", "a12"],
        ["a13", "0", "a15", "a16"]]],
    # The (3,4) entry of the first shape is 0, not a free parameter: a nonzero
    # value there sends e4 outside the derived algebra of the second factor.
    "2A2": [[
        ["1", "0", "0", "0"],
        ["a5", "a6", "0", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "a15", "a16"]], [
        ["0", "0", "1", "0"],
        ["0", "0", "a7", "a8"],
        ["1", "0", "0", "0"],
        ["a13", "a14", "0", "0"]]],
    "A3_2+A1": [[
        ["a1", "a2", "a3", "0"],
        ["0", "a1", "a7", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "a15", "a16"]]],
    "A3_3+A1": [[
        ["a1", "a2", "a3", "0"],
        ["a5", "a6", "a7", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "a15", "a16"]]],
    "A3_5+A1": [[
        ["a1", "0", "a3", "0"],
        ["0", "a6", "a7", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "a15", "a16"]]],
    "A3_7+A1": [[
        ["a1", "a2", "a3", "0"],
        ["-a2", "a1", "a7", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "a15", "a16"]]],
    "A4_2_generic": [[
        ["a1", "0", "0", "a4"],
        ["0", "a6", "a7", "a8"],
        ["0", "0", "a6", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_2_alpha1": [[
        ["a1", "0", "a3", "a4"],
        ["a5", "a6", "a7", "a8"],
        ["0", "0", "a6", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_3": [[
        ["a1", "0", "0", "a4"],
        ["0", "a6", "a7", "a8"],
        ["0", "0", "a6", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_4": [[
        ["a1", "a2", "a3", "a4"],
        ["0", "a1", "a2", "a8"],
        ["0", "0", "a1", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_5": [[
        ["a1", "0", "0", "a4"],
        ["0", "a6", "0", "a8"],
        ["0", "0", "a11", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_6": [[
        ["a1", "0", "0", "a4"],
        ["0", "a6", "a7", "a8"],
        ["0", "-a7", "a6", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_7": [[
        ["a6**2", "-a12*a6", "-a12*(a6+a7)+a6*a8", "a4"],
        ["0", "a6", "a7", "a8"],
        ["0", "0", "a6", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_9": [[
        ["a11*a6", "-a12*a6/beta", "a8*a11", "a4"],
        ["0", "a6", "0", "a8"],
        ["0", "0", "a11", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_11": [[
        ["a6**2+a7**2",
         "-(a6*(alpha*a12+a8)+a7*(alpha*a8-a12))/(1+alpha**2)",
         "-(a6*(a12-alpha*a8)+a7*(alpha*a12+a8))/(1+alpha**2)",
         "a4"],
        ["0", "a6", "a7", "a8"],
        ["0", "-a7", "a6", "a12"],
        ["0", "0", "0", "1"]]],
    "A4_12": [[
        ["a1", "a2", "a3", "a4"],
        ["-a2", "a1", "a4", "-a3"],
        ["0", "0", "1", "0"],
        ["0", "0", "0", "1"]], [
        ["a1", "a2", "a3", "a4"],
        ["a2", "-a1", "-a4", "a3"],
        ["0", "0", "1", "0"],
        ["0", "0", "0", "-1"]]],
}

# Index blocks preserved by the block-diagonal restriction (0-based).
_BLOCKS = {
    "A2+2A1": ((0, 1), (2, 3)),
    "2A2": ((0, 1), (2, 3)),
    "A4_12": ((0, 1), (2, 3)),
}
_ROTATION = {
    "A3_7+A1": ("a1", "a2"),
    "A4_6": ("a6", "a7"),
    "A4_11": ("a6", "a7"),
    "A4_12": ("a1", "a2"),
}

_SAFE = {"__builtins__": {}, "cos": math.cos, "sin": math.sin}


def _names_in(expr: str) -> set:
    return set(_NAME.findall(expr))


def _sort_names(names) -> tuple:
    return tuple(sorted(names, key=lambda s: (s[0] != "a", int(s[1:]) if s[1:].isdigit() else 0, s)))


@dataclass(frozen=True)
class AutParams:
    assignment: dict
    shape_index: int = 0


@dataclass(frozen=True, eq=False)
class AutFamily:
    """Automorphism matrices ``build(params)`` of one algebra.

    ``fixed`` maps template parameters to expressions in the free parameters;
    it is how the named restrictions (diagonal, block-diagonal, rotation) are
    expressed without touching the templates.
    """

    algebra: LieAlgebra
    shapes: tuple
    name: str = "full"
    fixed: tuple = ()
    _compiled: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        env = dict(_SAFE, alpha=self.algebra.alpha, beta=self.algebra.beta)
        fixed = dict(self.fixed)
        for shape in self.shapes:
            free = self._free_of(shape, fixed)
            sub = "".join(f"{k}=({v});" for k, v in fixed.items())
            rows = ",".join("(" + ",".join(f"({e})" for e in row) + ",)" for row in shape)
            args = ",".join(free)
            src = f"def _b({args}):\n {sub or 'pass'}\n return ({rows})"
            ns = dict(env)
            exec(compile(src, f"<{self.algebra.id}>", "exec"), ns)
            self._compiled.append((free, ns["_b"]))

    @staticmethod
    def _free_of(shape, fixed) -> tuple:
        names = set().union(*(_names_in(e) for row in shape for e in row))
        names -= set(fixed)
        for expr in fixed.values():
            names |= set(re.findall(r"\b(?:a\d+|theta)\b", expr))
        return _sort_names(names)

    @property
    def discrete_components(self) -> int:
        return len(self.shapes)

    def shape_params(self, shape_index: int = 0) -> tuple:
        return self._compiled[shape_index][0]

    @property
    def param_names(self) -> tuple:
        names = set()
        for free, _ in self._compiled:
            names |= set(free)
        return _sort_names(names)

    def matrix(self, shape_index: int, values) -> np.ndarray:
        """Fast path: positional values in ``shape_params(shape_index)`` order."""
        _, fn = self._compiled[shape_index]
        return np.array(fn(*values), dtype=float)

    def identity_params(self) -> AutParams:
        """Diagonal-alone parameters at 1, everything else at 0."""
        diag = {self.shapes[0][i][i] for i in range(4)}
        names = self.shape_params(0)
        return AutParams({n: 1.0 if n in diag else 0.0 for n in names}, 0)

    def entries(self, shape_index: int = 0) -> list:
        fixed = dict(self.fixed)

        def subst(expr):
            return _NAME.sub(lambda m: f"({fixed[m.group(0)]})" if m.group(0) in fixed else m.group(0), expr)

        shape = self.shapes[shape_index]
        return [[i + 1, j + 1, subst(shape[i][j])] for i in range(4) for j in range(4)]

    def to_json(self, shape_index: int = 0) -> dict:
        return {
            "algebra": self.algebra.id,
            **self.algebra.params,
            "family": self.name,
            "shape_index": shape_index,
            "entries": self.entries(shape_index),
            "free_params": list(self.shape_params(shape_index)),
        }


def aut_family(alg: LieAlgebra) -> AutFamily:
    if alg.id not in _TEMPLATES:
        raise UnsupportedAlgebra(alg.id)
    if alg.id == "A4_9" and alg.beta == 0:
        raise ParamOutOfRange("A4_9 automorphism family is undefined at beta=0")
    shapes = tuple(tuple(tuple(r) for r in s) for s in _TEMPLATES[alg.id])
    return AutFamily(alg, shapes)


def restrict(family: AutFamily, name: str) -> AutFamily:
    """Named sub-family: ``diagonal``, ``block_diagonal`` or ``rotation``."""
    alg = family.algebra
    shapes = family.shapes
    if name == "diagonal":
        diag = {shapes[0][i][i] for i in range(4)}
        zero = set(family.param_names) - diag
        fixed = {n: "0" for n in zero}
    elif name == "block_diagonal":
        blocks = _BLOCKS.get(alg.id, ((0, 1, 2), (3,)))
        where = {i: b for b in blocks for i in b}
        fixed = {}
        for shape in shapes[:1]:
            for i in range(4):
                for j in range(4):
                    if where[i] is not where[j]:
                        fixed.update({n: "0" for n in _names_in(shape[i][j])})
    elif name == "rotation":
        if alg.id not in _ROTATION:
            raise BadParams(f"{alg.id} has no rotation sub-family")
        c, s = _ROTATION[alg.id]
        fixed = {c: "cos(theta)", s: "sin(theta)"}
    else:
        raise BadParams(f"unknown restriction {name!r}")
    return AutFamily(alg, shapes, name=name, fixed=tuple(sorted(fixed.items())))


def restrictions(family: AutFamily) -> list:
    names = ["diagonal", "block_diagonal"]
    if family.algebra.id in _ROTATION:
        names.append("rotation")
    return names


def build_automorphism(family: AutFamily, p: AutParams) -> np.ndarray:
    k = p.shape_index
    if not 0 <= k < family.discrete_components:
        raise BadParams(f"shape_index {k} out of range")
    needed = family.shape_params(k)
    unknown = set(p.assignment) - set(family.param_names)
    missing = set(needed) - set(p.assignment)
    if unknown or missing:
        raise BadParams(f"unknown {sorted(unknown)} / missing {sorted(missing)}")
    A = family.matrix(k, [float(p.assignment[n]) for n in needed])
    if not np.all(np.isfinite(A)) or abs(np.linalg.det(A)) < DET_GUARD:
        raise Singular("automorphism parameters give a singular matrix")
    return A


def automorphism_residual(alg: LieAlgebra, A) -> float:
    """max_{i<j} |A[e_i, e_j] - [A e_i, A e_j]|."""
    return _kernels.aut_residual(alg.c, np.asarray(A, float))


def is_automorphism(alg: LieAlgebra, A, tol: float = 1e-9) -> bool:
    A = np.asarray(A, float)
    if A.shape != (4, 4) or not np.all(np.isfinite(A)):
        return False
    if abs(np.linalg.det(A)) < DET_GUARD:
        return False
    return automorphism_residual(alg, A) <= tol


def sample_params(family: AutFamily, rng: np.random.Generator, scale: float = 2.0) -> AutParams:
    k = int(rng.integers(family.discrete_components))
    names = family.shape_params(k)
    vals = rng.uniform(-scale, scale, size=len(names))
    return AutParams(dict(zip(names, vals.tolist())), k)


def sample_automorphism(family: AutFamily, seed, scale: float = 2.0) -> np.ndarray:
    """Seeded random element; resamples until the determinant guard passes."""
    if scale < 0:
        raise BadParams("scale must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    tries = 1 if scale == 0 else 100
    for _ in range(tries):
        p = sample_params(family, rng, scale)
        A = family.matrix(p.shape_index, list(p.assignment.values()))
        if np.all(np.isfinite(A)) and abs(np.linalg.det(A)) >= DET_GUARD:
            return A
    raise Singular(f"no invertible sample in {tries} tries")


def derivation_algebra(alg: LieAlgebra, tol: float = 1e-10) -> np.ndarray:
    """Basis of Der(g) as an array of shape (d, 4, 4), from the linear
    constraints D[x, y] = [Dx, y] + [x, Dy]."""
    c = alg.c
    M = np.zeros((64, 16))
    for p in range(16):
        D = np.zeros(16)
        D[p] = 1.0
        D = D.reshape(4, 4)
        lhs = np.einsum("ijm,km->ijk", c, D)
        rhs = np.einsum("pi,pjk->ijk", D, c) + np.einsum("qj,iqk->ijk", D, c)
        M[:, p] = (lhs - rhs).ravel()
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vt[rank:].reshape(-1, 4, 4)


def family_tangent_rank(family: AutFamily, h: float = 1e-6) -> int:
    """Rank of the differential of the identity-component shape at I."""
    base = family.identity_params().assignment
    names = family.shape_params(0)
    x0 = np.array([base[n] for n in names])
    cols = []
    for i in range(len(names)):
        e = np.zeros(len(names))
        e[i] = h
        cols.append((family.matrix(0, x0 + e) - family.matrix(0, x0 - e)).ravel() / (2 * h))
    return int(np.linalg.matrix_rank(np.array(cols), tol=1e-6))


def family_is_complete(family: AutFamily) -> bool:
    """True when the family's identity component has the full dimension of
    Aut(g). At a few degenerate parameter values (e.g. A4_5 with alpha=beta)
    the printed family is a proper subgroup and this returns False."""
    return family_tangent_rank(family) == len(derivation_algebra(family.algebra))
