"""The sixteen four-dimensional nonunimodular real Lie algebras.

Structure constants follow ``[e_i, e_j] = sum_k c[i, j, k] e_k`` with 0-based
indices internally. Docs and serialized output use 1-based basis labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .errors import ParamMissing, ParamOutOfRange, ParamUnexpected, UnsupportedAlgebra

ALGEBRA_IDS = (
    "A2+2A1", "2A2", "A3_2+A1", "A3_3+A1", "A3_5+A1", "A3_7+A1",
    "A4_2_generic", "A4_2_alpha1", "A4_3", "A4_4", "A4_5", "A4_6",
    "A4_7", "A4_9", "A4_11", "A4_12",
)

# Moduli dimensions as tabulated in the literature. Seven of these disagree
# with the orbit-dimension count; see ``canonical.moduli_dim``.
PUBLISHED_MODULI_DIMS = {
    "A2+2A1": 5, "2A2": 7, "A3_2+A1": 5, "A3_3+A1": 3, "A3_5+A1": 5,
    "A3_7+A1": 5, "A4_2_generic": 4, "A4_2_alpha1": 3, "A4_3": 4,
    "A4_4": 4, "A4_5": 4, "A4_6": 4, "A4_7": 5, "A4_9": 5, "A4_11": 5,
    "A4_12": 6,
}

# Representative admissible parameters, used when a caller does not pick any.
DEFAULT_PARAMS = {
    "A3_5+A1": {"alpha": 0.5},
    "A3_7+A1": {"alpha": 1.0},
    "A4_2_generic": {"alpha": 2.0},
    "A4_5": {"alpha": -0.5, "beta": 0.7},
    "A4_6": {"alpha": 1.0, "beta": 0.5},
    "A4_9": {"beta": 0.5},
    "A4_11": {"alpha": 1.0},
}


def _vec(*xs):
    return np.array(xs, dtype=float)


@dataclass(frozen=True)
class _Entry:
    label: str
    params: tuple
    constraint: str
    admissible: Callable
    brackets: Callable


def _always(a, b):
    return True


_ENTRIES = {
    "A2+2A1": _Entry(
        "A_2 + 2A_1", (), "", _always,
        lambda a, b: {(1, 2): _vec(0, 1, 0, 0)}),
    "2A2": _Entry(
        "2A_2", (), "", _always,
        lambda a, b: {(1, 2): _vec(0, 1, 0, 0), (3, 4): _vec(0, 0, 0, 1)}),
    "A3_2+A1": _Entry(
        "A_{3,2} + A_1", (), "", _always,
        lambda a, b: {(1, 3): _vec(1, 0, 0, 0), (2, 3): _vec(1, 1, 0, 0)}),
    "A3_3+A1": _Entry(
        "A_{3,3} + A_1", (), "", _always,
        lambda a, b: {(1, 3): _vec(1, 0, 0, 0), (2, 3): _vec(0, 1, 0, 0)}),
    "A3_5+A1": _Entry(
        "A_{3,5}^alpha + A_1", ("alpha",), "0<|α|<1",
        lambda a, b: 0 < abs(a) < 1,
        lambda a, b: {(1, 3): _vec(1, 0, 0, 0), (2, 3): _vec(0, a, 0, 0)}),
    "A3_7+A1": _Entry(
        "A_{3,7}^alpha + A_1", ("alpha",), "α>0",
        lambda a, b: a > 0,
        lambda a, b: {(1, 3): _vec(a, -1, 0, 0), (2, 3): _vec(1, a, 0, 0)}),
    "A4_2_generic": _Entry(
        "A_{4,2}^alpha", ("alpha",), "α∉{0,1,−2}",
        lambda a, b: a not in (0.0, 1.0, -2.0),
        lambda a, b: {(1, 4): _vec(a, 0, 0, 0), (2, 4): _vec(0, 1, 0, 0),
                      (3, 4): _vec(0, 1, 1, 0)}),
    "A4_2_alpha1": _Entry(
        "A_{4,2}^1", (), "", _always,
        lambda a, b: {(1, 4): _vec(1, 0, 0, 0), (2, 4): _vec(0, 1, 0, 0),
                      (3, 4): _vec(0, 1, 1, 0)}),
    "A4_3": _Entry(
        "A_{4,3}", (), "", _always,
        lambda a, b: {(1, 4): _vec(1, 0, 0, 0), (3, 4): _vec(0, 1, 0, 0)}),
    "A4_4": _Entry(
        "A_{4,4}", (), "", _always,
        lambda a, b: {(1, 4): _vec(1, 0, 0, 0), (2, 4): _vec(1, 1, 0, 0),
                      (3, 4): _vec(0, 1, 1, 0)}),
    "A4_5": _Entry(
        "A_{4,5}^{alpha,beta}", ("alpha", "beta"), "αβ≠0, −1≤α≤β≤1, α+β≠−1",
        lambda a, b: a * b != 0 and -1 <= a <= b <= 1 and a + b != -1,
        lambda a, b: {(1, 4): _vec(1, 0, 0, 0), (2, 4): _vec(0, a, 0, 0),
                      (3, 4): _vec(0, 0, b, 0)}),
    "A4_6": _Entry(
        "A_{4,6}^{alpha,beta}", ("alpha", "beta"),
        "α≠0, β≥0, α≠−2β",
        lambda a, b: a != 0 and b >= 0 and a != -2 * b,
        lambda a, b: {(1, 4): _vec(a, 0, 0, 0), (2, 4): _vec(0, b, -1, 0),
                      (3, 4): _vec(0, 1, b, 0)}),
    "A4_7": _Entry(
        "A_{4,7}", (), "", _always,
        lambda a, b: {(2, 3): _vec(1, 0, 0, 0), (1, 4): _vec(2, 0, 0, 0),
                      (2, 4): _vec(0, 1, 0, 0), (3, 4): _vec(0, 1, 1, 0)}),
    "A4_9": _Entry(
        "A_{4,9}^beta", ("beta",), "−1<β≤1",
        lambda a, b: -1 < b <= 1,
        lambda a, b: {(2, 3): _vec(1, 0, 0, 0), (1, 4): _vec(1 + b, 0, 0, 0),
                      (2, 4): _vec(0, 1, 0, 0), (3, 4): _vec(0, 0, b, 0)}),
    "A4_11": _Entry(
        "A_{4,11}^alpha", ("alpha",), "α>0",
        lambda a, b: a > 0,
        lambda a, b: {(2, 3): _vec(1, 0, 0, 0), (1, 4): _vec(2 * a, 0, 0, 0),
                      (2, 4): _vec(0, a, -1, 0), (3, 4): _vec(0, 1, a, 0)}),
    "A4_12": _Entry(
        "A_{4,12}", (), "", _always,
        lambda a, b: {(1, 3): _vec(1, 0, 0, 0), (2, 3): _vec(0, 1, 0, 0),
                      (1, 4): _vec(0, -1, 0, 0), (2, 4): _vec(1, 0, 0, 0)}),
}


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A catalog algebra with validated parameters and its structure tensor."""

    id: str
    alpha: float | None = None
    beta: float | None = None
    c: np.ndarray = field(repr=False, default=None)

    @property
    def label(self) -> str:
        return _ENTRIES[self.id].label

    @property
    def params(self) -> dict:
        out = {}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.beta is not None:
            out["beta"] = self.beta
        return out

    def same_as(self, other: "LieAlgebra") -> bool:
        return self.id == other.id and self.params == other.params

    def to_json(self) -> dict:
        return {"algebra": self.id, **self.params}

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.same_as(other)

    def __hash__(self):
        return hash((self.id, self.alpha, self.beta))


def required_params(alg_id: str) -> tuple:
    return _entry(alg_id).params


def constraint_text(alg_id: str) -> str:
    return _entry(alg_id).constraint


def _entry(alg_id: str) -> _Entry:
    try:
        return _ENTRIES[alg_id]
    except KeyError:
        raise UnsupportedAlgebra(f"unknown algebra id {alg_id!r}") from None


def make_algebra(alg_id: str, alpha: float | None = None,
                 beta: float | None = None) -> LieAlgebra:
    """Build a catalog algebra.

    Raises ParamMissing / ParamUnexpected when the supplied parameters do not
    match what the family needs, and ParamOutOfRange when they violate the
    family's admissibility constraint.
    """
    entry = _entry(alg_id)
    given = {"alpha": alpha, "beta": beta}
    for name, value in given.items():
        if name in entry.params and value is None:
            raise ParamMissing(f"{alg_id} requires {name}")
        if name not in entry.params and value is not None:
            raise ParamUnexpected(f"{alg_id} takes no {name}")
    a = None if alpha is None else float(alpha)
    b = None if beta is None else float(beta)
    for v in (a, b):
        if v is not None and not np.isfinite(v):
            raise ParamOutOfRange(f"{alg_id}: non-finite parameter")
    if not entry.admissible(a, b):
        raise ParamOutOfRange(f"{alg_id} requires {entry.constraint}; got {given}")

    c = np.zeros((4, 4, 4))
    for (i, j), v in entry.brackets(a, b).items():
        c[i - 1, j - 1] = v
        c[j - 1, i - 1] = -v
    c.flags.writeable = False
    return LieAlgebra(alg_id, a, b, c)


def from_json(doc: dict) -> LieAlgebra:
    return make_algebra(doc["algebra"], doc.get("alpha"), doc.get("beta"))


def default_algebra(alg_id: str) -> LieAlgebra:
    return make_algebra(alg_id, **DEFAULT_PARAMS.get(alg_id, {}))


def all_default_algebras() -> list:
    return [default_algebra(a) for a in ALGEBRA_IDS]


def _tensor(alg) -> np.ndarray:
    return alg.c if isinstance(alg, LieAlgebra) else np.asarray(alg, dtype=float)


def bracket(alg, u, v) -> np.ndarray:
    return np.einsum("i,j,ijk->k", np.asarray(u, float), np.asarray(v, float), _tensor(alg))


def ad(alg, u) -> np.ndarray:
    """Matrix of v -> [u, v]; column j is [u, e_j]."""
    return np.einsum("i,ijk->kj", np.asarray(u, float), _tensor(alg))


def jacobi_residual(alg) -> float:
    return _kernels.jacobi_residual(_tensor(alg))


def is_unimodular(alg, tol: float = 1e-12) -> bool:
    c = _tensor(alg)
    traces = np.einsum("ijj->i", c)
    return bool(np.all(np.abs(traces) <= tol))


# -- parameter grids ---------------------------------------------------------

_EPS = 1e-3


def parameter_grid(alg_id: str, n: int = 10) -> list:
    """Admissible parameter dicts: ``n`` evenly spaced values per parameter
    plus values ``1e-3`` away from each excluded point or boundary."""
    if alg_id in ("A3_5+A1",):
        vals = list(np.linspace(-0.95, 0.95, n)) + [-1 + _EPS, -_EPS, _EPS, 1 - _EPS]
        return [{"alpha": float(a)} for a in vals]
    if alg_id in ("A3_7+A1", "A4_11"):
        vals = list(np.linspace(0.1, 3.0, n)) + [_EPS]
        return [{"alpha": float(a)} for a in vals]
    if alg_id == "A4_2_generic":
        vals = list(np.linspace(-2.9, 3.1, n))
        vals += [x + s * _EPS for x in (0.0, 1.0, -2.0) for s in (-1, 1)]
        return [{"alpha": float(a)} for a in vals]
    if alg_id == "A4_9":
        vals = list(np.linspace(-0.9, 1.0, n)) + [-1 + _EPS, -_EPS, _EPS, 1 - _EPS]
        return [{"beta": float(b)} for b in vals]
    if alg_id == "A4_5":
        axis = np.linspace(-1.0, 1.0, n)
        pairs = [(a, b) for a in axis for b in axis if a <= b]
        pairs += [(-1 + _EPS, 0.5), (_EPS, 0.5), (-0.5, -_EPS),
                  (0.5, 1 - _EPS), (-0.7, -0.3 + _EPS)]
        entry = _ENTRIES[alg_id]
        return [{"alpha": float(a), "beta": float(b)} for a, b in pairs
                if entry.admissible(float(a), float(b))]
    if alg_id == "A4_6":
        pairs = [(a, b) for a in np.linspace(-2.9, 3.1, n) for b in np.linspace(0.0, 2.0, n)]
        pairs += [(_EPS, 0.5), (-_EPS, 0.5), (-1.0 + _EPS, 0.5), (1.0, _EPS)]
        entry = _ENTRIES[alg_id]
        return [{"alpha": float(a), "beta": float(b)} for a, b in pairs
                if entry.admissible(float(a), float(b))]
    _entry(alg_id)
    return [{}]
