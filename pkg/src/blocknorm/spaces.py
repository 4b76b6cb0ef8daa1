"""Finite-dimensional real lp spaces: exponents, vectors, duals, linear maps.

Exponents are exact rationals so that conjugation (1/p + 1/p' = 1) is a true
involution; infinity is a tagged value, never a float sentinel.  Norm
computations convert to float64.  Every object is immutable after
construction and every operation is a pure function, so concurrent use is
safe; the stochastic ones take an explicit seed and are deterministic for a
fixed seed and budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import _search

__all__ = [
    "Exponent", "INF", "ExponentLike", "as_exponent", "dual_exponent",
    "FiniteLpSpace", "Vec", "LinearMap", "NormResult", "lp_norm", "vec_norm",
    "unit_ball_extreme_points", "dual_ball_extreme_points", "linear_map_norm",
]

_INF_TOKENS = {"inf", "infinity", "oo"}


@dataclass(frozen=True)
class Exponent:
    """Extended-real exponent in [1, inf]; ``value is None`` encodes infinity."""

    value: Optional[Fraction]

    def __post_init__(self):
        v = self.value
        if isinstance(v, Exponent):
            v = v.value
        if isinstance(v, str):
            if v.lower() not in _INF_TOKENS:
                raise ValueError(f"unrecognized exponent token {v!r}")
            v = None
        elif isinstance(v, float) and math.isinf(v):
            v = None
        if v is not None and not isinstance(v, Fraction):
            v = Fraction(v)
        if v is not None and v < 1:
            raise ValueError(f"exponent must satisfy p >= 1, got {v}")
        object.__setattr__(self, "value", v)

    @classmethod
    def inf(cls) -> "Exponent":
        return cls(None)

    @property
    def is_inf(self) -> bool:
        return self.value is None

    @property
    def as_float(self) -> float:
        return math.inf if self.value is None else float(self.value)

    def dual(self) -> "Exponent":
        """Conjugate exponent p' with 1/p + 1/p' = 1; 1 and inf swap."""
        if self.value is None:
            return Exponent(Fraction(1))
        if self.value == 1:
            return Exponent(None)
        return Exponent(self.value / (self.value - 1))

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


INF = Exponent(None)

ExponentLike = Union[Exponent, int, float, str, Fraction]


def as_exponent(p: ExponentLike) -> Exponent:
    return p if isinstance(p, Exponent) else Exponent(p)


def dual_exponent(p: ExponentLike) -> Exponent:
    """The conjugate of p; an involution on [1, inf]."""
    return as_exponent(p).dual()


@dataclass(frozen=True)
class FiniteLpSpace:
    """R^dim with the lp norm for the given exponent."""

    dim: int
    exp: Exponent

    def __post_init__(self):
        object.__setattr__(self, "dim", int(self.dim))
        if self.dim < 1:
            raise ValueError("space dimension must be positive")
        if not isinstance(self.exp, Exponent):
            object.__setattr__(self, "exp", as_exponent(self.exp))

    @property
    def dual(self) -> "FiniteLpSpace":
        return FiniteLpSpace(self.dim, self.exp.dual())

    def vec(self, coords) -> "Vec":
        return Vec(coords, self)

    def zero(self) -> "Vec":
        return Vec(np.zeros(self.dim), self)

    def basis_vector(self, i: int) -> "Vec":
        coords = np.zeros(self.dim)
        coords[i] = 1.0
        return Vec(coords, self)

    def __str__(self) -> str:
        return f"l_{self.exp}^{self.dim}"


@dataclass(frozen=True, eq=False)
class Vec:
    """An element of a FiniteLpSpace; coordinates are read-only float64."""

    coords: np.ndarray
    space: FiniteLpSpace

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float).reshape(-1)
        if arr.shape != (self.space.dim,):
            raise ValueError(
                f"expected {self.space.dim} coordinates, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def norm(self) -> float:
        return vec_norm(self)

    def scaled(self, lam: float) -> "Vec":
        return Vec(lam * self.coords, self.space)

    def __len__(self) -> int:
        return self.space.dim

    def __repr__(self) -> str:
        return f"Vec({self.coords.tolist()}, {self.space})"


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A linear map between lp spaces, stored as a (codomain x domain) matrix."""

    matrix: np.ndarray
    domain: FiniteLpSpace
    codomain: FiniteLpSpace

    def __post_init__(self):
        arr = np.array(self.matrix, dtype=float)
        if arr.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(
                f"matrix shape {arr.shape} does not match spaces "
                f"({self.codomain.dim} x {self.domain.dim})")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @classmethod
    def identity(cls, space: FiniteLpSpace) -> "LinearMap":
        return cls(np.eye(space.dim), space, space)

    def __call__(self, x: Vec) -> Vec:
        if x.space != self.domain:
            raise ValueError("vector does not live in the map's domain")
        return Vec(self.matrix @ x.coords, self.codomain)

    def apply_rows(self, entries: np.ndarray) -> np.ndarray:
        """Apply to every row of a (k, domain.dim) array."""
        return np.asarray(entries, dtype=float) @ self.matrix.T


@dataclass(frozen=True)
class NormResult:
    """A computed norm value, whether it is exact, and an attaining witness."""

    value: float
    exact: bool
    witness: object = None


def lp_norm(values, p: ExponentLike) -> float:
    """lp norm of a flat array of reals; max modulus for p = inf."""
    return _search.lp_norm_f(values, as_exponent(p).as_float)


def vec_norm(x: Vec) -> float:
    """The norm of x in its own space."""
    return _search.lp_norm_f(x.coords, x.space.exp.as_float)


def unit_ball_extreme_points(space: FiniteLpSpace) -> Optional[list[Vec]]:
    """Extreme points of the closed unit ball, or None when not enumerable.

    Enumerable cases: p = 1 (the 2m cross-polytope vertices), p = inf (the
    2^m sign vectors), and dim = 1 for every p (the segment [-1, 1]).
    None is a value meaning "use continuous optimization", not a failure.
    """
    pts = _search.extreme_points_array(space.dim, space.exp.as_float)
    if pts is None:
        return None
    return [Vec(row, space) for row in pts]


def dual_ball_extreme_points(space: FiniteLpSpace) -> Optional[list[Vec]]:
    """Extreme points of the dual unit ball (vectors in the dual space), or None."""
    return unit_ball_extreme_points(space.dual)


def linear_map_norm(u: LinearMap, budget: int = 8, seed: int = 0) -> NormResult:
    """Operator norm of u.

    Exact via extreme-point enumeration when the domain ball is a polytope
    (p in {1, inf}, or dim 1); otherwise a seeded random-restart ascent lower
    bound, flagged inexact.  The witness is a unit vector attaining the
    returned value.
    """
    tensor = np.ascontiguousarray(u.matrix.T)
    value, xs, exact = _search.sup_norm_arrays(
        tensor, [u.domain.exp.as_float], u.codomain.exp.as_float, budget, seed)
    return NormResult(value, exact, Vec(xs[0], u.domain))
