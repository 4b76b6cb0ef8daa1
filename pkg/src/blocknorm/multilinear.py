"""Dense n-linear operators between finite lp spaces.

An operator is stored as its full coefficient tensor, slot indices first and
the codomain index last, so multilinearity holds by construction.  Dense
storage is adequate at desk scale (a handful of dimensions per slot, arity
up to four) and keeps the contraction code simple.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from . import _search
from .spaces import FiniteLpSpace, LinearMap, NormResult, Vec

__all__ = ["MultiOperator", "apply", "finite_type", "compose", "sup_norm"]

_LOWER = "abcdefghijklmnop"
_UPPER = "ABCDEFGHIJKLMNOP"


@dataclass(frozen=True, eq=False)
class MultiOperator:
    """A continuous n-linear operator E_1 x .. x E_n -> F."""

    tensor: np.ndarray
    domains: tuple[FiniteLpSpace, ...]
    codomain: FiniteLpSpace

    def __post_init__(self):
        domains = tuple(self.domains)
        arr = np.array(self.tensor, dtype=float)
        expected = tuple(d.dim for d in domains) + (self.codomain.dim,)
        if arr.shape != expected:
            raise ValueError(
                f"tensor shape {arr.shape} does not match spaces {expected}")
        arr.setflags(write=False)
        object.__setattr__(self, "tensor", arr)
        object.__setattr__(self, "domains", domains)

    @property
    def arity(self) -> int:
        return len(self.domains)

    def __call__(self, *xs: Vec) -> Vec:
        return apply(self, *xs)

    def scaled(self, lam: float) -> "MultiOperator":
        return MultiOperator(lam * self.tensor, self.domains, self.codomain)


def apply(T: MultiOperator, *xs: Vec) -> Vec:
    """Evaluate T at one vector per slot."""
    if len(xs) != T.arity:
        raise ValueError(f"expected {T.arity} arguments, got {len(xs)}")
    for x, dom in zip(xs, T.domains):
        if x.space != dom:
            raise ValueError(f"argument in {x.space} does not match slot {dom}")
    out = _search.contract_all(T.tensor, [x.coords for x in xs])
    return Vec(out, T.codomain)


def finite_type(phis: Sequence[Vec], b: Vec) -> MultiOperator:
    """The rank-one operator (x_1,..,x_n) -> phi_1(x_1) .. phi_n(x_n) b.

    Each functional is given by its coefficient vector in the slot's space;
    its norm as a functional is the dual-exponent norm of those coefficients.
    """
    if not phis:
        raise ValueError("at least one functional is required")
    arrs = [phi.coords for phi in phis]
    tensor = reduce(np.multiply.outer, arrs[1:], arrs[0])
    tensor = np.multiply.outer(tensor, b.coords)
    return MultiOperator(tensor, tuple(phi.space for phi in phis), b.space)


def compose(v: LinearMap, T: MultiOperator,
            us: Sequence[LinearMap]) -> MultiOperator:
    """The operator v o T o (u_1,..,u_n), acting on the u domains."""
    if len(us) != T.arity:
        raise ValueError(f"expected {T.arity} inner maps, got {len(us)}")
    for k, u in enumerate(us):
        if u.codomain != T.domains[k]:
            raise ValueError(f"inner map {k} does not land in slot {k}")
    if v.domain != T.codomain:
        raise ValueError("outer map does not start at the codomain")
    n = T.arity
    t_sub = _LOWER[:n] + "y"
    u_subs = [f"{_LOWER[k]}{_UPPER[k]}" for k in range(n)]
    out = _UPPER[:n] + "z"
    tensor = np.einsum(
        ",".join([t_sub] + u_subs + ["zy"]) + "->" + out,
        T.tensor, *[u.matrix for u in us], v.matrix, optimize=True)
    return MultiOperator(tensor, tuple(u.domain for u in us), v.codomain)


def sup_norm(T: MultiOperator, budget: int = 8, seed: int = 0) -> NormResult:
    """Sup of the codomain norm of T over the product of closed unit balls.

    Exact by extreme-point enumeration when every domain ball is a polytope
    (exponent 1 or inf, or dimension 1): T is linear in each slot, so the
    sup is attained at extreme points.  Otherwise a seeded alternating
    ascent (each slot update is a closed-form linear maximization over an lp
    ball via the dual-alignment vector), flagged inexact.  The witness is a
    tuple of unit vectors attaining the returned value.
    """
    value, xs, exact = _search.sup_norm_arrays(
        T.tensor, [d.exp.as_float for d in T.domains],
        T.codomain.exp.as_float, budget, seed)
    witness = tuple(Vec(x, d) for x, d in zip(xs, T.domains))
    return NormResult(value, exact, witness)
