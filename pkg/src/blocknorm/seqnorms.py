"""Sequence-class tags and the norms they induce on finite vector sequences.

A finite sequence stands for the infinite sequence obtained by appending
zeros; every norm here is invariant under that padding, which is what makes
the truncation sound.  Three tags are supported:

* ``Strong(p)`` -- the lp sum of the entry norms,
* ``Weak(p)``   -- the sup over the dual unit ball of the lp sum of the
  functional values,
* ``Sup``       -- the maximum entry norm (identified with the eventually-null
  class at finite truncation: they agree on zero-padded sequences).

Nested (anisotropic) norms evaluate a stack of tags, outermost first,
against a jagged array whose leaves are vector sequences.  Weak tags are
computable only in the innermost position: elsewhere the dual ball would be
the ball of a nested sequence space, which has no enumerable description.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import _search
from .spaces import Exponent, FiniteLpSpace, NormResult, Vec, as_exponent

__all__ = [
    "UnsupportedClassPosition", "ClassSpec", "Strong", "Weak", "Sup", "SUP",
    "ClassStack", "as_stack", "VecSequence", "ScalarSequence", "JaggedArray",
    "class_norm", "scalar_class_norm", "nested_norm",
]


class UnsupportedClassPosition(ValueError):
    """Raised for a weak tag anywhere but the innermost stack position."""


@dataclass(frozen=True)
class ClassSpec:
    """A sequence-class tag: strong(p), weak(p), or sup."""

    kind: str
    p: Optional[Exponent] = None

    def __post_init__(self):
        if self.kind not in ("strong", "weak", "sup"):
            raise ValueError(f"unknown class kind {self.kind!r}")
        if self.kind == "sup":
            if self.p is not None:
                raise ValueError("the sup tag takes no exponent")
            return
        p = as_exponent(self.p)
        if p.is_inf:
            raise ValueError("use the sup tag instead of p = inf")
        object.__setattr__(self, "p", p)

    @property
    def is_weak(self) -> bool:
        return self.kind == "weak"

    def __str__(self) -> str:
        return "sup" if self.kind == "sup" else f"{self.kind}({self.p})"


def Strong(p) -> ClassSpec:
    return ClassSpec("strong", p)


def Weak(p) -> ClassSpec:
    return ClassSpec("weak", p)


SUP = ClassSpec("sup")


def Sup() -> ClassSpec:
    return SUP


@dataclass(frozen=True)
class ClassStack:
    """An ordered stack of class tags, outermost first."""

    specs: tuple[ClassSpec, ...]

    def __post_init__(self):
        specs = tuple(self.specs)
        if not specs:
            raise ValueError("a class stack needs at least one tag")
        for i, spec in enumerate(specs[:-1]):
            if spec.is_weak:
                raise UnsupportedClassPosition(
                    f"weak tag at stack position {i} (only the innermost "
                    "position supports weak tags)")
        object.__setattr__(self, "specs", specs)

    @property
    def depth(self) -> int:
        return len(self.specs)

    def __iter__(self):
        return iter(self.specs)

    def __len__(self) -> int:
        return len(self.specs)

    def __getitem__(self, i):
        return self.specs[i]


StackLike = Union[ClassStack, Sequence[ClassSpec]]


def as_stack(stack: StackLike) -> ClassStack:
    if isinstance(stack, ClassStack):
        return stack
    return ClassStack(tuple(stack))


@dataclass(frozen=True, eq=False)
class VecSequence:
    """A finite sequence of vectors in one space, stored as a (k, dim) array."""

    entries: np.ndarray
    space: FiniteLpSpace

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.size == 0:
            arr = arr.reshape(0, self.space.dim)
        if arr.ndim != 2 or arr.shape[1] != self.space.dim:
            raise ValueError(
                f"entries must be (k, {self.space.dim}), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_vecs(cls, vecs: Sequence[Vec],
                  space: Optional[FiniteLpSpace] = None) -> "VecSequence":
        if not vecs:
            if space is None:
                raise ValueError("an empty sequence needs an explicit space")
            return cls(np.zeros((0, space.dim)), space)
        space = vecs[0].space
        for v in vecs:
            if v.space != space:
                raise ValueError("all entries must share one space")
        return cls(np.stack([v.coords for v in vecs]), space)

    @classmethod
    def point(cls, x: Vec, position: int) -> "VecSequence":
        """The sequence x placed at the given position, zeros elsewhere."""
        arr = np.zeros((position + 1, x.space.dim))
        arr[position] = x.coords
        return cls(arr, x.space)

    def entry(self, i: int) -> Vec:
        return Vec(self.entries[i], self.space)

    def entry_norms(self) -> np.ndarray:
        return _entry_norms(self.entries, self.space.exp)

    def __len__(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class ScalarSequence:
    """A finite sequence of reals (zero tail semantics)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.shape[0]


def _entry_norms(entries: np.ndarray, exp: Exponent) -> np.ndarray:
    if entries.shape[0] == 0:
        return np.zeros(0)
    a = np.abs(entries)
    p = exp.as_float
    if np.isinf(p):
        return a.max(axis=1)
    if p == 1.0:
        return a.sum(axis=1)
    scale = a.max(axis=1)
    safe = np.where(scale > 0, scale, 1.0)
    return scale * ((a / safe[:, None]) ** p).sum(axis=1) ** (1.0 / p)


def scalar_class_norm(spec: ClassSpec, values) -> float:
    """Class norm of a scalar sequence; always exact.

    On scalars the weak and strong norms coincide: the dual ball of R is
    [-1, 1] and the sup is attained at a sign.
    """
    vals = np.asarray(values, dtype=float).reshape(-1)
    if vals.size == 0:
        return 0.0
    if spec.kind == "sup":
        return float(np.abs(vals).max())
    return _search.lp_norm_f(vals, spec.p.as_float)


def class_norm(spec: ClassSpec, seq: VecSequence, budget: int = 8,
               seed: int = 0) -> NormResult:
    """Norm of a vector sequence under a class tag.

    Strong and sup norms are exact.  The weak norm is exact (enumeration of
    the dual ball's extreme points, valid because the objective is convex)
    whenever the dual ball is a polytope; otherwise it is a seeded ascent
    lower bound flagged inexact, with the best functional as witness.
    """
    norms = seq.entry_norms()
    if spec.kind == "strong":
        return NormResult(_search.lp_norm_f(norms, spec.p.as_float), True)
    if spec.kind == "sup":
        value = float(norms.max()) if len(seq) else 0.0
        return NormResult(value, True)
    # weak
    if len(seq) == 0 or not norms.any():
        return NormResult(0.0, True)
    p = spec.p.as_float
    dual_pts = _search.extreme_points_array(
        seq.space.dim, seq.space.exp.dual().as_float)
    if dual_pts is not None:
        vals = seq.entries @ dual_pts.T            # (k, N) functional values
        per_phi = _lp_columns(vals, p)
        i = int(np.argmax(per_phi))
        return NormResult(float(per_phi[i]), True,
                          Vec(dual_pts[i], seq.space.dual))
    value, phi = _search.weak_ascent(
        seq.entries, seq.space.exp.as_float, p, budget, seed)
    return NormResult(value, False, Vec(phi, seq.space.dual))


def _lp_columns(vals: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(vals)
    if p == 1.0:
        return a.sum(axis=0)
    scale = a.max(axis=0)
    safe = np.where(scale > 0, scale, 1.0)
    return scale * ((a / safe[None, :]) ** p).sum(axis=0) ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class JaggedArray:
    """A depth-d tree: levels below d are lists, depth-d nodes are VecSequence
    leaves, all sharing one space.  Leaves may be empty (empty fibers)."""

    root: object
    depth: int
    space: FiniteLpSpace

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        self._check(self.root, 1)

    def _check(self, node, level):
        if level == self.depth:
            if not isinstance(node, VecSequence):
                raise ValueError(f"expected a VecSequence leaf at depth {level}")
            if node.space != self.space:
                raise ValueError("all leaves must live in one space")
            return
        if not isinstance(node, (list, tuple)):
            raise ValueError(f"expected a list of children at depth {level}")
        for child in node:
            self._check(child, level + 1)

    def leaves(self) -> Iterable[VecSequence]:
        def walk(node, level):
            if level == self.depth:
                yield node
            else:
                for child in node:
                    yield from walk(child, level + 1)
        return walk(self.root, 1)


def nested_norm(stack: StackLike, arr: JaggedArray, budget: int = 8,
                seed: int = 0) -> NormResult:
    """Iterated class norm of a jagged array, outermost tag first.

    The innermost tag sees the leaf vector sequences; every outer tag sees
    the scalar sequence of its children's values.  Empty leaves contribute 0
    (they stand for the zero sequence).  Exactness is the conjunction over
    all leaf evaluations.
    """
    stack = as_stack(stack)
    if stack.depth != arr.depth:
        raise ValueError(
            f"stack depth {stack.depth} does not match array depth {arr.depth}")
    exact = True

    def rec(node, level) -> float:
        nonlocal exact
        spec = stack[level - 1]
        if level == stack.depth:
            res = class_norm(spec, node, budget=budget, seed=seed)
            exact = exact and res.exact
            return res.value
        vals = [rec(child, level + 1) for child in node]
        if spec.kind == "sup":
            return max(vals, default=0.0)
        return _search.lp_norm_f(np.asarray(vals), spec.p.as_float)

    return NormResult(rec(arr.root, 1), exact)
