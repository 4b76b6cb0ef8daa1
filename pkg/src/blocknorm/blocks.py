"""Finite index blocks: nonvoid subsets of a product grid with fiber queries.

A block of arity n is a set of n-tuples inside the box
``[0, k_1) x .. x [0, k_n)``.  Its fibers are the sets of last indices that
complete a fixed prefix to a member; running the last index over the fiber
and the prefix over the full grid enumerates every member exactly once.
Indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = ["NonvoidViolation", "Block", "make_block"]


class NonvoidViolation(ValueError):
    """A block must contain at least one tuple."""


@dataclass(frozen=True)
class Block:
    """An explicit, sorted set of index tuples within fixed bounds."""

    arity: int
    bounds: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]
    kind: str = "explicit"

    def __post_init__(self):
        bounds = tuple(int(b) for b in self.bounds)
        if len(bounds) != self.arity:
            raise ValueError("bounds length must equal the arity")
        if any(b < 1 for b in bounds):
            raise ValueError("bounds must be positive")
        members = sorted({tuple(int(j) for j in t) for t in self.members})
        if not members:
            raise NonvoidViolation("a block must be nonvoid")
        for t in members:
            if len(t) != self.arity:
                raise ValueError(f"member {t} has wrong arity")
            if any(j < 0 or j >= b for j, b in zip(t, bounds)):
                raise ValueError(f"member {t} out of bounds {bounds}")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "members", tuple(members))

    @cached_property
    def _fibers(self) -> dict:
        fibers: dict = {}
        for t in self.members:
            fibers.setdefault(t[:-1], []).append(t[-1])
        return {k: tuple(v) for k, v in fibers.items()}

    def fiber(self, prefix: Sequence[int]) -> tuple[int, ...]:
        """Sorted last indices completing the prefix to a member; may be empty."""
        prefix = tuple(int(j) for j in prefix)
        if len(prefix) != self.arity - 1:
            raise ValueError(
                f"prefix length must be {self.arity - 1}, got {len(prefix)}")
        for j, b in zip(prefix, self.bounds):
            if j < 0 or j >= b:
                raise ValueError(f"prefix {prefix} out of bounds {self.bounds}")
        return self._fibers.get(prefix, ())

    @cached_property
    def mask_array(self) -> np.ndarray:
        """Read-only uint8 membership mask over the full bounds box."""
        mask = np.zeros(self.bounds, dtype=np.uint8)
        for t in self.members:
            mask[t] = 1
        mask.setflags(write=False)
        return mask

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, t) -> bool:
        return tuple(t) in self._member_set

    @cached_property
    def _member_set(self) -> frozenset:
        return frozenset(self.members)


def make_block(kind: str, bounds: Sequence[int], *,
               pair: Optional[tuple[int, int]] = None,
               members: Optional[Iterable[Sequence[int]]] = None) -> Block:
    """Construct a canonical block.

    * ``diagonal`` -- the tuples (j, .., j) for j < min(bounds);
    * ``full``     -- the whole box;
    * ``equality`` -- the tuples whose slots ``pair=(i, j)`` agree (0-based);
    * ``explicit`` -- the caller-supplied member set.
    """
    bounds = tuple(int(b) for b in bounds)
    n = len(bounds)
    if kind == "diagonal":
        mem = [tuple([j] * n) for j in range(min(bounds))]
    elif kind == "full":
        mem = list(itertools.product(*(range(b) for b in bounds)))
    elif kind == "equality":
        if pair is None:
            raise ValueError("the equality kind needs pair=(i, j)")
        i, j = pair
        if not (0 <= i < n and 0 <= j < n and i != j):
            raise ValueError(f"invalid equality pair {pair} for arity {n}")
        mem = [t for t in itertools.product(*(range(b) for b in bounds))
               if t[i] == t[j]]
    elif kind == "explicit":
        if members is None:
            raise ValueError("the explicit kind needs members")
        mem = [tuple(t) for t in members]
    else:
        raise ValueError(f"unknown block kind {kind!r}")
    if not mem:
        raise NonvoidViolation(f"block kind {kind!r} with bounds {bounds} is empty")
    return Block(n, bounds, tuple(mem), kind)
