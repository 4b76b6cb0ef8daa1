"""Seeded random instance generators used by the CLI and the test suites.

All generators draw from ``numpy.random.default_rng(seed)`` sequentially, so
a fixed seed reproduces the exact instances.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .multilinear import MultiOperator
from .seqnorms import ClassSpec, ScalarSequence, VecSequence, scalar_class_norm
from .spaces import FiniteLpSpace, LinearMap, Vec, lp_norm

__all__ = [
    "random_operator", "random_linear_map", "random_unit_vectors",
    "random_vec_sequences", "random_scalar_sequences",
]


def random_operator(domains: Sequence[FiniteLpSpace], codomain: FiniteLpSpace,
                    seed: int, scale: float = 1.0) -> MultiOperator:
    rng = np.random.default_rng(seed)
    shape = tuple(d.dim for d in domains) + (codomain.dim,)
    return MultiOperator(scale * rng.standard_normal(shape), tuple(domains),
                         codomain)


def random_linear_map(domain: FiniteLpSpace, codomain: FiniteLpSpace,
                      seed: int, scale: float = 1.0) -> LinearMap:
    rng = np.random.default_rng(seed)
    return LinearMap(scale * rng.standard_normal((codomain.dim, domain.dim)),
                     domain, codomain)


def random_unit_vectors(spaces: Sequence[FiniteLpSpace], count: int,
                        seed: int) -> list[tuple[Vec, ...]]:
    """Tuples of one unit-norm vector per space."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        tup = []
        for sp in spaces:
            v = rng.standard_normal(sp.dim)
            nrm = lp_norm(v, sp.exp)
            tup.append(Vec(v / nrm if nrm > 0 else v, sp))
        out.append(tuple(tup))
    return out


def random_vec_sequences(spaces: Sequence[FiniteLpSpace],
                         lengths: Sequence[int], count: int,
                         seed: int, scale: float = 1.0
                         ) -> list[tuple[VecSequence, ...]]:
    """Tuples of Gaussian vector sequences, one per space."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        tup = tuple(
            VecSequence(scale * rng.standard_normal((lengths[k], sp.dim)), sp)
            for k, sp in enumerate(spaces))
        out.append(tup)
    return out


def random_scalar_sequences(xspecs: Sequence[ClassSpec], length: int,
                            count: int, seed: int, normalize: bool = True
                            ) -> list[tuple[ScalarSequence, ...]]:
    """Tuples of scalar sequences, unit-normalized in their classes."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        tup = []
        for spec in xspecs:
            vals = rng.standard_normal(length)
            if normalize:
                nrm = scalar_class_norm(spec, vals)
                if nrm > 0:
                    vals = vals / nrm
            tup.append(ScalarSequence(vals))
        out.append(tuple(tup))
    return out
