"""Numpy reference implementation of the dense block-value kernel.

The kernel evaluates, in one shot, the nested norm of the block image of an
operator at one vector sequence per slot, for stacks of strong/sup tags:

1. contract the coefficient tensor with every sequence matrix, giving the
   grid of operator values over all index combinations;
2. take the codomain norm of each value;
3. reduce the innermost axis under the block-membership mask (an excluded
   index contributes nothing; a fully masked fiber gives 0), then reduce the
   outer axes over their full ranges.

``blocknorm.kernels._fastkern`` implements the same contract as fused C
loops for arities 2 and 3; this module is the always-available fallback and
the semantic reference the extension is tested against.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

STRONG = 0
SUP = 1

_LOWER = "abcdefghijklmnop"
_UPPER = "ABCDEFGHIJKLMNOP"


def grid_norms(tensor: np.ndarray, seq_mats: Sequence[np.ndarray],
               f_p: float) -> np.ndarray:
    """Codomain norms of the operator values over the full grid: (k_1,..,k_n)."""
    n = len(seq_mats)
    shape = tuple(int(s.shape[0]) for s in seq_mats)
    if any(k == 0 for k in shape):
        return np.zeros(shape)
    t_sub = _LOWER[:n] + "z"
    seq_subs = [f"{_UPPER[i]}{_LOWER[i]}" for i in range(n)]
    vals = np.einsum(
        ",".join(seq_subs + [t_sub]) + "->" + _UPPER[:n] + "z",
        *[np.asarray(s, dtype=float) for s in seq_mats],
        np.asarray(tensor, dtype=float), optimize=True)
    a = np.abs(vals)
    if math.isinf(f_p):
        return a.max(axis=-1)
    if f_p == 1.0:
        return a.sum(axis=-1)
    return (a ** f_p).sum(axis=-1) ** (1.0 / f_p)


def nested_reduce(norms: np.ndarray, mask: Optional[np.ndarray],
                  kinds: Sequence[int], qs: Sequence[float]) -> float:
    """Iterated reduction, innermost axis masked, outer axes over full ranges."""
    a = np.where(mask, norms, 0.0) if mask is not None else np.asarray(norms, float)
    for i in range(len(kinds) - 1, -1, -1):
        if kinds[i] == SUP:
            a = a.max(axis=-1, initial=0.0)
        else:
            q = qs[i]
            a = (a ** q).sum(axis=-1) ** (1.0 / q)
    return float(a)


def block_value_dense(tensor: np.ndarray, seq_mats: Sequence[np.ndarray],
                      mask: Optional[np.ndarray], kinds: Sequence[int],
                      qs: Sequence[float], f_p: float) -> float:
    if any(s.shape[0] == 0 for s in seq_mats):
        return 0.0
    return nested_reduce(grid_norms(tensor, seq_mats, f_p), mask, kinds, qs)
