"""Kernel backend selection, fixed at import time.

The compiled extension (``blocknorm.kernels._fastkern``) is used when it was
built and the arity is covered; the numpy reference implementation is the
fallback.  Set ``BLOCKNORM_BACKEND=python`` to force the reference backend
(useful for benchmarking) or ``BLOCKNORM_BACKEND=compiled`` to fail loudly
when the extension is missing.
"""

from __future__ import annotations

import math
import os
from typing import Optional, Sequence

import numpy as np

from . import reference
from .reference import STRONG, SUP

try:
    from . import _fastkern
except ImportError:
    _fastkern = None

_choice = os.environ.get("BLOCKNORM_BACKEND", "auto").lower()
if _choice in ("", "auto"):
    _use_compiled = _fastkern is not None
elif _choice in ("compiled", "c", "fast"):
    if _fastkern is None:
        raise ImportError(
            "BLOCKNORM_BACKEND=compiled but blocknorm.kernels._fastkern "
            "was not built")
    _use_compiled = True
elif _choice in ("python", "py", "reference"):
    _use_compiled = False
else:
    raise ValueError(f"unrecognized BLOCKNORM_BACKEND={_choice!r}")

BACKEND = "compiled" if _use_compiled else "python"


def compiled_available() -> bool:
    return _fastkern is not None


def block_value_dense(tensor: np.ndarray, seq_mats: Sequence[np.ndarray],
                      mask: Optional[np.ndarray], kinds: Sequence[int],
                      qs: Sequence[float], f_p: float) -> float:
    """Nested norm of the masked value grid; see kernels.reference for semantics."""
    n = len(seq_mats)
    if _use_compiled and n in (2, 3):
        return _compiled_call(tensor, seq_mats, mask, kinds, qs, f_p)
    return reference.block_value_dense(tensor, seq_mats, mask, kinds, qs, f_p)


def _compiled_call(tensor, seq_mats, mask, kinds, qs, f_p):
    n = len(seq_mats)
    shape = tuple(int(s.shape[0]) for s in seq_mats)
    if any(k == 0 for k in shape):
        return 0.0
    t = np.ascontiguousarray(tensor, dtype=float)
    mats = [np.ascontiguousarray(s, dtype=float) for s in seq_mats]
    if mask is None:
        m = np.ones(shape, dtype=np.uint8)
    else:
        m = np.ascontiguousarray(mask, dtype=np.uint8)
    f_inf = math.isinf(f_p)
    fp = 1.0 if f_inf else float(f_p)
    if n == 2:
        return _fastkern.block_value_2(
            t, mats[0], mats[1], m,
            int(kinds[0]), float(qs[0]), int(kinds[1]), float(qs[1]), fp, f_inf)
    return _fastkern.block_value_3(
        t, mats[0], mats[1], mats[2], m,
        int(kinds[0]), float(qs[0]), int(kinds[1]), float(qs[1]),
        int(kinds[2]), float(qs[2]), fp, f_inf)
