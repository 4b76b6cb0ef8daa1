"""Seeded search utilities shared by the norm estimators.

Everything here operates on raw float64 arrays and float exponents
(``math.inf`` for the sup case).  All stochastic routines are deterministic
for a fixed seed: each restart draws from a generator keyed by
``(seed, *tags)`` through `numpy.random.SeedSequence`, so the value of a
candidate never depends on how many candidates come after it.  That is what
makes the estimators' best-so-far values nondecreasing in budget.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

import numpy as np

# spawn-key tags for deriving independent generator streams
TAG_SUPNORM = 1
TAG_WEAK = 2
TAG_RESTART = 3
TAG_NORMALIZE = 4
TAG_SAMPLING = 5

# largest extreme-point grid evaluated in a single einsum batch
_ENUM_CAP = 500_000

_ASCENT_ITERS = 60
_WEAK_ITERS = 50

_LOWER = "abcdefghijklmnopqrstuvwx"
_UPPER = "ABCDEFGHIJKLMNOPQRSTUVWX"


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Generator keyed by (seed, key); independent streams for distinct keys."""
    entropy = int(seed) & (2**64 - 1)
    return np.random.default_rng(
        np.random.SeedSequence(entropy, spawn_key=tuple(int(k) for k in key))
    )


def dual_float(p: float) -> float:
    """Conjugate exponent as a float; 1 and inf swap."""
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def lp_norm_f(values, p: float) -> float:
    """lp norm of a flat array, overflow-safe; the empty array has norm 0."""
    a = np.abs(np.asarray(values, dtype=float)).ravel()
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    if p == 1.0:
        return float(a.sum())
    m = float(a.max())
    if m == 0.0:
        return 0.0
    return m * float(((a / m) ** p).sum() ** (1.0 / p))


def lp_align(c, p: float) -> tuple[np.ndarray, float]:
    """Maximizer of <c, x> over the closed unit lp ball, with the value.

    The value equals the dual norm of ``c``.  For ``c = 0`` the zero vector
    is returned (any feasible point attains the sup).
    """
    c = np.asarray(c, dtype=float)
    a = np.abs(c)
    if not a.any():
        return np.zeros_like(c), 0.0
    if p == 1.0:
        i = int(np.argmax(a))
        x = np.zeros_like(c)
        x[i] = math.copysign(1.0, c[i])
        return x, float(a[i])
    if math.isinf(p):
        return np.sign(c), float(a.sum())
    q = dual_float(p)
    nq = lp_norm_f(a, q)
    x = np.sign(c) * (a / nq) ** (q - 1.0)
    return x, nq


def extreme_points_array(dim: int, p: float) -> Optional[np.ndarray]:
    """Extreme points of the unit lp ball as rows, or None for curved balls.

    One-dimensional balls are the segment [-1, 1] for every exponent, so
    dim == 1 is always enumerable.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if p == 1.0:
        eye = np.eye(dim)
        return np.concatenate([eye, -eye])
    if math.isinf(p):
        return np.array(list(itertools.product((1.0, -1.0), repeat=dim)))
    return None


def contract_all(tensor: np.ndarray, xs: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate the operator tensor at one vector per slot; returns a codomain vector."""
    v = np.asarray(tensor, dtype=float)
    for x in xs:
        v = np.tensordot(np.asarray(x, dtype=float), v, axes=(0, 0))
    return v


def slot_functional(tensor: np.ndarray, xs: Sequence[np.ndarray], k: int,
                    psi: np.ndarray) -> np.ndarray:
    """Coefficients of x_k -> psi(T(x_1,..,x_k,..,x_n)) with the other slots fixed."""
    w = np.tensordot(tensor, psi, axes=(tensor.ndim - 1, 0))
    pos = 0
    for i, x in enumerate(xs):
        if i == k:
            pos = 1
            continue
        w = np.tensordot(x, w, axes=(0, pos))
    return w


def batch_values(tensor: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Operator values at every row combination: shape (N_1,..,N_n, m_F)."""
    n = len(mats)
    t_sub = _LOWER[:n] + "z"
    seq_subs = [f"{_UPPER[i]}{_LOWER[i]}" for i in range(n)]
    out = _UPPER[:n] + "z"
    return np.einsum(
        ",".join(seq_subs + [t_sub]) + "->" + out, *mats, tensor, optimize=True
    )


def sup_norm_arrays(tensor, domain_ps: Sequence[float], f_p: float,
                    budget: int, seed: int) -> tuple[float, list[np.ndarray], bool]:
    """Sup of the codomain norm of T over the product of unit balls.

    Exact (extreme-point enumeration) when every domain ball is a polytope,
    since the objective is convex in each slot; otherwise a seeded
    alternating-ascent lower bound, flagged inexact.  Returns
    ``(value, witness_vectors, exact)``.
    """
    tensor = np.asarray(tensor, dtype=float)
    n = tensor.ndim - 1
    dims = tensor.shape[:n]
    exts = [extreme_points_array(dims[k], domain_ps[k]) for k in range(n)]
    if all(e is not None for e in exts):
        value, xs = _enumerate_sup(tensor, exts, f_p)
        return value, xs, True
    value, xs = _ascend_sup(tensor, list(domain_ps), f_p, budget, seed)
    return value, xs, False


def _enumerate_sup(tensor, exts, f_p):
    total = 1
    for e in exts:
        total *= e.shape[0]
    if total > _ENUM_CAP:
        # peel the first slot to keep batches bounded
        best_val, best_xs = -1.0, None
        for row in exts[0]:
            sub = np.tensordot(row, tensor, axes=(0, 0))
            val, xs = _enumerate_sup(sub, exts[1:], f_p)
            if val > best_val:
                best_val, best_xs = val, [row] + xs
        return best_val, best_xs
    vals = batch_values(tensor, exts)
    if math.isinf(f_p):
        norms = np.abs(vals).max(axis=-1)
    elif f_p == 1.0:
        norms = np.abs(vals).sum(axis=-1)
    else:
        norms = (np.abs(vals) ** f_p).sum(axis=-1) ** (1.0 / f_p)
    idx = np.unravel_index(int(np.argmax(norms)), norms.shape)
    xs = [exts[k][idx[k]].copy() for k in range(len(exts))]
    # recompute at the witness so value and witness agree bit-for-bit
    value = lp_norm_f(contract_all(tensor, xs), f_p)
    return value, xs


def _start_vectors(tensor, ps, r, seed):
    n = tensor.ndim - 1
    dims = tensor.shape[:n]
    if r == 0:
        raw = [np.ones(d) for d in dims]
    elif r == 1:
        raw = [np.eye(d)[0] for d in dims]
    else:
        rng = rng_for(seed, TAG_SUPNORM, r)
        raw = [rng.standard_normal(d) for d in dims]
    xs = []
    for x, p in zip(raw, ps):
        nrm = lp_norm_f(x, p)
        xs.append(x / nrm if nrm > 0 else x)
    return xs


def _ascend_sup(tensor, ps, f_p, budget, seed):
    n = tensor.ndim - 1
    f_dual = dual_float(f_p)
    best_val = 0.0
    best_xs = [np.zeros(d) for d in tensor.shape[:n]]
    for r in range(2 + max(0, int(budget))):
        xs = _start_vectors(tensor, ps, r, seed)
        val = lp_norm_f(contract_all(tensor, xs), f_p)
        for _ in range(_ASCENT_ITERS):
            y = contract_all(tensor, xs)
            psi, ny = lp_align(y, f_dual)
            if ny == 0.0:
                break
            for k in range(n):
                c = slot_functional(tensor, xs, k, psi)
                xk, cv = lp_align(c, ps[k])
                if cv > 0.0:
                    xs[k] = xk
            new_val = lp_norm_f(contract_all(tensor, xs), f_p)
            if new_val <= val + 1e-14 * max(1.0, val):
                val = max(val, new_val)
                break
            val = new_val
        if val > best_val:
            best_val, best_xs = val, [x.copy() for x in xs]
    return best_val, best_xs


def weak_ascent(entries: np.ndarray, space_p: float, class_p: float,
                budget: int, seed: int) -> tuple[float, np.ndarray]:
    """Lower bound for the weak class norm by conditional-gradient ascent.

    Maximizes ``(sum_j |<x_j, phi>|^p)^(1/p)`` over the dual unit ball.  The
    objective is convex, so each step (align to the gradient) is monotone.
    """
    q = dual_float(space_p)
    k = entries.shape[0]
    row_norms = np.array([lp_norm_f(row, space_p) for row in entries])
    starts = [lp_align(entries[int(np.argmax(row_norms))], q)[0]]
    for r in range(max(0, int(budget))):
        g = rng_for(seed, TAG_WEAK, r).standard_normal(entries.shape[1])
        nrm = lp_norm_f(g, q)
        starts.append(g / nrm if nrm > 0 else g)
    best_val, best_phi = 0.0, np.zeros(entries.shape[1])
    for phi in starts:
        val = lp_norm_f(entries @ phi, class_p)
        for _ in range(_WEAK_ITERS):
            u = entries @ phi
            if class_p == 1.0:
                gu = np.sign(u)
            else:
                gu = np.sign(u) * np.abs(u) ** (class_p - 1.0)
            grad = entries.T @ gu
            phi_new, gv = lp_align(grad, q)
            if gv == 0.0:
                break
            new_val = lp_norm_f(entries @ phi_new, class_p)
            if new_val <= val + 1e-14 * max(1.0, val):
                val = max(val, new_val)
                break
            phi, val = phi_new, new_val
        if val > best_val:
            best_val, best_phi = val, phi.copy()
    return best_val, best_phi
