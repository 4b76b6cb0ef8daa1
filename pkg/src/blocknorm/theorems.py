"""Executable property checks for the summing-class identities and
inequalities.

Each check re-runs, at concrete sampled inputs, the pointwise computation
behind the corresponding statement: identities (diagonal, multiple,
partition, curry consistency) are arithmetic re-derivations expected to hold
to float precision; inequalities are asserted exactly at the pointwise level
where they hold, never by comparing two stochastic estimates against each
other.  Relative slacks are scaled by ``max(1, |reference|)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from . import _sampling, _search
from .blocks import Block, make_block
from .multilinear import MultiOperator, apply, compose, finite_type, sup_norm
from .seqnorms import (SUP, ClassSpec, ClassStack, ScalarSequence, StackLike,
                       Strong, VecSequence, as_stack, class_norm,
                       scalar_class_norm)
from .spaces import LinearMap, Vec, lp_norm, linear_map_norm, vec_norm
from .summing import (SCALAR_SPACE, CompatReport, block_image, block_value,
                      check_compatibility, multiplication_operator,
                      summing_norm)

__all__ = [
    "CheckReport", "CoincidenceConstants", "check_norm_domination",
    "check_ideal_inequality", "check_finite_type_norm",
    "check_diagonal_reduction", "check_multiple_formula",
    "check_partition_formula", "check_coincidence",
    "find_incompatibility_witness",
]

TOL_IDENTITY = 1e-12
TOL_CHAIN = 1e-9

_SUPNORM_BUDGET = 8


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one property check over its sampled instances."""

    name: str
    instances: int
    passed: bool
    worst_slack: float
    witness: Any = None
    note: str = ""
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CoincidenceConstants:
    """Caller-asserted norm constants for a coincidence regime."""

    c1: float
    c2: float

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("coincidence constants must be positive")


def _rel(diff: float, scale: float) -> float:
    return abs(diff) / max(1.0, abs(scale))


def check_norm_domination(T: MultiOperator, block: Block,
                          xspecs: Sequence[ClassSpec], stack: StackLike,
                          x_samples: Sequence[tuple[Vec, ...]],
                          budget: int = 8, seed: int = 0,
                          tol_identity: float = TOL_IDENTITY,
                          tol_chain: float = TOL_CHAIN) -> CheckReport:
    """Single-point block values reproduce the plain operator values.

    For each sampled argument tuple and each block member, the sequences
    x^(k) e_{j_k} yield a block image with exactly one nonzero leaf entry,
    so the block value collapses to ||T(x)||; consequently the summing-norm
    estimate dominates the operator sup norm.
    """
    stack = as_stack(stack)
    worst_id = 0.0
    witness = None
    count = 0
    members = block.members[:8]
    for xs in x_samples:
        tval = vec_norm(apply(T, *xs))
        for jt in members:
            count += 1
            seqs = [VecSequence.point(xs[k], jt[k]) for k in range(T.arity)]
            bval = block_value(T, block, stack, seqs, budget=budget,
                               seed=seed).value
            slack = _rel(bval - tval, tval)
            if slack > worst_id:
                worst_id = slack
                witness = (xs, jt)
    sup_res = sup_norm(T, budget=_SUPNORM_BUDGET, seed=seed)
    est = summing_norm(T, block, xspecs, stack, truncation=1, budget=budget,
                       seed=seed)
    chain = sup_res.value - est.value
    passed = worst_id <= tol_identity and chain <= tol_chain
    return CheckReport("norm_domination", count, passed,
                       max(worst_id, chain), witness,
                       details={"worst_identity": worst_id,
                                "sup_minus_estimate": chain})


def check_ideal_inequality(v: LinearMap, T: MultiOperator,
                           us: Sequence[LinearMap], block: Block,
                           xspecs: Sequence[ClassSpec], stack: StackLike,
                           seq_samples: Iterable[tuple[VecSequence, ...]],
                           budget: int = 8, seed: int = 0,
                           tol: float = TOL_CHAIN) -> CheckReport:
    """Pointwise ideal inequality for compositions with linear maps.

    (i) the block value of v o T o (u_1,..,u_n) at given sequences is at
    most ||v|| times the block value of T at the mapped sequences;
    (ii) mapping a sequence through u_k inflates its input-class norm by at
    most ||u_k|| (linear stability).  Requires exact map norms, so the map
    spaces should carry exponent 1 or inf.
    """
    stack = as_stack(stack)
    vres = linear_map_norm(v, budget=budget, seed=seed)
    ures = [linear_map_norm(u, budget=budget, seed=seed) for u in us]
    if not vres.exact or not all(r.exact for r in ures):
        raise ValueError("ideal check needs exact map norms; "
                         "use domains with exponent 1 or inf")
    TC = compose(v, T, us)
    worst = -math.inf
    witness = None
    count = 0
    for seqs in seq_samples:
        count += 1
        mapped = [VecSequence(us[k].apply_rows(seqs[k].entries),
                              us[k].codomain) for k in range(T.arity)]
        lhs = block_value(TC, block, stack, seqs, budget=budget,
                          seed=seed).value
        rhs = vres.value * block_value(T, block, stack, mapped,
                                       budget=budget, seed=seed).value
        slack = (lhs - rhs) / max(1.0, rhs)
        if slack > worst:
            worst, witness = slack, seqs
        for k in range(T.arity):
            xn_m = class_norm(xspecs[k], mapped[k], budget=budget, seed=seed)
            xn = class_norm(xspecs[k], seqs[k], budget=budget, seed=seed)
            bound = ures[k].value * xn.value
            slack = (xn_m.value - bound) / max(1.0, bound)
            if slack > worst:
                worst, witness = slack, seqs
    return CheckReport("ideal_inequality", count, worst <= tol, worst,
                       witness)


def check_finite_type_norm(phis: Sequence[Vec], b: Vec, block: Block,
                           xspecs: Sequence[ClassSpec], stack: StackLike,
                           budget: int = 8, seed: int = 0,
                           tol: float = TOL_CHAIN,
                           compat_samples: int = 24) -> CheckReport:
    """The summing norm of a rank-one operator equals ||b|| times the product
    of the functional norms, provided the classes are compatible.

    The lower bound is attained by the single-point family; the matching
    upper bound holds for compatible classes, so an estimate overshooting
    the product beyond tolerance is a bug.  Compatibility is probed first;
    on failure the check is skipped with a diagnostic.
    """
    stack = as_stack(stack)
    samples = _sampling.random_scalar_sequences(
        list(xspecs), length=min(3, min(block.bounds)),
        count=compat_samples, seed=seed)
    compat = check_compatibility(xspecs, stack, block, samples,
                                 budget=budget, seed=seed)
    if not compat.passed:
        return CheckReport("finite_type_norm", 0, False, compat.worst_margin,
                           compat.witness,
                           note="skipped: classes failed the compatibility probe")
    expected = vec_norm(b)
    for phi in phis:
        expected *= lp_norm(phi.coords, phi.space.exp.dual())
    T = finite_type(phis, b)
    est = summing_norm(T, block, xspecs, stack,
                       truncation=min(2, min(block.bounds)), budget=budget,
                       seed=seed)
    slack = _rel(est.value - expected, expected)
    return CheckReport("finite_type_norm", 1, slack <= tol, slack,
                       (phis, b), details={"expected": expected,
                                           "estimate": est.value})


def check_diagonal_reduction(T: MultiOperator, xspecs: Sequence[ClassSpec],
                             q, zspec: ClassSpec,
                             seq_samples: Iterable[tuple[VecSequence, ...]],
                             tol: float = TOL_IDENTITY) -> CheckReport:
    """Diagonal-block values collapse to the plain q-sum of operator values.

    On the diagonal block every fiber has at most one element and every
    intermediate level has at most one nonzero child, so the stack
    [strong(q), Z,..,Z] reduces to (sum_j ||T(x_j,..,x_j)||^q)^(1/q)
    whatever Z is.  The input classes do not enter the identity; they are
    accepted to pin the instance being checked.
    """
    if len(tuple(xspecs)) != T.arity:
        raise ValueError("one input class per slot is required")
    q = float(q)
    stack = ClassStack((Strong(q),) + (zspec,) * (T.arity - 1))
    worst = 0.0
    witness = None
    count = 0
    for seqs in seq_samples:
        count += 1
        bounds = tuple(max(1, len(s)) for s in seqs)
        block = make_block("diagonal", bounds)
        lhs = block_value(T, block, stack, seqs).value
        L = min(len(s) for s in seqs)
        terms = [vec_norm(apply(T, *[s.entry(j) for s in seqs])) ** q
                 for j in range(L)]
        rhs = float(sum(terms)) ** (1.0 / q) if terms else 0.0
        slack = _rel(lhs - rhs, rhs)
        if slack > worst:
            worst, witness = slack, seqs
    return CheckReport("diagonal_reduction", count, worst <= tol, worst,
                       witness)


def check_multiple_formula(T: MultiOperator, qlist: Sequence[float],
                           seq_samples: Iterable[tuple[VecSequence, ...]],
                           tol: float = TOL_IDENTITY) -> CheckReport:
    """Full-grid block values equal the directly coded iterated sums."""
    qlist = [float(q) for q in qlist]
    if len(qlist) != T.arity:
        raise ValueError("one exponent per slot is required")
    stack = ClassStack(tuple(Strong(q) for q in qlist))
    worst = 0.0
    witness = None
    count = 0
    for seqs in seq_samples:
        count += 1
        bounds = tuple(max(1, len(s)) for s in seqs)
        block = make_block("full", bounds)
        lhs = block_value(T, block, stack, seqs).value
        rhs = _iterated_sum(T, seqs, qlist)
        slack = _rel(lhs - rhs, rhs)
        if slack > worst:
            worst, witness = slack, seqs
    return CheckReport("multiple_formula", count, worst <= tol, worst,
                       witness)


def _iterated_sum(T: MultiOperator, seqs: Sequence[VecSequence],
                  qlist: Sequence[float]) -> float:
    lengths = [len(s) for s in seqs]
    if any(L == 0 for L in lengths):
        return 0.0
    grid = np.empty(lengths)
    for idx in itertools.product(*(range(L) for L in lengths)):
        grid[idx] = vec_norm(apply(T, *[seqs[k].entry(idx[k])
                                        for k in range(T.arity)]))
    a = grid
    for q in reversed(qlist):
        a = (a ** q).sum(axis=-1) ** (1.0 / q)
    return float(a)


def check_partition_formula(T: MultiOperator, q1, q2,
                            seq_samples: Iterable[tuple[VecSequence, ...]],
                            tol: float = TOL_IDENTITY) -> CheckReport:
    """Trilinear partition identity on the block {first two indices equal}.

    Both leading slots ride the same summation index, the third is free, and
    the value is the double sum (sum_j (sum_l ||T(x_j, y_j, z_l)||^q2)^(q1/q2))^(1/q1).
    The level of the constrained second index sees at most one nonzero child
    per branch, so any tag collapses there; sup keeps the collapse exact.
    """
    if T.arity != 3:
        raise ValueError("the partition check is trilinear")
    q1, q2 = float(q1), float(q2)
    stack = ClassStack((Strong(q1), SUP, Strong(q2)))
    worst = 0.0
    witness = None
    count = 0
    for seqs in seq_samples:
        count += 1
        bounds = tuple(max(1, len(s)) for s in seqs)
        block = make_block("equality", bounds, pair=(0, 1))
        lhs = block_value(T, block, stack, seqs).value
        L = min(len(seqs[0]), len(seqs[1]))
        acc = 0.0
        for j in range(L):
            inner = sum(
                vec_norm(apply(T, seqs[0].entry(j), seqs[1].entry(j),
                               seqs[2].entry(l))) ** q2
                for l in range(len(seqs[2])))
            acc += inner ** (q1 / q2)
        rhs = acc ** (1.0 / q1)
        slack = _rel(lhs - rhs, rhs)
        if slack > worst:
            worst, witness = slack, seqs
    return CheckReport("partition_formula", count, worst <= tol, worst,
                       witness)


def check_coincidence(A: MultiOperator, xspecs: Sequence[ClassSpec], q,
                      seq_samples: Iterable[tuple[VecSequence, VecSequence]],
                      constants: Optional[CoincidenceConstants] = None,
                      budget: int = 8, seed: int = 0,
                      tol_identity: float = TOL_IDENTITY,
                      tol_chain: float = TOL_CHAIN) -> CheckReport:
    """Bilinear coincidence: currying consistency and the constant bound.

    (i) building the full-grid image row by row through the curried maps
    x -> (A(x, y_j))_j reproduces the block image exactly;
    (ii) the full-grid block value is bounded by C1 C2 ||A|| times the
    product of the input-class norms.

    The built-in regime is strong(1) inputs with a strong(1) stack, where
    C1 = C2 = 1 holds for every pair of spaces (the triangle inequality
    gives sum_j ||u x_j|| <= ||u|| sum_j ||x_j||).  Any other regime must
    assert its constants explicitly.
    """
    if A.arity != 2:
        raise ValueError("the coincidence check is bilinear")
    xspecs = tuple(xspecs)
    q = float(q)
    if constants is None:
        builtin = (len(xspecs) == 2
                   and all(s.kind == "strong" and s.p.as_float == 1.0
                           for s in xspecs)
                   and q == 1.0)
        if not builtin:
            raise ValueError(
                "no built-in constants for this regime; pass "
                "CoincidenceConstants explicitly")
        constants = CoincidenceConstants(1.0, 1.0)
    stack = ClassStack((Strong(q), Strong(q)))
    sup_res = sup_norm(A, budget=_SUPNORM_BUDGET, seed=seed)
    worst_id = 0.0
    worst_chain = -math.inf
    witness = None
    count = 0
    for s1, s2 in seq_samples:
        count += 1
        bounds = (max(1, len(s1)), max(1, len(s2)))
        block = make_block("full", bounds)
        img = block_image(A, block, (s1, s2))
        scale = 0.0
        dev = 0.0
        for j1 in range(len(s1)):
            curried = np.tensordot(A.tensor, s1.entries[j1], axes=(0, 0))
            rows = s2.entries @ curried        # (k2, mF) via the curried map
            leaf = img.root[j1].entries
            dev = max(dev, float(np.abs(rows - leaf).max(initial=0.0)))
            scale = max(scale, float(np.abs(rows).max(initial=0.0)))
        slack_id = dev / max(1.0, scale)
        if slack_id > worst_id:
            worst_id, witness = slack_id, (s1, s2)
        lhs = block_value(A, block, stack, (s1, s2)).value
        rhs = constants.c1 * constants.c2 * sup_res.value
        for spec, s in zip(xspecs, (s1, s2)):
            rhs *= class_norm(spec, s).value
        slack = (lhs - rhs) / max(1.0, rhs)
        if slack > worst_chain:
            worst_chain = slack
            if slack > tol_chain:
                witness = (s1, s2)
    passed = worst_id <= tol_identity and worst_chain <= tol_chain
    return CheckReport("coincidence", count, passed,
                       max(worst_id, worst_chain), witness,
                       details={"worst_curry": worst_id,
                                "worst_bound": worst_chain,
                                "sup_norm_exact": sup_res.exact})


def find_incompatibility_witness(xspecs: Sequence[ClassSpec],
                                 stack: StackLike, block: Block,
                                 truncation: int, budget: int = 16,
                                 seed: int = 0,
                                 tolerance: float = 1e-12) -> CompatReport:
    """Search scalar sequences maximizing the compatibility margin.

    Candidates are structured constant sequences at every length up to the
    truncation, plus seeded Gaussian restarts refined by coordinate hill
    climbing; all are unit-normalized in the input classes, so the margin is
    the nested block norm minus one.  A positive margin certifies that the
    classes are not compatible over this block at this truncation.
    Signs never matter (only norms of products enter), so candidates are
    kept nonnegative.
    """
    xspecs = tuple(xspecs)
    stack = as_stack(stack)
    n = block.arity
    if len(xspecs) != n or stack.depth != n:
        raise ValueError("class counts must match the block arity")
    T = multiplication_operator(n)
    truncation = max(1, int(truncation))
    budget = max(0, int(budget))

    best_margin = -math.inf
    best_wit = None
    count = 0

    def consider(vals_list: Sequence[np.ndarray]):
        nonlocal best_margin, best_wit, count
        normed = []
        for spec, vals in zip(xspecs, vals_list):
            nrm = scalar_class_norm(spec, vals)
            if nrm <= 0.0:
                return None
            normed.append(vals / nrm)
        seqs = [VecSequence(v.reshape(-1, 1), SCALAR_SPACE) for v in normed]
        val = block_value(T, block, stack, seqs, budget=budget,
                          seed=seed).value
        count += 1
        margin = val - 1.0
        if margin > best_margin:
            best_margin = margin
            best_wit = tuple(ScalarSequence(v) for v in normed)
        return margin

    for ell in range(1, truncation + 1):
        lengths = [min(ell, block.bounds[k]) for k in range(n)]
        consider([np.ones(L) for L in lengths])
        for r in range(budget):
            rng = _search.rng_for(seed, _search.TAG_RESTART, ell, r)
            vals = [np.abs(rng.standard_normal(L)) for L in lengths]
            margin = consider(vals)
            if margin is None:
                continue
            current = vals
            step = 0.5
            for _ in range(2):
                for k in range(n):
                    for i in range(lengths[k]):
                        cand = list(current)
                        slot = current[k].copy()
                        slot[i] = abs(slot[i] + step * rng.standard_normal())
                        cand[k] = slot
                        m2 = consider(cand)
                        if m2 is not None and m2 > margin:
                            margin, current = m2, cand
                step *= 0.5
    return CompatReport(best_margin <= tolerance, best_margin, best_wit,
                        count, tolerance)
