"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Every expected value is computed by an oracle coded directly in this module
(plain numpy loops), independent of the library's evaluation paths.  Run
with ``pytest -s tests/test_acceptance.py`` to see the per-criterion lines.
"""

import itertools
import json
import math
import time
from contextlib import contextmanager
from importlib import resources

import numpy as np

from blocknorm import (SUP, FiniteLpSpace, Strong, Sup, VecSequence, Weak,
                       block_value, check_coincidence, check_compatibility,
                       check_ideal_inequality, finite_type,
                       find_incompatibility_witness, make_block, summing_norm,
                       sup_norm)
from blocknorm._sampling import (random_linear_map, random_operator,
                                 random_unit_vectors, random_vec_sequences,
                                 random_scalar_sequences)
from blocknorm.cli import main as cli_main
from blocknorm.cli import strip_timing


@contextmanager
def criterion(num, name, limit_s):
    t0 = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"[FAIL] criterion {num}: {name}")
        raise
    elapsed = time.perf_counter() - t0
    print(f"[PASS] criterion {num}: {name} ({elapsed:.2f}s < {limit_s}s)")
    assert elapsed < limit_s, f"criterion {num} exceeded its runtime budget"


def _lp(values, p):
    a = np.abs(np.asarray(values, dtype=float)).ravel()
    if a.size == 0:
        return 0.0
    if p == "inf" or (isinstance(p, float) and math.isinf(p)):
        return float(a.max())
    return float((a ** p).sum() ** (1.0 / p))


def _apply_by_hand(tensor, xs):
    v = np.asarray(tensor, dtype=float)
    for x in xs:
        v = np.tensordot(np.asarray(x, dtype=float), v, axes=(0, 0))
    return v


EXPS = [1, "inf"]
CODS = [1, 2, 3, "inf"]


def test_criterion_1_single_point_realization():
    with criterion(1, "single-point block values equal the operator values",
                   10):
        worst = 0.0
        for i in range(200):
            rng = np.random.default_rng(1000 + i)
            n = 2 + i % 2
            doms = tuple(FiniteLpSpace(int(rng.integers(1, 5)),
                                       EXPS[rng.integers(2)])
                         for _ in range(n))
            cod = FiniteLpSpace(int(rng.integers(1, 5)),
                                CODS[rng.integers(4)])
            T = random_operator(doms, cod, seed=2000 + i)
            block = make_block("diagonal" if i % 2 else "full", (2,) * n)
            stack = [Strong(float(rng.integers(1, 4))) for _ in range(n)]
            xs = random_unit_vectors(doms, 1, seed=3000 + i)[0]
            tval = _lp(_apply_by_hand(T.tensor, [x.coords for x in xs]),
                       cod.exp.as_float)
            for jt in block.members[:2]:
                seqs = [VecSequence.point(xs[k], jt[k]) for k in range(n)]
                bval = block_value(T, block, stack, seqs).value
                worst = max(worst, abs(bval - tval) / max(1.0, tval))
            sup = sup_norm(T, seed=i)
            assert sup.exact
            est = summing_norm(T, block, (Strong(1),) * n, stack,
                               truncation=1, budget=0, seed=i)
            assert sup.value <= est.value + 1e-9
        assert worst <= 1e-12, f"worst single-point deviation {worst}"


def test_criterion_2_rank_one_equality():
    with criterion(2, "rank-one summing norms equal ||b|| * prod ||phi_k||",
                   20):
        allexp = [1, 2, 3, "inf"]
        worst = 0.0
        for i in range(50):
            rng = np.random.default_rng(5000 + i)
            n = 2 + i % 2
            doms = tuple(FiniteLpSpace(int(rng.integers(1, 4)),
                                       allexp[rng.integers(4)])
                         for _ in range(n))
            cod = FiniteLpSpace(int(rng.integers(1, 4)),
                                allexp[rng.integers(4)])
            phis = [sp.vec(rng.standard_normal(sp.dim)) for sp in doms]
            b = cod.vec(rng.standard_normal(cod.dim))
            q = float(rng.integers(1, 4))
            block = make_block("diagonal" if i % 3 == 0 else "full", (2,) * n)
            expected = _lp(b.coords, cod.exp.as_float)
            for phi, sp in zip(phis, doms):
                expected *= _lp(phi.coords, sp.exp.dual().as_float)
            est = summing_norm(finite_type(phis, b), block,
                               (Strong(1),) * n, [Strong(q)] * n,
                               truncation=2, budget=4, seed=i)
            worst = max(worst, abs(est.value - expected) / max(1.0, expected))
        assert worst <= 1e-9, f"worst rank-one deviation {worst}"


def test_criterion_3_diagonal_identity():
    with criterion(3, "diagonal block values collapse to plain q-sums", 5):
        zchoices = (Strong(1), Strong(2), SUP)
        count = 0
        for i in range(70):
            rng = np.random.default_rng(7000 + i)
            n = 2 + i % 2
            doms = tuple(FiniteLpSpace(int(rng.integers(1, 4)), 2)
                         for _ in range(n))
            cod = FiniteLpSpace(int(rng.integers(1, 4)),
                                CODS[rng.integers(4)])
            T = random_operator(doms, cod, seed=7100 + i)
            q = float(rng.integers(1, 4))
            L = int(rng.integers(1, 5))
            seqs = random_vec_sequences(doms, [L] * n, 1, seed=7200 + i)[0]
            rhs = _lp([_lp(_apply_by_hand(
                T.tensor, [s.entries[j] for s in seqs]), cod.exp.as_float)
                for j in range(L)], q)
            vals = []
            block = make_block("diagonal", (L,) * n)
            for z in zchoices:
                lhs = block_value(T, block, [Strong(q)] + [z] * (n - 1),
                                  list(seqs)).value
                assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)
                vals.append(lhs)
                count += 1
            assert max(vals) - min(vals) <= 1e-12 * max(1.0, rhs)
        assert count >= 200


def test_criterion_4_multiple_summing_identity():
    with criterion(4, "full-grid values equal the iterated sums", 10):
        qpool = [1.0, 1.5, 2.0, 3.0]
        for i in range(200):
            rng = np.random.default_rng(8000 + i)
            n = 2 + i % 2
            doms = tuple(FiniteLpSpace(int(rng.integers(1, 4)),
                                       CODS[rng.integers(4)])
                         for _ in range(n))
            cod = FiniteLpSpace(int(rng.integers(1, 4)), 2)
            T = random_operator(doms, cod, seed=8100 + i)
            qs = [qpool[rng.integers(4)] for _ in range(n)]
            lengths = [int(rng.integers(1, 4)) for _ in range(n)]
            seqs = random_vec_sequences(doms, lengths, 1, seed=8200 + i)[0]
            norms = np.zeros(lengths)
            for idx in itertools.product(*(range(L) for L in lengths)):
                norms[idx] = _lp(_apply_by_hand(
                    T.tensor, [seqs[k].entries[idx[k]] for k in range(n)]),
                    cod.exp.as_float)
            a = norms
            for q in reversed(qs):
                a = (a ** q).sum(axis=-1) ** (1.0 / q)
            rhs = float(a)
            lhs = block_value(T, make_block("full", tuple(lengths)),
                              [Strong(q) for q in qs], list(seqs)).value
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


def test_criterion_5_partition_identity():
    with criterion(5, "equality-block values equal the double sums", 10):
        for i in range(100):
            rng = np.random.default_rng(9000 + i)
            doms = tuple(FiniteLpSpace(int(rng.integers(1, 4)),
                                       CODS[rng.integers(4)])
                         for _ in range(3))
            cod = FiniteLpSpace(int(rng.integers(1, 4)), 2)
            T = random_operator(doms, cod, seed=9100 + i)
            q1 = float(rng.integers(1, 3))
            q2 = float(rng.integers(1, 3))
            lengths = [int(rng.integers(1, 4)) for _ in range(3)]
            seqs = random_vec_sequences(doms, lengths, 1, seed=9200 + i)[0]
            L = min(lengths[0], lengths[1])
            acc = 0.0
            for j in range(L):
                inner = sum(_lp(_apply_by_hand(
                    T.tensor, [seqs[0].entries[j], seqs[1].entries[j],
                               seqs[2].entries[l]]), cod.exp.as_float) ** q2
                    for l in range(lengths[2]))
                acc += inner ** (q1 / q2)
            rhs = acc ** (1.0 / q1)
            block = make_block("equality", tuple(lengths), pair=(0, 1))
            lhs = block_value(T, block, [Strong(q1), SUP, Strong(q2)],
                              list(seqs)).value
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


def test_criterion_6_ideal_chain():
    with criterion(6, "pointwise ideal inequalities on polytope spaces", 20):
        for i in range(25):
            rng = np.random.default_rng(11000 + i)
            G1 = FiniteLpSpace(int(rng.integers(1, 4)), EXPS[rng.integers(2)])
            G2 = FiniteLpSpace(int(rng.integers(1, 4)), EXPS[rng.integers(2)])
            E1 = FiniteLpSpace(int(rng.integers(1, 4)), EXPS[rng.integers(2)])
            E2 = FiniteLpSpace(int(rng.integers(1, 4)), EXPS[rng.integers(2)])
            F = FiniteLpSpace(int(rng.integers(1, 4)), EXPS[rng.integers(2)])
            H = FiniteLpSpace(int(rng.integers(1, 4)), EXPS[rng.integers(2)])
            T = random_operator((E1, E2), F, seed=11100 + i)
            us = [random_linear_map(G1, E1, 11200 + i),
                  random_linear_map(G2, E2, 11300 + i)]
            v = random_linear_map(F, H, 11400 + i)
            seqs = random_vec_sequences((G1, G2), [2, 3], 4, seed=11500 + i)
            rep = check_ideal_inequality(
                v, T, us, make_block("full", (2, 3)),
                (Strong(1), Weak(2)), [Strong(2), Strong(1)], seqs,
                seed=i, tol=1e-9)
            assert rep.passed, f"instance {i}: slack {rep.worst_slack}"
            assert rep.instances == 4


def test_criterion_7_compatibility():
    with criterion(7, "nested classes pass; l2 pair against l1 stack fails",
                   10):
        ppool = [1.0, 1.5, 2.0]
        dpool = [0.0, 0.5, 1.0]
        total = 0
        for i in range(100):
            rng = np.random.default_rng(12000 + i)
            ps = [ppool[rng.integers(3)] for _ in range(2)]
            qs = [p + dpool[rng.integers(3)] for p in ps]
            xspecs = [Strong(p) for p in ps]
            stack = [Strong(q) for q in qs]
            kind = ("full", "diagonal", "explicit")[i % 3]
            if kind == "explicit":
                grid = list(itertools.product(range(3), repeat=2))
                members = [t for t in grid if rng.random() < 0.5] or [(0, 0)]
                block = make_block("explicit", (3, 3), members=members)
            else:
                block = make_block(kind, (3, 3))
            samples = random_scalar_sequences(xspecs, 3, 5, seed=12100 + i)
            rep = check_compatibility(xspecs, stack, block, samples,
                                      tolerance=1e-12)
            assert rep.passed, f"instance {i}: margin {rep.worst_margin}"
            total += rep.samples
        assert total == 500
        rep = find_incompatibility_witness(
            (Strong(2), Strong(2)), [Strong(1), Strong(1)],
            make_block("full", (16, 16)), truncation=16, budget=2, seed=0)
        assert rep.worst_margin >= 14.0, rep.worst_margin


def test_criterion_8_coincidence_exact_regime():
    with criterion(8, "curry consistency and the coincidence bound", 10):
        for i in range(200):
            rng = np.random.default_rng(13000 + i)
            E1 = FiniteLpSpace(int(rng.integers(1, 5)), 1)
            E2 = FiniteLpSpace(int(rng.integers(1, 5)), 1)
            F = FiniteLpSpace(int(rng.integers(1, 4)),
                              CODS[rng.integers(4)])
            A = random_operator((E1, E2), F, seed=13100 + i)
            pair = tuple(random_vec_sequences(
                (E1, E2), [int(rng.integers(1, 4)), int(rng.integers(1, 4))],
                1, seed=13200 + i)[0])
            rep = check_coincidence(A, (Strong(1), Strong(1)), 1, [pair],
                                    seed=i, tol_identity=1e-12,
                                    tol_chain=1e-9)
            assert rep.passed, f"instance {i}: {rep.details}"


def _oracle_vertex_grid(T, block, xspecs, stack_qs, k):
    """Exhaustive sup over sequences whose rows are ball vertices or zero,
    normalized in the input classes; computed with hand-coded loops."""
    n = T.arity
    per_slot = []
    for sp, spec in zip(T.domains, xspecs):
        if sp.exp.as_float == 1.0:
            verts = [row for row in np.vstack([np.eye(sp.dim),
                                               -np.eye(sp.dim)])]
        else:
            verts = [np.array(s) for s in
                     itertools.product((1.0, -1.0), repeat=sp.dim)]
        rows = verts + [np.zeros(sp.dim)]
        mats = []
        for combo in itertools.product(rows, repeat=k):
            arr = np.stack(combo)
            if spec.kind == "sup":
                nrm = max(_lp(r, sp.exp.as_float) for r in arr)
            else:
                nrm = _lp([_lp(r, sp.exp.as_float) for r in arr],
                          spec.p.as_float)
            if nrm <= 0:
                continue
            mats.append(arr / nrm)
        per_slot.append(mats)
    best = 0.0
    mask = block.mask_array
    for combo in itertools.product(*per_slot):
        norms = np.zeros((k,) * n)
        for idx in itertools.product(range(k), repeat=n):
            if not mask[idx]:
                continue
            norms[idx] = _lp(_apply_by_hand(
                T.tensor, [combo[i][idx[i]] for i in range(n)]),
                T.codomain.exp.as_float)
        a = norms
        for q in reversed(stack_qs):
            a = (a ** q).sum(axis=-1) ** (1.0 / q)
        best = max(best, float(a))
    return best


def test_criterion_9_estimator_soundness():
    with criterion(9, "search never beats exhaustive vertex enumeration; "
                      "budget-monotone", 60):
        cases = []
        for i in range(8):
            rng = np.random.default_rng(14000 + i)
            doms = (FiniteLpSpace(2, EXPS[i % 2]),
                    FiniteLpSpace(2, EXPS[(i // 2) % 2]))
            cod = FiniteLpSpace(2, 2)
            T = random_operator(doms, cod, seed=14100 + i)
            xspecs = (Sup(), Sup()) if i % 2 else (Strong(1), Strong(1))
            qs = [float(rng.integers(1, 3)) for _ in range(2)]
            block = make_block("full" if i % 3 else "diagonal", (2, 2))
            cases.append((T, block, xspecs, qs))
        for T, block, xspecs, qs in cases:
            oracle = _oracle_vertex_grid(T, block, xspecs, qs, k=2)
            est = summing_norm(T, block, xspecs, [Strong(q) for q in qs],
                               truncation=2, budget=6, seed=3)
            assert est.value <= oracle + 1e-9, (est.value, oracle)
        T, block, xspecs, qs = cases[0]
        values = [summing_norm(T, block, xspecs, [Strong(q) for q in qs],
                               truncation=2, budget=b, seed=5).value
                  for b in range(20)]
        for a, b in zip(values, values[1:]):
            assert b >= a - 1e-15, values


def test_criterion_10_cli_determinism(tmp_path):
    with criterion(10, "reference config reruns byte-identically", 5):
        cfg_path = str(resources.files("blocknorm")
                       .joinpath("data/reference_config.json"))
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            code = cli_main(["check", cfg_path, "--seed", "20240810",
                             "--out", str(out)])
            assert code == 0
            outs.append(json.dumps(
                strip_timing(json.loads(out.read_text())),
                indent=2, sort_keys=True))
        assert outs[0] == outs[1]
