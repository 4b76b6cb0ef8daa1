import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blocknorm import _search
from blocknorm.seqnorms import (SUP, ClassStack, JaggedArray, Strong,
                                UnsupportedClassPosition, VecSequence, Weak,
                                class_norm, nested_norm, scalar_class_norm)
from blocknorm.spaces import FiniteLpSpace, lp_norm, vec_norm

R = FiniteLpSpace(1, 3)          # scalar space with an arbitrary exponent
L2 = FiniteLpSpace(2, 2)
LINF2 = FiniteLpSpace(2, "inf")


def seq_of(space, rows):
    return VecSequence(np.array(rows, dtype=float).reshape(-1, space.dim),
                       space)


class TestClassNorm:
    def test_weak_on_scalars_by_sign_enumeration(self):
        # sup_{|phi|<=1} sum |phi x_j| = sum |x_j| = 6
        res = class_norm(Weak(1), seq_of(R, [1, -2, 3]))
        assert res.exact
        assert res.value == pytest.approx(6.0, abs=1e-12)

    def test_strong_single_nonzero_entry(self):
        res = class_norm(Strong(2), seq_of(L2, [[3, 4], [0, 0]]))
        assert res.value == pytest.approx(5.0, abs=1e-12)

    def test_weak2_on_linf_pair_of_basis_vectors(self):
        # dual ball of linf^2 has extreme points +-e_i; each row of the
        # functional-value table has l2 norm 1
        res = class_norm(Weak(2), seq_of(LINF2, [[1, 0], [0, 1]]))
        assert res.exact
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_empty_sequence_is_zero(self):
        for spec in (Strong(2), Weak(1), SUP):
            assert class_norm(spec, VecSequence(np.zeros((0, 2)), L2)).value == 0.0

    @pytest.mark.parametrize("spec", [Strong(1), Strong(2), Weak(1), Weak(2), SUP])
    @pytest.mark.parametrize("p", [1, 2, 3, "inf"])
    def test_normalization_axiom_single_entry(self, spec, p):
        rng = np.random.default_rng(5)
        sp = FiniteLpSpace(3, p)
        for _ in range(10):
            x = rng.standard_normal(3)
            res = class_norm(spec, seq_of(sp, [x]), budget=4, seed=0)
            assert res.value == pytest.approx(lp_norm(x, p), rel=1e-12)

    @pytest.mark.parametrize("spec", [Strong(1), Strong(2), SUP, Weak(1), Weak(2)])
    def test_permutation_and_zero_padding_invariance(self, spec):
        rng = np.random.default_rng(6)
        sp = FiniteLpSpace(2, 1)   # dual enumerable: weak norms exact here
        rows = rng.standard_normal((4, 2))
        base = class_norm(spec, VecSequence(rows, sp)).value
        perm = rng.permutation(4)
        assert class_norm(spec, VecSequence(rows[perm], sp)).value == \
            pytest.approx(base, rel=1e-12)
        padded = np.vstack([rows, np.zeros((3, 2))])
        assert class_norm(spec, VecSequence(padded, sp)).value == \
            pytest.approx(base, rel=1e-12)

    @pytest.mark.parametrize("p", [1, 2])
    def test_strong_dominates_weak_dominates_functionals(self, p):
        rng = np.random.default_rng(7)
        sp = FiniteLpSpace(3, "inf")
        rows = rng.standard_normal((5, 3))
        seq = VecSequence(rows, sp)
        strong = class_norm(Strong(p), seq).value
        weak = class_norm(Weak(p), seq).value
        assert weak <= strong + 1e-12
        for _ in range(20):
            phi = rng.standard_normal(3)
            nrm = lp_norm(phi, sp.exp.dual())
            phi = phi / nrm
            assert lp_norm(rows @ phi, p) <= weak + 1e-12

    def test_inexact_weak_never_exceeds_enumeration(self):
        rng = np.random.default_rng(8)
        sp = FiniteLpSpace(2, 1)
        for i in range(20):
            rows = rng.standard_normal((3, 2))
            exact = class_norm(Weak(2), VecSequence(rows, sp)).value
            approx, _ = _search.weak_ascent(rows, 1.0, 2.0, budget=4, seed=i)
            assert approx <= exact + 1e-9

    def test_scalar_weak_equals_strong(self):
        rng = np.random.default_rng(9)
        vals = rng.standard_normal(6)
        for p in (1, 1.5, 2):
            assert scalar_class_norm(Weak(p), vals) == \
                pytest.approx(scalar_class_norm(Strong(p), vals), rel=1e-12)

    @pytest.mark.parametrize("spec", [Strong(1), Strong(2), SUP, Weak(1),
                                      Weak(2)])
    def test_linear_stability(self, spec):
        # mapping entries through u inflates the class norm by at most ||u||
        from blocknorm.spaces import LinearMap, linear_map_norm
        rng = np.random.default_rng(11)
        dom = FiniteLpSpace(3, 1)
        cod = FiniteLpSpace(2, "inf")
        for i in range(15):
            u = LinearMap(rng.standard_normal((2, 3)), dom, cod)
            un = linear_map_norm(u)
            assert un.exact
            rows = rng.standard_normal((4, 3))
            base = class_norm(spec, VecSequence(rows, dom)).value
            mapped = class_norm(spec, VecSequence(u.apply_rows(rows), cod))
            assert mapped.value <= un.value * base + 1e-9


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.lists(st.floats(-10, 10), min_size=0, max_size=6),
       st.sampled_from([1.0, 2.0, 3.0]))
def test_scalar_norm_padding_invariance(vals, p):
    a = scalar_class_norm(Strong(p), vals)
    b = scalar_class_norm(Strong(p), list(vals) + [0.0, 0.0])
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


class TestNestedNorm:
    def test_two_level_scalar_example(self):
        # inner l2 values 5, 0, 13; outer l1 gives 18
        leaves = [seq_of(R, [3, 4]), seq_of(R, [0, 0]), seq_of(R, [5, 12])]
        arr = JaggedArray(leaves, 2, R)
        res = nested_norm([Strong(1), Strong(2)], arr)
        assert res.exact
        assert res.value == pytest.approx(18.0, abs=1e-12)

    def test_empty_fiber_contributes_zero(self):
        x = np.array([[3.0, 4.0]])
        arr = JaggedArray([VecSequence(x, L2),
                           VecSequence(np.zeros((0, 2)), L2)], 2, L2)
        res = nested_norm([SUP, Strong(1)], arr)
        assert res.value == pytest.approx(5.0, abs=1e-12)

    @pytest.mark.parametrize("q", [1, 2, 3])
    def test_diagonal_shape_equals_plain_lq(self, q):
        # one nonzero leaf per level-1 index: the iterated norm collapses
        rng = np.random.default_rng(10)
        rows = rng.standard_normal((3, 2))
        leaves = []
        for j in range(3):
            children = [VecSequence(np.zeros((0, 2)), L2) for _ in range(3)]
            children[j] = VecSequence(rows[j:j + 1], L2)
            leaves.append(children)
        arr = JaggedArray(leaves, 3, L2)
        res = nested_norm([Strong(q)] * 3, arr)
        expected = lp_norm([vec_norm(L2.vec(r)) for r in rows], q)
        assert res.value == pytest.approx(expected, rel=1e-12)

    def test_weak_only_innermost(self):
        with pytest.raises(UnsupportedClassPosition):
            ClassStack((Weak(2), Strong(1)))
        # innermost weak position is fine
        ClassStack((Strong(1), Weak(2)))

    def test_depth_mismatch(self):
        arr = JaggedArray(seq_of(R, [1]), 1, R)
        with pytest.raises(ValueError):
            nested_norm([Strong(1), Strong(1)], arr)

    def test_weak_innermost_evaluates(self):
        arr = JaggedArray([seq_of(LINF2, [[1, 0], [0, 1]]),
                           VecSequence(np.zeros((0, 2)), LINF2)], 2, LINF2)
        res = nested_norm([Strong(1), Weak(2)], arr)
        assert res.exact
        assert res.value == pytest.approx(1.0, abs=1e-12)
