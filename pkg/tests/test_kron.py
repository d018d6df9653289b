import numpy as np
import pytest

from conftest import dense_contract, random_motif
from tenalign import _kernels
from tenalign.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    UnsupportedContractionError,
)
from tenalign.kron import (
    KronPair,
    explicit_kron,
    implicit_kron_ttv,
    interleave,
    lowrank_kron_ttv,
    rank1_kron_ttv,
    unvec,
    vec,
)
from tenalign.tensors import MotifTensor


def diagonal_tensor(dim, order):
    out = np.zeros((dim,) * order)
    for i in range(dim):
        out[(i,) * order] = 1.0
    return out


class TestIndexing:
    def test_interleave_is_bijection(self):
        m, n = 4, 5
        i, ip = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
        joint = interleave(i.ravel(), ip.ravel(), m)
        assert sorted(joint.tolist()) == list(range(m * n))

    def test_vec_unvec_round_trip(self, rng):
        X = rng.standard_normal((3, 5))
        assert np.array_equal(unvec(vec(X), 3, 5), X)

    def test_vec_is_column_major(self):
        X = np.array([[1.0, 3.0], [2.0, 4.0]])
        assert vec(X).tolist() == [1.0, 2.0, 3.0, 4.0]


class TestExplicit:
    def test_diagonal_product_is_bigger_diagonal(self):
        d2 = diagonal_tensor(2, 3)
        assert np.array_equal(explicit_kron(KronPair(d2, d2)), diagonal_tensor(4, 3))

    def test_zero_operand(self, triangle):
        zero = MotifTensor.empty(3, 2)
        dense = explicit_kron(KronPair(triangle, zero))
        assert not dense.any()

    def test_triangle_pair_entry_count(self, triangle):
        dense = explicit_kron(KronPair(triangle, triangle))
        # 6 orientations on each side -> 36 unit entries
        assert int((dense != 0).sum()) == 36
        assert set(np.unique(dense)) == {0.0, 1.0}

    def test_budget(self, triangle):
        with pytest.raises(BudgetExceededError):
            explicit_kron(KronPair(triangle, triangle), budget=10)

    def test_order_mismatch(self, triangle):
        with pytest.raises(DimensionMismatchError):
            KronPair(triangle, MotifTensor.empty(4, 3))


class TestRank1:
    def test_uniform_triangle_pair(self, triangle):
        u = np.ones(3) / np.sqrt(3)
        a_side, b_side = rank1_kron_ttv(KronPair(triangle, triangle), u, u, 2)
        assert np.allclose(a_side, 2.0 / 3.0)
        assert np.allclose(b_side, 2.0 / 3.0)

    def test_zero_vector(self, triangle):
        a_side, _ = rank1_kron_ttv(KronPair(triangle, triangle), np.zeros(3), np.ones(3), 2)
        assert not a_side.any()

    def test_invalid_p(self, triangle):
        with pytest.raises(UnsupportedContractionError):
            rank1_kron_ttv(KronPair(triangle, triangle), np.ones(3), np.ones(3), 1)

    def test_decoupling_identity(self, rng):
        # outer product of the per-operand contractions equals the joint one
        for _ in range(20):
            k = int(rng.integers(3, 5))
            m = int(rng.integers(k, 5))
            n = int(rng.integers(k, 5))
            pair = KronPair(random_motif(k, m, rng), random_motif(k, n, rng))
            u = rng.standard_normal(m)
            v = rng.standard_normal(n)
            a_side, b_side = rank1_kron_ttv(pair, u, v, k - 1)
            joint = implicit_kron_ttv(pair, np.outer(u, v))
            scale = max(np.linalg.norm(joint), 1e-30)
            assert np.linalg.norm(np.outer(a_side, b_side) - joint) / scale <= 1e-12

    def test_full_contraction_scalar_form(self, rng):
        k, m, n = 3, 4, 3
        pair = KronPair(random_motif(k, m, rng), random_motif(k, n, rng))
        u = rng.standard_normal(m)
        v = rng.standard_normal(n)
        sa, sb = rank1_kron_ttv(pair, u, v, k)
        dense = explicit_kron(pair)
        ref = dense_contract(dense, vec(np.outer(u, v)), k)
        assert sa * sb == pytest.approx(float(ref), rel=1e-12, abs=1e-12)


class TestImplicit:
    def test_all_ones_triangle_pair(self, triangle):
        out = implicit_kron_ttv(KronPair(triangle, triangle), np.ones((3, 3)))
        assert np.allclose(out, 4.0)

    def test_zero_input(self, triangle):
        out = implicit_kron_ttv(KronPair(triangle, triangle), np.zeros((3, 3)))
        assert not out.any()

    def test_shape_check(self, triangle):
        with pytest.raises(DimensionMismatchError):
            implicit_kron_ttv(KronPair(triangle, triangle), np.ones((3, 4)))

    def test_matches_explicit_oracle(self, rng):
        for _ in range(20):
            k = int(rng.integers(3, 5))
            m = int(rng.integers(k, 5))
            n = int(rng.integers(k, 5))
            pair = KronPair(random_motif(k, m, rng), random_motif(k, n, rng))
            X = rng.standard_normal((m, n))
            got = implicit_kron_ttv(pair, X)
            ref = unvec(dense_contract(explicit_kron(pair), vec(X), k - 1), m, n)
            scale = max(np.linalg.norm(ref), 1e-30)
            assert np.linalg.norm(got - ref) / scale <= 1e-12

    def test_kernel_paths_agree(self, rng):
        # the compiled kernel and the numpy fallback use different summation
        # orders; they must agree to roundoff
        import math

        from tenalign._kernels import _implicit_np, _tables

        for _ in range(8):
            k = int(rng.integers(3, 5))
            m = int(rng.integers(k, 6))
            n = int(rng.integers(k, 6))
            a = random_motif(k, m, rng)
            b = random_motif(k, n, rng)
            X = rng.standard_normal((m, n))
            fast = implicit_kron_ttv(KronPair(a, b), X)
            perms, rest = _tables(k)
            slow = _implicit_np(
                a.hyperedges, a.weights, b.hyperedges, b.weights,
                X, perms, rest, float(math.factorial(k - 1)), m, n,
            )
            assert np.allclose(fast, slow, rtol=1e-12, atol=1e-14)


class TestLowRank:
    def test_rank1_special_case(self, triangle, rng):
        pair = KronPair(triangle, triangle)
        u = rng.standard_normal((3, 1))
        v = rng.standard_normal((3, 1))
        ue, ve = lowrank_kron_ttv(pair, u, v)
        a_side, b_side = rank1_kron_ttv(pair, u[:, 0], v[:, 0], 2)
        assert np.allclose(ue[:, 0], a_side)
        assert np.allclose(ve[:, 0], b_side)

    def test_matches_implicit(self, rng):
        for _ in range(15):
            k = int(rng.integers(3, 5))
            m = int(rng.integers(k, 5))
            n = int(rng.integers(k, 5))
            r = int(rng.integers(1, 4))
            pair = KronPair(random_motif(k, m, rng), random_motif(k, n, rng))
            U = rng.standard_normal((m, r))
            V = rng.standard_normal((n, r))
            ue, ve = lowrank_kron_ttv(pair, U, V)
            assert ue.shape == (m, r ** (k - 1))
            ref = implicit_kron_ttv(pair, U @ V.T)
            scale = max(np.linalg.norm(ref), 1e-30)
            assert np.linalg.norm(ue @ ve.T - ref) / scale <= 1e-10

    def test_duplicate_columns_give_symmetric_tuples(self, triangle, rng):
        pair = KronPair(triangle, triangle)
        col = rng.standard_normal(3)
        U = np.column_stack([col, col])
        V = rng.standard_normal((3, 2))
        ue, _ = lowrank_kron_ttv(pair, U, V)
        # tuples (0,1) and (1,0) select identical column pairs
        assert np.allclose(ue[:, 1], ue[:, 2])

    def test_column_cap(self, triangle, rng):
        pair = KronPair(triangle, triangle)
        U = rng.standard_normal((3, 3))
        V = rng.standard_normal((3, 3))
        with pytest.raises(BudgetExceededError):
            lowrank_kron_ttv(pair, U, V, column_cap=8)

    def test_column_count_mismatch(self, triangle, rng):
        pair = KronPair(triangle, triangle)
        with pytest.raises(DimensionMismatchError):
            lowrank_kron_ttv(pair, rng.standard_normal((3, 2)), rng.standard_normal((3, 3)))

    def test_column_block_paths_agree(self, rng):
        from tenalign._kernels import _tables, _tuples_np

        k, m, r = 3, 5, 3
        t = random_motif(k, m, rng)
        M = rng.standard_normal((m, r))
        fast = _kernels.ttv_column_block(t.hyperedges, t.weights, M, m, 2, 7)
        perms, rest = _tables(k)
        digits = np.stack(
            np.unravel_index(np.arange(2, 7), (r,) * (k - 1)), axis=1
        ).astype(np.int64)
        slow = _tuples_np(t.hyperedges, t.weights, M, rest, perms, digits, np.zeros((m, 5)))
        assert np.allclose(fast, slow, rtol=1e-12, atol=1e-14)

    def test_uses_motif_contraction_per_tuple(self, rng):
        from itertools import product

        from tenalign.tensors import ttv_multi

        k, m, r = 4, 5, 2
        t = random_motif(k, m, rng)
        M = rng.standard_normal((m, r))
        pair = KronPair(t, t)
        ue, _ = lowrank_kron_ttv(pair, M, M)
        for flat, tup in enumerate(product(range(r), repeat=k - 1)):
            ref = ttv_multi(t, [M[:, c] for c in tup])
            assert np.allclose(ue[:, flat], ref, rtol=1e-12, atol=1e-12)
