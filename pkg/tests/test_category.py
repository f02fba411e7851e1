from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import anomalous_z2, fibonacci, rand_c, strict_onsite
from mpogauge.anomaly import localized_op, make_split_chain, symmetrize_state, unit_gauge_state
from mpogauge.category import (CategoryError, CategoryMpoRep, FusionCategory, MultiplicityError,
                               assoc_relation_residual, build_fibonacci_mpo, category_action_residual,
                               category_action_tensors, category_rep_from_group, category_unit_vector,
                               channel_orthogonality_residual, channel_zipper_residual,
                               dense_category_mpo, fibonacci_category, fibonacci_fsymbol,
                               group_category, invariant_state_via_lambda, local_lambda_op,
                               local_op_category, make_category_chain, product_gauge_state,
                               solve_category_fusion_tensors,
                               symmetrize_category, trivial_category, validate_category,
                               verify_category)
from mpogauge.fusion import NoSolutionError
from mpogauge.groups import cyclic, symmetric
from mpogauge.mpo import SizeGuardError

GOLDEN = (1 + 5**0.5) / 2


def as_matrix(op6):
    n = op6.shape[0] * op6.shape[1] * op6.shape[2]
    return op6.reshape(n, n)


def fib_blocks(rng):
    """One block per object: each MPO tensor fed a fixed input vector.

    ``T_a A_x = sum_y N_ax^y W A_y Winv`` then holds by the MPO fusion, so the
    action table must be the fusion table.
    """
    phi = rand_c(rng, 4)
    return [np.einsum("lrpq,q->lrp", T, phi) for T in fibonacci().tensors]


class TestValidate:
    def test_trivial(self):
        cat = trivial_category()
        assert cat.d.tolist() == [1.0] and cat.D2 == 1.0
        assert cat.lambda_weights.tolist() == [1.0]

    def test_fibonacci_dimensions(self):
        cat = fibonacci_category()
        # positive root of x^2 = 1 + x
        assert abs(cat.d[1] - GOLDEN) < 1e-12
        assert abs(cat.d[1] ** 2 - 1 - cat.d[1]) < 1e-12
        assert abs(cat.D2 - (2 + GOLDEN)) < 1e-12
        assert cat.channels(1, 1) == [0, 1]
        assert cat.dual == (0, 1)

    @pytest.mark.parametrize("G", [cyclic(3), cyclic(4), symmetric(3)])
    def test_group_as_category(self, G):
        cat = group_category(G)
        assert np.array_equal(cat.d, np.ones(G.order))
        assert cat.D2 == G.order
        assert cat.dual == tuple(G.inv(g) for g in G.elements())

    def test_dimension_relations(self):
        cat = fibonacci_category()
        d, N = cat.d, cat.N
        assert np.max(np.abs(np.outer(d, d) - np.einsum("abc,c->ab", N, d))) < 1e-10
        assert np.max(np.abs(np.einsum("abc,a,b->c", N, d, d) - cat.D2 * d)) < 1e-10

    def test_multiplicity_rejected(self):
        N = np.zeros((2, 2, 2), dtype=int)
        N[0, 0, 0] = N[0, 1, 1] = N[1, 0, 1] = N[1, 1, 0] = 1
        N[1, 1, 1] = 2
        with pytest.raises(MultiplicityError):
            validate_category(N)

    def test_bad_unit(self):
        N = np.zeros((2, 2, 2), dtype=int)
        N[0, 0, 1] = 1
        with pytest.raises(CategoryError, match="unit"):
            validate_category(N)

    def test_non_associative(self):
        # 1 x 1 = 0 + 1 + 2 but 2 x 2 = 0 only: duality holds, associativity fails
        N = np.zeros((3, 3, 3), dtype=int)
        for a in range(3):
            N[0, a, a] = N[a, 0, a] = 1
        N[1, 1, [0, 1, 2]] = 1
        N[2, 2, 0] = 1
        with pytest.raises(CategoryError):
            validate_category(N)

    def test_shape(self):
        with pytest.raises(CategoryError):
            validate_category(np.ones((2, 2, 3)))

    def test_json(self):
        cat = fibonacci_category()
        back = FusionCategory.from_json(cat.to_json())
        assert np.array_equal(back.N, cat.N) and np.allclose(back.d, cat.d)
        assert back.names == ("1", "tau")


class TestFsymbol:
    def test_pentagon_free_block_is_unitary(self):
        M = np.array([[fibonacci_fsymbol(1, 1, 1, 1, e, f) for f in range(2)] for e in range(2)])
        assert np.max(np.abs(M @ M.T - np.eye(2))) < 1e-12
        assert abs(M[0, 0] - 1 / GOLDEN) < 1e-12

    def test_inadmissible_zero(self):
        assert fibonacci_fsymbol(0, 0, 0, 1, 0, 0) == 0.0


class TestFibonacciMpo:
    def test_shapes(self):
        rep = build_fibonacci_mpo()
        assert rep.d == 4 and rep.block_dims == (2, 3) and rep.chi == 5

    @pytest.mark.parametrize("L", [2, 3, 4])
    def test_dense_algebra(self, L):
        rep = build_fibonacci_mpo()
        O1, Ot = (dense_category_mpo(rep, a, L) for a in range(2))
        assert np.max(np.abs(Ot @ Ot - O1 - Ot)) < 1e-9
        assert np.max(np.abs(O1 @ Ot - Ot)) < 1e-12
        assert np.max(np.abs(O1 @ O1 - O1)) < 1e-12

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            dense_category_mpo(build_fibonacci_mpo(), 1, 7)

    def test_json(self):
        rep = build_fibonacci_mpo()
        back = CategoryMpoRep.from_json(rep.to_json())
        assert back.kind == "fibonacci"
        assert all(np.array_equal(a, b) for a, b in zip(back.tensors, rep.tensors))

    def test_tensor_count_checked(self):
        with pytest.raises(CategoryError):
            CategoryMpoRep(fibonacci_category(), (np.zeros((1, 1, 2, 2)),))


class TestChannelFusion:
    def test_both_tau_channels(self):
        rep = fibonacci()
        chans = solve_category_fusion_tensors(rep, 1, 1)
        assert sorted(chans) == [0, 1]
        assert channel_zipper_residual(rep, 1, 1) < 1e-9
        assert channel_orthogonality_residual(rep, 1, 1) < 1e-9

    def test_all_pairs(self):
        rep = fibonacci()
        for a, b in itertools.product(range(2), repeat=2):
            assert channel_zipper_residual(rep, a, b) < 1e-9
            assert channel_orthogonality_residual(rep, a, b) < 1e-9

    def test_unit_fusion_is_injection(self):
        rep = fibonacci()
        for a in range(2):
            W, Winv = rep.fusion[a, 0][a]
            prod = np.einsum("xab,aby->xy", Winv, W)
            assert np.max(np.abs(prod - np.eye(rep.block_dims[a]))) < 1e-9

    def test_recoupling(self):
        assert assoc_relation_residual(fibonacci()) < 1e-9

    def test_group_reduces_to_pair_fusion(self):
        fd = strict_onsite("Z3")
        rep = category_rep_from_group(fd)
        for g, h in itertools.product(range(3), repeat=2):
            chans = solve_category_fusion_tensors(rep, g, h)
            assert list(chans) == [fd.group.mul(g, h)]
            W, Winv = chans[fd.group.mul(g, h)]
            assert np.max(np.abs(W - fd.W[g, h])) < 1e-12
            assert np.max(np.abs(Winv - fd.Winv[g, h])) < 1e-12

    def test_missing_channel(self):
        # claim tau x tau = 1 only; the MPO product still carries tau
        rep = build_fibonacci_mpo()
        N = np.zeros((2, 2, 2), dtype=int)
        N[0, 0, 0] = N[0, 1, 1] = N[1, 0, 1] = N[1, 1, 0] = 1
        fake = CategoryMpoRep(FusionCategory(N, (0, 1), ("1", "t"), np.ones(2)), rep.tensors)
        with pytest.raises(NoSolutionError):
            solve_category_fusion_tensors(fake, 1, 1)


class TestLocalOps:
    def test_fibonacci_algebra(self):
        rep = fibonacci()
        O1, Ot = (as_matrix(local_op_category(rep, a)) for a in range(2))
        assert np.max(np.abs(Ot @ Ot - O1 - Ot)) < 1e-9
        assert np.max(np.abs(O1 @ O1 - O1)) < 1e-9

    def test_lambda_projector(self):
        rep = fibonacci()
        d = rep.category.d
        OL = as_matrix(local_lambda_op(rep))
        assert np.max(np.abs(OL @ OL - OL)) < 1e-9
        for a in range(2):
            Oa = as_matrix(local_op_category(rep, a))
            assert np.max(np.abs(Oa @ OL - d[a] * OL)) < 1e-9
            assert np.max(np.abs(OL @ Oa - d[a] * OL)) < 1e-9

    def test_structure_constants_by_least_squares(self):
        rep = fibonacci()
        ops = [as_matrix(local_op_category(rep, a)) for a in range(2)]
        basis = np.stack([o.reshape(-1) for o in ops], axis=1)
        for a, b in itertools.product(range(2), repeat=2):
            coef, *_ = np.linalg.lstsq(basis, (ops[a] @ ops[b]).reshape(-1), rcond=None)
            assert np.max(np.abs(coef - rep.category.N[a, b])) < 1e-8

    @pytest.mark.parametrize("make", [lambda: strict_onsite("S3"), anomalous_z2])
    def test_group_as_category_bitwise(self, make):
        fd = make()
        rep = category_rep_from_group(fd)
        for g in fd.group.elements():
            assert np.array_equal(local_op_category(rep, g), localized_op(fd, g))

    def test_requires_fusion(self):
        with pytest.raises(CategoryError):
            local_op_category(build_fibonacci_mpo(), 1)


class TestSymmetrize:
    def test_fibonacci_eigenvalues(self, rng):
        rep = fibonacci()
        ch = make_category_chain(rep, 2)
        leg = category_unit_vector(rep)
        assert leg is not None
        out = symmetrize_category(ch, rand_c(rng, 16), product_gauge_state(ch, leg))
        nrm = np.linalg.norm(out)
        assert nrm > 1e-6
        X = out.reshape(ch.state_shape())
        for i, a in itertools.product(range(2), range(2)):
            Y = np.moveaxis(np.tensordot(ch.local_op(a), X, axes=([3, 4, 5], ch.support(i))),
                            [0, 1, 2], ch.support(i))
            assert np.linalg.norm(Y - rep.category.d[a] * X) / nrm < 1e-8

    def test_trivial_category(self, rng):
        fd = strict_onsite("Z2")
        rep = category_rep_from_group(fd)
        rep = CategoryMpoRep(trivial_category(), (fd.rep.tensors[0],),
                             {(0, 0): {0: (fd.W[0, 0], fd.Winv[0, 0])}})
        ch = make_category_chain(rep, 2)
        psi, phi = rand_c(rng, 4), rand_c(rng, 1)
        out = symmetrize_category(ch, psi, phi)
        X = np.multiply.outer(psi, phi).reshape(ch.state_shape())
        for i in range(2):
            X = np.moveaxis(np.tensordot(ch.local_op(0), X, axes=([3, 4, 5], ch.support(i))),
                            [0, 1, 2], ch.support(i))
        assert np.max(np.abs(out - X.reshape(-1))) < 1e-12

    @pytest.mark.parametrize("make,L", [(lambda: strict_onsite("Z3"), 2), (anomalous_z2, 2)])
    def test_group_matches_anomaly_lab(self, make, L, rng):
        fd = make()
        rep = category_rep_from_group(fd)
        ch = make_category_chain(rep, L)
        sch = make_split_chain(fd, L)
        psi = rand_c(rng, ch.matter_dim)
        phi = unit_gauge_state(sch)
        a = symmetrize_category(ch, psi, phi)
        b = symmetrize_state(sch, psi, phi)
        assert np.array_equal(a, b)

    def test_dimension_mismatch(self):
        ch = make_category_chain(fibonacci(), 2)
        with pytest.raises(CategoryError):
            symmetrize_category(ch, np.ones(3), np.ones(ch.gauge_dim))

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            make_category_chain(fibonacci(), 3)


class TestActions:
    def test_fibonacci_table(self, rng):
        rep = fibonacci()
        blocks = fib_blocks(rng)
        acts = category_action_tensors(blocks, rep)
        assert np.array_equal(acts.M, rep.category.N)
        dec, orth = category_action_residual(blocks, rep, acts)
        assert dec < 1e-9 and orth < 1e-9

    def test_trivial_category(self, rng):
        fd = strict_onsite("Z2")
        rep = CategoryMpoRep(trivial_category(), (fd.rep.tensors[0],),
                             {(0, 0): {0: (fd.W[0, 0], fd.Winv[0, 0])}})
        A = rand_c(rng, 2, 2, 2)
        acts = category_action_tensors([A], rep)
        assert acts.M.tolist() == [[[1]]]

    def test_group_permutation(self, rng):
        fd = strict_onsite("Z2")
        rep = category_rep_from_group(fd)
        A0 = rand_c(rng, 2, 2, 2)
        A1 = np.einsum("pq,abq->abp", fd.rep.meta["u"][1], A0)
        acts = category_action_tensors([A0, A1], rep)
        assert np.array_equal(acts.M[1], [[0, 1], [1, 0]])
        assert np.array_equal(acts.M[0], np.eye(2))


class TestLambdaState:
    @pytest.mark.parametrize("L", [2, 3])
    def test_fibonacci_eigenpair(self, L, rng):
        rep = fibonacci()
        out = invariant_state_via_lambda(fib_blocks(rng)[1], rep, L)
        nrm = np.linalg.norm(out)
        assert nrm > 1e-6
        for a, da in enumerate((1.0, GOLDEN)):
            rel = np.linalg.norm(dense_category_mpo(rep, a, L) @ out - da * out) / nrm
            assert rel < 1e-8

    def test_group_symmetric_input(self, rng):
        fd = strict_onsite("Z2")
        rep = category_rep_from_group(fd)
        A = rand_c(rng, 2, 2, 2)
        A = A + np.einsum("pq,abq->abp", fd.rep.meta["u"][1], A)
        out = invariant_state_via_lambda(A, rep, 3)
        for g in range(2):
            assert np.max(np.abs(dense_category_mpo(rep, g, 3) @ out - out)) < 1e-9

    def test_zero_output_returned(self):
        # a charged product state is annihilated rather than rejected
        fd = strict_onsite("Z2")
        rep = category_rep_from_group(fd)
        A = np.zeros((1, 1, 2), dtype=complex)
        A[0, 0] = [1, -1]
        out = invariant_state_via_lambda(A, rep, 1)
        assert np.max(np.abs(out)) < 1e-12


def test_verify_category_fibonacci():
    rpt = verify_category(build_fibonacci_mpo(), L=3)
    assert rpt.passed, rpt.failures()
    assert abs(rpt.meta["D2"] - (2 + GOLDEN)) < 1e-12


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_lambda_absorbs_random_states(seed):
    rng = np.random.default_rng(seed)
    rep = fibonacci()
    ch = make_category_chain(rep, 2)
    OL = ch.local_op("lambda")
    X = rand_c(rng, *ch.state_shape())
    s = ch.support(0)
    once = np.moveaxis(np.tensordot(OL, X, axes=([3, 4, 5], s)), [0, 1, 2], s)
    twice = np.moveaxis(np.tensordot(OL, once, axes=([3, 4, 5], s)), [0, 1, 2], s)
    assert np.max(np.abs(twice - once)) < 1e-9 * max(1.0, np.abs(once).max())
