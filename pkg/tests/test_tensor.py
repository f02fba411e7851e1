from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mpogauge.tensor import (Tensor, TensorError, contract, dematricize, distance, matricize,
                             pseudo_inverse)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def cplx(shape):
    return st.tuples(arrays(np.float64, shape, elements=finite),
                     arrays(np.float64, shape, elements=finite)).map(lambda p: p[0] + 1j * p[1])


class TestConstruction:
    def test_rejects_duplicate_labels(self):
        with pytest.raises(TensorError):
            Tensor(np.zeros((2, 2)), ["a", "a"])

    def test_rejects_label_count(self):
        with pytest.raises(TensorError):
            Tensor(np.zeros((2, 2)), ["a"])

    def test_rejects_nonfinite(self):
        with pytest.raises(TensorError):
            Tensor(np.array([1.0, np.nan]), ["a"])

    def test_json_round_trip(self, rng):
        t = Tensor(rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)), ["x", "y"])
        back = Tensor.from_json(t.to_json())
        assert list(back.labels) == list(t.labels)
        assert np.array_equal(back.data, t.data)

    def test_json_entry_count_checked(self):
        obj = {"shape": [2, 2], "labels": ["a", "b"], "data": [[1, 0]] * 3}
        with pytest.raises(TensorError):
            Tensor.from_json(obj)


class TestContract:
    def test_identity_leaves_vector(self):
        v = Tensor([1 + 2j, -3j], ["l"])
        eye = Tensor(np.eye(2), ["l", "r"])
        out = contract(eye, v, [("r", "l")])
        assert list(out.labels) == ["l"]
        assert np.array_equal(out.data, v.data)

    def test_pauli_x_squared(self):
        X = np.array([[0, 1], [1, 0]])
        out = contract(Tensor(X, ["a", "b"]), Tensor(X, ["c", "d"]), [("b", "c")])
        assert np.array_equal(out.data, np.eye(2))

    def test_against_loop_nest(self, rng):
        a = rng.normal(size=(3, 4, 2)) + 1j * rng.normal(size=(3, 4, 2))
        b = rng.normal(size=(2, 5)) + 1j * rng.normal(size=(2, 5))
        out = contract(Tensor(a, ["i", "j", "k"]), Tensor(b, ["k2", "m"]), [("k", "k2")])
        ref = np.zeros((3, 4, 5), dtype=complex)
        for i, j, m in itertools.product(range(3), range(4), range(5)):
            for k in range(2):
                ref[i, j, m] += a[i, j, k] * b[k, m]
        assert np.max(np.abs(out.data - ref)) < 1e-12

    def test_missing_label(self):
        with pytest.raises(TensorError):
            contract(Tensor(np.eye(2), ["a", "b"]), Tensor(np.eye(2), ["c", "d"]), [("z", "c")])

    def test_extent_mismatch(self):
        with pytest.raises(TensorError):
            contract(Tensor(np.eye(2), ["a", "b"]), Tensor(np.eye(3), ["c", "d"]), [("b", "c")])

    @settings(max_examples=40, deadline=None)
    @given(cplx((2, 3)), cplx((2, 3)), cplx((3, 2)), finite, finite)
    def test_bilinear(self, a1, a2, b, alpha, beta):
        A1, A2 = Tensor(a1, ["i", "j"]), Tensor(a2, ["i", "j"])
        B = Tensor(b, ["k", "m"])
        lhs = contract(alpha * A1 + beta * A2, B, [("j", "k")]).data
        rhs = alpha * contract(A1, B, [("j", "k")]).data + beta * contract(A2, B, [("j", "k")]).data
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))

    @settings(max_examples=30, deadline=None)
    @given(cplx((2, 3)), cplx((3, 4)), cplx((4, 2)))
    def test_associative(self, a, b, c):
        A, B, C = Tensor(a, ["i", "j"]), Tensor(b, ["j2", "k"]), Tensor(c, ["k2", "m"])
        left = contract(contract(A, B, [("j", "j2")]), C, [("k", "k2")]).data
        right = contract(A, contract(B, C, [("k", "k2")]), [("j", "j2")]).data
        assert np.max(np.abs(left - right)) <= 1e-10 * max(1.0, np.max(np.abs(left)))


class TestMatricize:
    def test_shape(self):
        t = Tensor(np.zeros((2, 3, 4)), ["a", "b", "c"])
        assert matricize(t, ["a"], ["b", "c"]).shape == (2, 12)

    def test_round_trip_bitwise(self, rng):
        data = rng.normal(size=(2, 3, 4)) + 1j * rng.normal(size=(2, 3, 4))
        t = Tensor(data, ["a", "b", "c"])
        m = matricize(t, ["a"], ["b", "c"])
        back = dematricize(m, ["a"], [2], ["b", "c"], [3, 4])
        assert np.array_equal(back.data, data)

    def test_delta_has_two_unit_entries(self):
        delta = np.zeros((2, 2, 2))
        delta[0, 0, 0] = delta[1, 1, 1] = 1
        m = matricize(Tensor(delta, ["i", "j", "k"]), ["i"], ["j", "k"]).data
        assert np.count_nonzero(m) == 2
        assert m[0, 0] == 1 and m[1, 3] == 1

    def test_bad_partition(self):
        with pytest.raises(TensorError):
            matricize(Tensor(np.zeros((2, 2)), ["a", "b"]), ["a"], ["a"])


class TestPseudoInverse:
    def test_identity(self):
        out = pseudo_inverse(Tensor(np.eye(3), ["r", "c"]))
        assert np.array_equal(out.data, np.eye(3))

    def test_diagonal(self):
        out = pseudo_inverse(Tensor(np.diag([2.0, 0.0]), ["r", "c"]))
        assert np.allclose(out.data, np.diag([0.5, 0.0]), atol=0)

    def test_penrose_rank3(self, rng):
        M = (rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))) @ (
            rng.normal(size=(3, 6)) + 1j * rng.normal(size=(3, 6)))
        P = pseudo_inverse(Tensor(M, ["r", "c"])).data
        scale = np.linalg.norm(M)
        assert np.linalg.norm(M @ P @ M - M) < 1e-10 * scale
        assert np.linalg.norm(P @ M @ P - P) < 1e-10 * np.linalg.norm(P)
        assert np.linalg.norm((M @ P).conj().T - M @ P) < 1e-10
        assert np.linalg.norm((P @ M).conj().T - P @ M) < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(cplx((3, 3)))
    def test_full_rank_inverse(self, m):
        if np.linalg.cond(m) > 1e6:
            return
        P = pseudo_inverse(Tensor(m, ["r", "c"])).data
        assert np.max(np.abs(P @ m - np.eye(3))) < 1e-10 * np.linalg.cond(m)


class TestDistance:
    def test_self(self, rng):
        t = Tensor(rng.normal(size=(2, 2)), ["a", "b"])
        assert distance(t, t) == 0.0

    def test_unit_entry(self):
        z = Tensor(np.zeros((2, 2)), ["a", "b"])
        e = np.zeros((2, 2))
        e[1, 0] = 1
        assert distance(z, Tensor(e, ["a", "b"])) == 1.0

    def test_loop_oracle(self, rng):
        a = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        b = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        ref = np.sqrt(sum(abs(a[i, j] - b[i, j]) ** 2 for i in range(3) for j in range(2)))
        assert abs(distance(Tensor(a, ["x", "y"]), Tensor(b, ["x", "y"])) - ref) < 1e-12

    def test_aligns_labels(self, rng):
        a = rng.normal(size=(3, 2))
        assert distance(Tensor(a, ["x", "y"]), Tensor(a.T, ["y", "x"])) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(TensorError):
            distance(Tensor(np.zeros((2, 2)), ["a", "b"]), Tensor(np.zeros((2, 3)), ["a", "b"]))
