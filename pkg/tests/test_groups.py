from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpogauge.groups import (CocycleError, FiniteGroup, GroupError, check_cocycle2, check_cocycle3,
                             coboundary2, coboundary3, coboundary_trivialize, cocycle3_from_json,
                             cocycle3_to_json, cyclic, cyclic_cocycle3, dihedral, direct_product,
                             is_normal, is_subgroup, make_group, normalize_cocycle3, quotient,
                             symmetric, trivial_cocycle3, trivialize2)

CONSTRUCTED = {
    "Z1": cyclic(1), "Z2": cyclic(2), "Z3": cyclic(3), "Z4": cyclic(4), "Z6": cyclic(6),
    "D4": dihedral(4), "S3": symmetric(3), "Z2xZ2": direct_product(cyclic(2), cyclic(2)),
}


def all_subgroups(G: FiniteGroup):
    """Brute force: every subset closed under the product."""
    out = []
    rest = [g for g in G.elements() if g != 0]
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            s = {0, *extra}
            if all(G.mul(a, b) in s for a in s for b in s):
                out.append(frozenset(s))
    return out


def pentagon_violations(G, w):
    bad = []
    for g, h, k, l in itertools.product(G.elements(), repeat=4):
        lhs = w[g, h, k] * w[g, G.mul(h, k), l] * w[h, k, l]
        rhs = w[G.mul(g, h), k, l] * w[g, h, G.mul(k, l)]
        if abs(lhs - rhs) > 1e-10:
            bad.append((g, h, k, l))
    return bad


class TestConstructors:
    def test_trivial_group(self):
        G = cyclic(1)
        assert G.order == 1 and G.mul(0, 0) == 0 and G.inv(0) == 0

    def test_z2_table(self):
        assert cyclic(2).table.tolist() == [[0, 1], [1, 0]]

    def test_s3_has_one_normal_subgroup_of_order_three(self):
        G = symmetric(3)
        assert G.order == 6 and not G.is_abelian()
        order3 = [s for s in all_subgroups(G) if len(s) == 3]
        normal3 = [s for s in order3 if all(G.conj(g, x) in s for g in G.elements() for x in s)]
        assert len(normal3) == 1
        assert normal3[0] == frozenset({0, 3, 4})

    def test_s3_subgroup_lattice(self):
        G = symmetric(3)
        subs = all_subgroups(G)
        assert sorted(len(s) for s in subs) == [1, 2, 2, 2, 3, 6]
        normal = {s for s in subs if is_normal(G, sorted(s))}
        assert normal == {frozenset({0}), frozenset({0, 3, 4}), frozenset(range(6))}

    def test_dihedral_order(self):
        assert dihedral(4).order == 8 and not dihedral(4).is_abelian()

    @pytest.mark.parametrize("name", sorted(CONSTRUCTED))
    def test_inverse_of_product(self, name):
        G = CONSTRUCTED[name]
        for g, h in itertools.product(G.elements(), repeat=2):
            assert G.inv(G.mul(g, h)) == G.mul(G.inv(h), G.inv(g))
            assert G.mul(G.inv(g), g) == 0

    def test_json_round_trip(self):
        G = symmetric(3)
        H = FiniteGroup.from_json(G.to_json())
        assert H == G and H.names == G.names


class TestValidation:
    def test_not_associative(self):
        # Latin square with identity 0 that is not a group
        tab = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
        with pytest.raises(GroupError, match="associative"):
            make_group(tab)

    def test_no_identity(self):
        with pytest.raises(GroupError, match="identity"):
            make_group([[1, 0], [0, 1]])

    def test_not_invertible(self):
        with pytest.raises(GroupError, match="invertible"):
            make_group([[0, 1], [1, 1]])

    def test_out_of_range(self):
        with pytest.raises(GroupError):
            make_group([[0, 2], [1, 0]])

    def test_declared_order_mismatch(self):
        obj = cyclic(2).to_json()
        obj["order"] = 3
        with pytest.raises(GroupError):
            FiniteGroup.from_json(obj)


class TestCocycleCheck:
    def test_trivial(self):
        assert check_cocycle3(cyclic(3), trivial_cocycle3(cyclic(3)))

    def test_sign_cocycle_z2(self):
        G = cyclic(2)
        w = np.array([[[(-1.0) ** (g * h * k) for k in range(2)] for h in range(2)] for g in range(2)])
        assert pentagon_violations(G, w) == []
        assert check_cocycle3(G, w)
        assert np.max(np.abs(cyclic_cocycle3(2, 1) - w)) < 1e-15

    def test_broken_z2(self):
        G = cyclic(2)
        w = np.ones((2, 2, 2), dtype=complex)
        w[1, 1, 1] = 1j
        assert pentagon_violations(G, w)
        assert not check_cocycle3(G, w)

    def test_non_unit_modulus_rejected(self):
        w = 2 * np.ones((2, 2, 2))
        assert not check_cocycle3(cyclic(2), w)

    @pytest.mark.parametrize("n,p", [(3, 1), (3, 2), (4, 1), (4, 3), (6, 1)])
    def test_cyclic_representatives(self, n, p):
        G = cyclic(n)
        w = cyclic_cocycle3(n, p)
        assert pentagon_violations(G, w) == []

    def test_json_round_trip(self):
        w = cyclic_cocycle3(3, 1)
        assert np.array_equal(cocycle3_from_json(cocycle3_to_json(w), cyclic(3)), w)

    def test_json_bad_shape(self):
        with pytest.raises(CocycleError):
            cocycle3_from_json([[1, 0]])


def exhaust_fourth_roots_z2(w):
    """All 4^4 cochains with values in {1, i, -1, -i}."""
    G = cyclic(2)
    roots = [1, 1j, -1, -1j]
    hits = []
    for vals in itertools.product(roots, repeat=4):
        beta = np.array(vals, dtype=complex).reshape(2, 2)
        if np.max(np.abs(coboundary3(G, beta) - w)) < 1e-12:
            hits.append(beta)
    return hits


class TestTrivialize:
    def test_trivial_cocycle(self):
        G = cyclic(3)
        beta = coboundary_trivialize(G, trivial_cocycle3(G))
        assert beta is not None
        assert np.max(np.abs(coboundary3(G, beta) - 1)) < 1e-9

    def test_sign_cocycle_is_nontrivial(self):
        w = cyclic_cocycle3(2, 1)
        assert exhaust_fourth_roots_z2(w) == []
        assert coboundary_trivialize(cyclic(2), w) is None

    def test_exhaustive_search_finds_coboundaries(self):
        # the fourth-root search is not vacuous: it finds trivializers when they exist
        beta0 = np.array([[1, 1j], [-1, -1j]])
        w = coboundary3(cyclic(2), beta0)
        assert exhaust_fourth_roots_z2(w)
        assert coboundary_trivialize(cyclic(2), w) is not None

    @pytest.mark.parametrize("n,p", [(3, 1), (3, 2), (4, 1)])
    def test_cyclic_classes_nontrivial(self, n, p):
        assert coboundary_trivialize(cyclic(n), cyclic_cocycle3(n, p)) is None

    def test_cyclic_class_zero_is_trivial(self):
        assert coboundary_trivialize(cyclic(3), cyclic_cocycle3(3, 3)) is not None

    def test_ninth_root_round_trip_z3(self, rng):
        G = cyclic(3)
        beta0 = np.exp(2j * np.pi * rng.integers(0, 9, size=(3, 3)) / 9)
        w = coboundary3(G, beta0)
        beta = coboundary_trivialize(G, w)
        assert beta is not None
        assert np.max(np.abs(coboundary3(G, beta) - w)) < 1e-9

    def test_rejects_non_cocycle(self):
        w = np.ones((2, 2, 2), dtype=complex)
        w[1, 1, 1] = 1j
        with pytest.raises(CocycleError):
            coboundary_trivialize(cyclic(2), w)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_decision_on_random_coboundaries(self, n):
        G = cyclic(n)
        rng = np.random.default_rng(100 + n)
        for _ in range(334):
            beta0 = np.exp(2j * np.pi * rng.uniform(size=(n, n)))
            w = coboundary3(G, beta0)
            beta = coboundary_trivialize(G, w)
            assert beta is not None
            assert np.max(np.abs(coboundary3(G, beta) - w)) < 1e-9

    def test_nonabelian_random_coboundary(self, rng):
        G = symmetric(3)
        beta0 = np.exp(2j * np.pi * rng.uniform(size=(6, 6)))
        w = coboundary3(G, beta0)
        beta = coboundary_trivialize(G, w)
        assert beta is not None
        assert np.max(np.abs(coboundary3(G, beta) - w)) < 1e-9

    def test_normalize_keeps_class(self):
        G = cyclic(3)
        w = cyclic_cocycle3(3, 1) * coboundary3(G, np.exp(1j * np.arange(9).reshape(3, 3)))
        wn, beta = normalize_cocycle3(G, w)
        assert np.max(np.abs(wn * coboundary3(G, beta) - w)) < 1e-12
        assert np.max(np.abs(wn[0, :, :] - 1)) < 1e-12
        assert np.max(np.abs(wn[:, 0, :] - 1)) < 1e-12
        assert np.max(np.abs(wn[:, :, 0] - 1)) < 1e-12


class TestTwoCocycles:
    def test_z2xz2_projective_class(self):
        G = direct_product(cyclic(2), cyclic(2))
        # Pauli phases: X Z = -Z X
        c = np.ones((4, 4), dtype=complex)
        for g, h in itertools.product(range(4), repeat=2):
            c[g, h] = (-1) ** ((g % 2) * (h // 2))
        assert check_cocycle2(G, c)
        assert trivialize2(G, c) is None

    def test_coboundary_trivialized(self, rng):
        G = direct_product(cyclic(2), cyclic(2))
        gamma = np.exp(2j * np.pi * rng.uniform(size=4))
        w = coboundary2(G, gamma)
        out = trivialize2(G, w)
        assert out is not None
        assert np.max(np.abs(coboundary2(G, out) - w)) < 1e-9


class TestQuotient:
    def test_z4_mod_z2(self):
        Q, coset = quotient(cyclic(4), [0, 2])
        assert Q == cyclic(2)
        assert coset.tolist() == [0, 1, 0, 1]

    def test_s3_mod_a3(self):
        G = symmetric(3)
        Q, coset = quotient(G, [0, 3, 4])
        # brute-force coset table
        cosets = {frozenset(G.mul(g, n) for n in (0, 3, 4)) for g in G.elements()}
        assert len(cosets) == 2 and Q.order == 2
        for g, h in itertools.product(G.elements(), repeat=2):
            assert coset[G.mul(g, h)] == Q.mul(coset[g], coset[h])

    def test_s3_transposition_not_normal(self):
        G = symmetric(3)
        assert G.names[1] == "021"
        assert is_subgroup(G, [0, 1]) and not is_normal(G, [0, 1])
        with pytest.raises(GroupError, match="normal"):
            quotient(G, [0, 1])

    def test_not_subgroup(self):
        with pytest.raises(GroupError, match="subgroup"):
            quotient(cyclic(4), [0, 1])


cochain_phases = st.lists(st.floats(0, 1, allow_nan=False), min_size=9, max_size=9)


@settings(max_examples=50, deadline=None)
@given(cochain_phases)
def test_coboundaries_are_cocycles(phases):
    G = cyclic(3)
    beta = np.exp(2j * np.pi * np.array(phases)).reshape(3, 3)
    assert check_cocycle3(G, coboundary3(G, beta))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(sorted(CONSTRUCTED)), st.data())
def test_quotient_is_homomorphism(name, data):
    G = CONSTRUCTED[name]
    normals = [sorted(s) for s in all_subgroups(G) if is_normal(G, sorted(s))]
    N = data.draw(st.sampled_from(normals))
    Q, coset = quotient(G, N)
    assert Q.order * len(N) == G.order
    for g, h in itertools.product(G.elements(), repeat=2):
        assert coset[G.mul(g, h)] == Q.mul(coset[g], coset[h])
