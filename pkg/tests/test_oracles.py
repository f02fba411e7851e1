from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_c
from mpogauge.groups import cyclic, symmetric
from mpogauge.mpo import diagonal_rep, regular_rep
from mpogauge.oracles import (OracleError, charge_projector, dense_group_law_residual,
                              dense_onsite_symmetry, direct_onsite_gauging, direct_subgroup_gauging,
                              kron_all)


def test_kron_all_empty_and_order():
    assert np.array_equal(kron_all([]), np.ones((1, 1)))
    a, b = np.diag([1, 2]), np.array([[0, 1], [1, 0]])
    assert np.array_equal(kron_all([a, b]), np.kron(a, b))


def test_group_law_exact_for_regular_reps():
    for G in (cyclic(3), symmetric(3)):
        assert dense_group_law_residual(G, regular_rep(G), 2) == 0.0


def test_group_law_flags_non_representation():
    G = cyclic(3)
    assert dense_group_law_residual(G, diagonal_rep(G, [1, 1j]), 1) > 0.5


@pytest.mark.parametrize("n,L", [(2, 2), (3, 2), (2, 3)])
def test_charge_projector_rank(n, L):
    # regular rep: invariant subspace dimension is the number of orbits, n^(L-1)
    G = cyclic(n)
    P = charge_projector(G, regular_rep(G), L)
    assert np.max(np.abs(P @ P - P)) < 1e-12
    assert round(np.trace(P).real) == n ** (L - 1)


def test_single_site_gauging():
    # one site: the only edge label is g g^-1 = e
    G = cyclic(3)
    u = regular_rep(G)
    M = direct_onsite_gauging(G, u, 1)
    assert M.shape == (9, 3)
    ref = np.kron(charge_projector(G, u, 1), np.eye(3)[:, [0]])
    assert np.max(np.abs(M - ref)) < 1e-12


def test_gauging_z2_diag_basis_state():
    # |00> with u_1 = Z: all sign patterns agree, so the edges record g_0 g_1^-1 twice
    G = cyclic(2)
    u = diagonal_rep(G, [1, -1])
    M = direct_onsite_gauging(G, u, 2)
    out = M[:, 0].reshape(2, 2, 2, 2)  # matter, matter, edge, edge
    assert abs(out[0, 0, 0, 0] - 0.5) < 1e-12 and abs(out[0, 0, 1, 1] - 0.5) < 1e-12
    assert abs(np.linalg.norm(out) - np.sqrt(0.5)) < 1e-12


def test_trivial_subgroup_appends_unit_edges(rng):
    G = symmetric(3)
    u = regular_rep(G)
    psi = rand_c(rng, 36)
    out = direct_subgroup_gauging(G, u, 2, [0]) @ psi
    assert np.max(np.abs(out - psi)) < 1e-12


def test_cap():
    G = cyclic(4)
    with pytest.raises(OracleError):
        direct_onsite_gauging(G, regular_rep(G), 5)


def test_onsite_symmetry_is_kron_power():
    G = cyclic(2)
    u = regular_rep(G)
    assert np.array_equal(dense_onsite_symmetry(u, 1, 3), np.kron(np.kron(u[1], u[1]), u[1]))


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 3), st.integers(0, 10_000))
def test_gauged_matter_marginal_is_invariant(n, seed):
    # summing out edge labels from the oracle output gives a combination of U_g psi
    G = cyclic(n)
    u = regular_rep(G)
    psi = rand_c(np.random.default_rng(seed), n**2)
    out = (direct_onsite_gauging(G, u, 2) @ psi).reshape(n**2, n**2)
    total = out.sum(axis=1)
    ref = sum(np.kron(u[a], u[b]) @ psi for a, b in itertools.product(range(n), repeat=2)) / n**2
    assert np.max(np.abs(total - ref)) < 1e-12
