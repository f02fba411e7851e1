from __future__ import annotations

import numpy as np
import pytest

from mpogauge.fixtures import (MPS_FIXTURES, ONSITE_FIXTURES, FixtureError, anomalous_fixture,
                               mps_fixture, onsite_fixture, parse_group, parse_rep)
from mpogauge.mpo import dense_mpo
from mpogauge.mps import mps_dense


@pytest.mark.parametrize("name,order", [("Z1", 1), ("Z5", 5), ("S3", 6), ("Z2xZ2", 4),
                                        ("Z2xZ3", 6), ("s3", 6)])
def test_parse_group(name, order):
    assert parse_group(name).order == order


@pytest.mark.parametrize("name", ["Z0", "Q8", "", "S9", "Zx"])
def test_parse_group_rejects(name):
    with pytest.raises(FixtureError):
        parse_group(name)


def test_parse_rep():
    G = parse_group("Z2")
    u = parse_rep(G, "diag:1,-1")
    assert np.array_equal(u[1], np.diag([1, -1]))
    assert parse_rep(G, "regular").shape == (2, 2, 2)
    for bad in ("diag:", "diag:a,b", "spin"):
        with pytest.raises(FixtureError):
            parse_rep(G, bad)


@pytest.mark.parametrize("name", ONSITE_FIXTURES)
def test_onsite_fixtures_are_onsite(name):
    rep = onsite_fixture(name)
    assert rep.is_onsite() and rep.d == rep.group.order


def test_unknown_fixture():
    with pytest.raises(FixtureError):
        onsite_fixture("Z7")


def test_anomalous_dimensions():
    rep = anomalous_fixture(3, 1)
    assert rep.d == 9 and rep.block_dims == (3, 3, 3)


@pytest.mark.parametrize("name", MPS_FIXTURES)
def test_mps_fixtures_symmetric(name):
    fx = mps_fixture(name)
    psi = mps_dense(fx.A, 2)
    for g in fx.rep.group.elements():
        assert np.max(np.abs(dense_mpo(fx.rep, g, 2) @ psi - psi)) < 1e-10
    assert fx.projective == (name == "Z2xZ2-projective")


def test_mps_fixture_seeded():
    a, b = mps_fixture("Z3-linear", seed=4), mps_fixture("Z3-linear", seed=4)
    assert np.array_equal(a.A, b.A)
    assert not np.array_equal(a.A, mps_fixture("Z3-linear", seed=5).A)
