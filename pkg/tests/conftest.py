from __future__ import annotations

from dataclasses import replace
from functools import lru_cache

import numpy as np
import pytest

from mpogauge.category import build_fibonacci_mpo, solve_category_fusion
from mpogauge.fixtures import anomalous_fixture, onsite_fixture
from mpogauge.fusion import prepare_strict, solve_fusion, solve_unit_vector
from mpogauge.groups import cyclic
from mpogauge.mpo import build_onsite_mpo, diagonal_rep


@lru_cache(maxsize=None)
def strict_onsite(name: str):
    return prepare_strict(onsite_fixture(name))


@lru_cache(maxsize=None)
def z2_diag():
    G = cyclic(2)
    return prepare_strict(build_onsite_mpo(G, diagonal_rep(G, [1, -1])))


@lru_cache(maxsize=None)
def anomalous_z2():
    fd = solve_fusion(anomalous_fixture(2, 1))
    return replace(fd, v=solve_unit_vector(fd))


@lru_cache(maxsize=None)
def fibonacci():
    return solve_category_fusion(build_fibonacci_mpo())


def rand_c(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
