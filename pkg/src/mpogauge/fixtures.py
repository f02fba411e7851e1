"""Named fixtures shared by the tests, the scripts and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup, cyclic, cyclic_cocycle3, direct_product, symmetric, trivial_cocycle3
from .mpo import MpoGroupRep, build_anomalous_mpo, build_onsite_mpo, diagonal_rep, regular_rep
from .mps import twirl_tensor

__all__ = [
    "FixtureError",
    "ONSITE_FIXTURES",
    "parse_group",
    "parse_rep",
    "onsite_fixture",
    "anomalous_fixture",
    "MpsFixture",
    "mps_fixture",
    "MPS_FIXTURES",
    "random_complex",
]

ONSITE_FIXTURES = ("Z2", "Z3", "Z4", "S3")
MPS_FIXTURES = ("Z2-linear", "Z3-linear", "Z2xZ2-projective")

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Z = np.diag([1.0, -1.0]).astype(np.complex128)


class FixtureError(ValueError):
    pass


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def parse_group(name: str) -> FiniteGroup:
    """``Zn``, ``S3`` (or ``Sm``) and ``Z2xZ2``-style direct products."""
    name = name.strip()
    if "x" in name:
        parts = [parse_group(p) for p in name.split("x")]
        G = parts[0]
        for H in parts[1:]:
            G = direct_product(G, H)
        return G
    try:
        if name[0] in "Zz":
            n = int(name[1:])
            if n < 1:
                raise ValueError
            return cyclic(n)
        if name[0] in "Ss":
            m = int(name[1:])
            if m < 1 or m > 4:
                raise ValueError
            return symmetric(m)
    except (ValueError, IndexError):
        pass
    raise FixtureError(f"unknown group {name!r}")


def parse_rep(G: FiniteGroup, spec: str) -> np.ndarray:
    """``regular`` or ``diag:x1,x2,...`` (generator eigenvalues, cyclic groups only)."""
    spec = spec.strip()
    if spec == "regular":
        return regular_rep(G)
    if spec.startswith("diag:"):
        try:
            vals = [complex(x) for x in spec[5:].split(",") if x]
        except ValueError as exc:
            raise FixtureError(f"bad diagonal entries in {spec!r}") from exc
        if not vals:
            raise FixtureError("diag: needs at least one entry")
        return diagonal_rep(G, vals)
    raise FixtureError(f"unknown representation {spec!r}")


def onsite_fixture(name: str) -> MpoGroupRep:
    """Regular representation of the named group (``d = |G|``)."""
    if name not in ONSITE_FIXTURES:
        raise FixtureError(f"unknown on-site fixture {name!r}")
    G = parse_group(name)
    return build_onsite_mpo(G, regular_rep(G))


def anomalous_fixture(n: int = 2, p: int = 1) -> MpoGroupRep:
    """Double-line ``Z_n`` MPO for the cocycle of level ``p`` (``p = 0`` is trivial)."""
    G = cyclic(n)
    w = cyclic_cocycle3(n, p) if p % n else trivial_cocycle3(G)
    return build_anomalous_mpo(G, w)


@dataclass(frozen=True)
class MpsFixture:
    name: str
    rep: MpoGroupRep
    A: np.ndarray
    V: np.ndarray
    projective: bool


def mps_fixture(name: str, seed: int = 1, D: int = 2) -> MpsFixture:
    """Random symmetric MPS obtained by twirling a random tensor."""
    rng = np.random.default_rng(seed)
    if name == "Z2-linear":
        G = cyclic(2)
        u = diagonal_rep(G, [1, -1, -1, 1])
        V = np.stack([np.eye(2), _PAULI_Z])
        proj = False
    elif name == "Z3-linear":
        G = cyclic(3)
        u = regular_rep(G)
        w = np.exp(2j * np.pi / 3)
        V = np.stack([np.diag([1, w**k]) for k in range(3)])
        proj = False
    elif name == "Z2xZ2-projective":
        G = direct_product(cyclic(2), cyclic(2))
        Vs = [np.linalg.matrix_power(_PAULI_X, g // 2) @ np.linalg.matrix_power(_PAULI_Z, g % 2)
              for g in G.elements()]
        u = np.stack([np.kron(v, v.conj()) for v in Vs])
        V = np.stack(Vs)
        proj = True
    else:
        raise FixtureError(f"unknown MPS fixture {name!r}")
    if D != V.shape[1]:
        raise FixtureError(f"fixture {name} has bond dimension {V.shape[1]}")
    A = twirl_tensor(random_complex(rng, D, D, u.shape[1]), u, V)
    return MpsFixture(name, build_onsite_mpo(G, u), A, V, proj)
