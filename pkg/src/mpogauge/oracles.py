"""Dense brute-force references that avoid the tensor-network pipeline.

Nothing here reads MPO tensors, fusion tensors or local operators.  The
inputs are the group table and the representation matrices, and every map
is written as an explicit sum over group labels.
"""

from __future__ import annotations

import itertools
from functools import reduce

import numpy as np

from .groups import FiniteGroup

__all__ = [
    "OracleError",
    "kron_all",
    "dense_onsite_symmetry",
    "direct_onsite_gauging",
    "dense_group_law_residual",
    "charge_projector",
    "direct_subgroup_gauging",
]

ORACLE_CAP = 2**16


class OracleError(ValueError):
    pass


def kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats, np.ones((1, 1), dtype=np.complex128))


def dense_onsite_symmetry(u: np.ndarray, g: int, L: int) -> np.ndarray:
    """``u_g`` on every one of ``L`` sites."""
    return kron_all([u[g]] * L)


def dense_group_law_residual(G: FiniteGroup, u: np.ndarray, L: int) -> float:
    U = [dense_onsite_symmetry(u, g, L) for g in G.elements()]
    return max(float(np.max(np.abs(U[g] @ U[h] - U[G.mul(g, h)])))
               for g in G.elements() for h in G.elements())


def charge_projector(G: FiniteGroup, u: np.ndarray, L: int) -> np.ndarray:
    """Projector onto the invariant subspace, ``(1/|G|) sum_g U_g``."""
    return sum(dense_onsite_symmetry(u, g, L) for g in G.elements()) / G.order


def _edge_basis(labels, n: int) -> np.ndarray:
    vec = np.ones(1, dtype=np.complex128)
    for k in labels:
        e = np.zeros(n, dtype=np.complex128)
        e[k] = 1.0
        vec = np.kron(vec, e)
    return vec


def direct_onsite_gauging(G: FiniteGroup, u: np.ndarray, L: int,
                          blocks=None) -> np.ndarray:
    """Gauging map of an on-site symmetry as an explicit sum over ``{g_i}``.

    ``G psi = |G|^-L sum_{g_i} (u_{g_0} (x) ... (x) u_{g_{L-1}}) psi (x) |g_0 g_1^-1> ... |g_{L-1} g_0^-1>``

    The edge after site ``i`` holds ``g_i g_{i+1}^-1``.  ``blocks`` restricts
    the labels to a normal subgroup (edge basis ordered as listed).  Returns
    a matrix of shape ``(d^L n^L, d^L)``, matter factor first.
    """
    u = np.asarray(u, dtype=np.complex128)
    d = u.shape[1]
    blocks = list(G.elements()) if blocks is None else [int(b) for b in blocks]
    pos = {b: k for k, b in enumerate(blocks)}
    n = len(blocks)
    if d**L * n**L > ORACLE_CAP:
        raise OracleError(f"dense size {d**L * n**L} exceeds {ORACLE_CAP}")
    out = np.zeros((d**L * n**L, d**L), dtype=np.complex128)
    for gs in itertools.product(blocks, repeat=L):
        U = kron_all([u[g] for g in gs])
        edges = [pos[G.mul(gs[i], G.inv(gs[(i + 1) % L]))] for i in range(L)]
        e = _edge_basis(edges, n)
        out += np.kron(U, e[:, None])
    return out / n**L


def direct_subgroup_gauging(G: FiniteGroup, u: np.ndarray, L: int, N) -> np.ndarray:
    return direct_onsite_gauging(G, u, L, blocks=sorted(set(int(x) for x in N)))
