"""Gauging of non-anomalous MPO symmetries on a ring of ``L`` sites.

Hilbert space layout
--------------------
The full space is ``(C^d)^{(x) L}  (x)  E^{(x) L}`` with the matter sites first.
Edge ``i`` sits to the right of site ``i`` (and to the left of site
``i + 1 mod L``).  Each edge carries the graded space ``E = (+)_g C^{chi_g}``
restricted to the blocks of a chosen set of group elements (all of ``G`` for
full gauging, a normal subgroup ``N`` for partial gauging).

As arrays, states are kept with shape ``(d,)*L + (chi,)*L`` optionally
followed by one batch axis, so that local operators can be applied without
ever forming a global matrix.

Local symmetry operator at site ``i`` (acting on edge ``i-1``, site ``i`` and
edge ``i``), in the basis ``(left edge, site, right edge)``::

    <a', p', b'| u_g |a, p, b> = sum_{h,k} Winv[h g^-1, g][a; a', x]
                                 T_g[x, y, p', p] W[g, k][y, b; b']

with ``a`` in block ``h``, ``a'`` in block ``h g^-1``, ``b`` in block ``k``
and ``b'`` in block ``g k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fusion import AnomalousError, FusionData
from .groups import FiniteGroup, GroupError, is_normal
from .mpo import DENSE_MATRIX_CAP, SizeGuardError, chain_dense
from .reports import Report, default_tol

__all__ = [
    "GaugingError",
    "STATE_CAP",
    "GaugeChain",
    "make_chain",
    "local_symmetry_op",
    "apply_local",
    "apply_local_projector",
    "apply_projector",
    "global_projector",
    "embed_local",
    "neighbor_commutator",
    "check_neighbor_commutation",
    "gauge_input",
    "gauge_state",
    "gauging_matrix",
    "gauging_matrix_direct",
    "gauge_operator",
    "gauge_subgroup",
    "quotient_symmetry_op",
    "is_annihilated",
    "ANNIHILATION_TOL",
]

STATE_CAP = 2**16
ANNIHILATION_TOL = 1e-9


class GaugingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GaugeChain:
    """Fusion data, ring length, and the group elements graded on the edges."""

    fusion: FusionData
    L: int
    blocks: tuple
    local_ops: dict = field(default_factory=dict, repr=False)

    @property
    def group(self) -> FiniteGroup:
        return self.fusion.group

    @property
    def d(self) -> int:
        return self.fusion.rep.d

    @property
    def edge_dim(self) -> int:
        return int(sum(self.fusion.rep.block_dims[g] for g in self.blocks))

    @property
    def matter_dim(self) -> int:
        return self.d ** self.L

    @property
    def dim(self) -> int:
        return self.matter_dim * self.edge_dim ** self.L

    def offset(self, g: int) -> int:
        off = 0
        for x in self.blocks:
            if x == g:
                return off
            off += self.fusion.rep.block_dims[x]
        raise GaugingError(f"block {g} is not graded on the edges")

    def block(self, g: int) -> slice:
        o = self.offset(g)
        return slice(o, o + self.fusion.rep.block_dims[g])

    def state_shape(self) -> tuple:
        return (self.d,) * self.L + (self.edge_dim,) * self.L

    def unit_edge_vector(self) -> np.ndarray:
        if self.fusion.v is None:
            raise GaugingError("unit vector missing from fusion data")
        e = np.zeros(self.edge_dim, dtype=np.complex128)
        e[self.block(0)] = self.fusion.v
        return e

    def local_op(self, g: int) -> np.ndarray:
        """Cached six-leg array of the local operator (out legs first)."""
        if g not in self.local_ops:
            self.local_ops[g] = _build_local(self, g)
        return self.local_ops[g]


def make_chain(fusion: FusionData, L: int, subgroup: Optional[Sequence[int]] = None,
               allow_anomalous: bool = False) -> GaugeChain:
    """Validate inputs and build a :class:`GaugeChain`.

    ``allow_anomalous`` skips the strict-gauge requirement; only diagnostic
    routines (such as the neighbour commutator) are meaningful then.
    """
    if L < 2:
        raise GaugingError("the ring needs at least two sites")
    if not fusion.strict and not allow_anomalous:
        if fusion.omega is not None and np.max(np.abs(fusion.omega - 1)) > 1e-9:
            raise AnomalousError("gauging needs fusion data in the strict (omega == 1) gauge")
        raise GaugingError("fusion data has not been gauge fixed")
    G = fusion.group
    if subgroup is None:
        blocks = tuple(G.elements())
    else:
        blocks = tuple(sorted(set(int(x) for x in subgroup)))
        if not is_normal(G, blocks):
            raise GroupError(f"{list(blocks)} is not a normal subgroup")
    chain = GaugeChain(fusion, L, blocks)
    if chain.matter_dim * chain.edge_dim ** L > STATE_CAP:
        raise SizeGuardError(
            f"state dimension {chain.matter_dim * chain.edge_dim ** L} exceeds {STATE_CAP}")
    return chain


# ---------------------------------------------------------------------------
# local operators

def _build_local(chain: GaugeChain, g: int) -> np.ndarray:
    fd = chain.fusion
    G = fd.group
    chi, d = chain.edge_dim, chain.d
    U = np.zeros((chi, d, chi, chi, d, chi), dtype=np.complex128)
    gi = G.inv(g)
    Tg = fd.rep.tensors[g]
    for h in chain.blocks:
        hg = G.mul(h, gi)
        # left half: Winv[h g^-1, g][a; a', x]
        left = fd.Winv[hg, g]
        for k in chain.blocks:
            gk = G.mul(g, k)
            right = fd.W[g, k]
            blockop = np.einsum("aex,xyqp,ybf->eqfapb", left, Tg, right, optimize=True)
            U[chain.block(hg), :, chain.block(gk), chain.block(h), :, chain.block(k)] += blockop
    return U


def local_symmetry_op(chain: GaugeChain, g: int, i: int = 0) -> np.ndarray:
    """Matrix of the local symmetry operator on (edge i-1, site i, edge i).

    The operator is translation invariant, so ``i`` only selects the support.
    """
    if not 0 <= i < chain.L:
        raise GaugingError(f"site {i} out of range")
    U = chain.local_op(g)
    n = chain.edge_dim ** 2 * chain.d
    return U.reshape(n, n)


def _support(chain: GaugeChain, i: int) -> list:
    L = chain.L
    return [L + (i - 1) % L, i, L + i]


def apply_local(chain: GaugeChain, op6: np.ndarray, i: int, X: np.ndarray) -> np.ndarray:
    """Apply a six-leg local operator at site ``i`` to a state tensor."""
    axes = _support(chain, i)
    Y = np.tensordot(op6, X, axes=([3, 4, 5], axes))
    return np.moveaxis(Y, [0, 1, 2], axes)


def _local_projector(chain: GaugeChain) -> np.ndarray:
    key = "projector"
    if key not in chain.local_ops:
        ops = [chain.local_op(n) for n in chain.blocks]
        chain.local_ops[key] = sum(ops) / len(ops)
    return chain.local_ops[key]


def apply_local_projector(chain: GaugeChain, i: int, X: np.ndarray) -> np.ndarray:
    return apply_local(chain, _local_projector(chain), i, X)


def apply_projector(chain: GaugeChain, X: np.ndarray, order: Optional[Sequence[int]] = None) -> np.ndarray:
    """Product of the local projectors, applied in ``order`` (default left to right)."""
    order = range(chain.L) if order is None else order
    for i in order:
        X = apply_local_projector(chain, i, X)
    return X


def _as_tensor(chain: GaugeChain, vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.complex128)
    batch = vec.shape[1:] if vec.ndim > 1 else ()
    if vec.shape[0] != chain.dim:
        raise GaugingError(f"vector of dimension {vec.shape[0]}, expected {chain.dim}")
    return vec.reshape(chain.state_shape() + batch)


def _as_vector(chain: GaugeChain, X: np.ndarray) -> np.ndarray:
    nfree = X.ndim - 2 * chain.L
    return X.reshape((chain.dim,) + X.shape[X.ndim - nfree:] if nfree else (chain.dim,))


def embed_local(chain: GaugeChain, op6: np.ndarray, i: int) -> np.ndarray:
    """Dense full-space matrix of a local operator (size guarded)."""
    if chain.dim > DENSE_MATRIX_CAP:
        raise SizeGuardError(f"dense operator of dimension {chain.dim} exceeds {DENSE_MATRIX_CAP}")
    eye = np.eye(chain.dim, dtype=np.complex128).reshape(chain.state_shape() + (chain.dim,))
    return _as_vector(chain, apply_local(chain, op6, i, eye))


def global_projector(chain: GaugeChain, order: Optional[Sequence[int]] = None) -> np.ndarray:
    """Dense matrix of the projector onto the locally invariant subspace."""
    if chain.dim > DENSE_MATRIX_CAP:
        raise SizeGuardError(f"dense operator of dimension {chain.dim} exceeds {DENSE_MATRIX_CAP}")
    eye = np.eye(chain.dim, dtype=np.complex128).reshape(chain.state_shape() + (chain.dim,))
    return _as_vector(chain, apply_projector(chain, eye, order))


# ---------------------------------------------------------------------------
# neighbour commutation

def _apply_pair_space(op6, X, first: bool):
    # X has axes (e0, s1, e1, s2, e2, batch)
    axes = [0, 1, 2] if first else [2, 3, 4]
    Y = np.tensordot(op6, X, axes=([3, 4, 5], axes))
    return np.moveaxis(Y, [0, 1, 2], axes)


def neighbor_commutator(chain: GaugeChain, g: int, g2: int, probes: int = 4,
                        seed: int = 0, dense_cap: int = 2048) -> float:
    """Norm of [u_g at site i, u_g2 at site i+1] on their joint support.

    Computed exactly (Frobenius norm of the dense commutator, normalised by
    the square root of the dimension) when the support is small, otherwise
    estimated from random complex probe vectors.
    """
    A, B = chain.local_op(g), chain.local_op(g2)
    chi, d = chain.edge_dim, chain.d
    shape = (chi, d, chi, d, chi)
    n = int(np.prod(shape))
    if n <= dense_cap:
        X = np.eye(n, dtype=np.complex128).reshape(shape + (n,))
    else:
        rng = np.random.default_rng(seed)
        X = rng.normal(size=shape + (probes,)) + 1j * rng.normal(size=shape + (probes,))
        X /= np.linalg.norm(X.reshape(n, -1), axis=0)
    AB = _apply_pair_space(A, _apply_pair_space(B, X, False), True)
    BA = _apply_pair_space(B, _apply_pair_space(A, X, True), False)
    diff = (AB - BA).reshape(n, -1)
    return float(np.linalg.norm(diff) / np.sqrt(diff.shape[1]))


def check_neighbor_commutation(chain: GaugeChain, g: Optional[int] = None,
                               g2: Optional[int] = None, tol: Optional[float] = None) -> Report:
    tol = default_tol() if tol is None else tol
    pairs = ([(g, g2)] if g is not None and g2 is not None
             else [(a, b) for a in chain.blocks for b in chain.blocks])
    rep = Report(meta={"check": "neighbor-commutation"})
    for a, b in pairs:
        rep.add(f"commutator[{a},{b}]", "neighbouring local operators commute",
                neighbor_commutator(chain, a, b), tol)
    return rep


# ---------------------------------------------------------------------------
# gauging map

def gauge_input(chain: GaugeChain, psi: np.ndarray) -> np.ndarray:
    """``psi`` coupled to the unit vector on every edge, as a state tensor."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape[0] != chain.matter_dim:
        raise GaugingError(f"matter vector of dimension {psi.shape[0]}, expected {chain.matter_dim}")
    batch = psi.shape[1:]
    X = psi.reshape((chain.d,) * chain.L + batch)
    e = chain.unit_edge_vector()
    for _ in range(chain.L):
        X = np.multiply.outer(X, e)
    if batch:
        X = np.moveaxis(X, chain.L, -1)
    return X


def gauge_state(chain: GaugeChain, psi: np.ndarray) -> np.ndarray:
    """Projected coupling of ``psi`` to the gauge field; returns a flat vector."""
    return _as_vector(chain, apply_projector(chain, gauge_input(chain, psi)))


def gauging_matrix(chain: GaugeChain) -> np.ndarray:
    """Matrix of the gauging map from matter space into the full space."""
    eye = np.eye(chain.matter_dim, dtype=np.complex128)
    return gauge_state(chain, eye)


def gauging_matrix_direct(chain: GaugeChain) -> np.ndarray:
    """Same map written as a sum of MPO-like chains over group assignments.

    Bond ``i`` joins the right leg of ``T_{g_i}`` to the left leg of
    ``T_{g_{i+1}}`` through ``Winv[g_i g_{i+1}^-1, g_{i+1}]`` whose free leg
    is the edge state.
    """
    fd = chain.fusion
    G = fd.group
    L, d, chi = chain.L, chain.d, chain.edge_dim
    blocks = chain.blocks
    out = np.zeros((d,) * L + (chi,) * L + (d,) * L, dtype=np.complex128)
    for gs in itertools.product(blocks, repeat=L):
        # site tensors T[x, y, p', p]; bond tensors B[y, e, z]
        acc = None
        for i in range(L):
            g, gn = gs[i], gs[(i + 1) % L]
            T = fd.rep.tensors[g]
            B = np.zeros((T.shape[1], chi, fd.rep.block_dims[gn]), dtype=np.complex128)
            B[:, chain.block(G.mul(g, G.inv(gn))), :] = fd.Winv[G.mul(g, G.inv(gn)), gn]
            piece = np.einsum("xyqp,yez->xzqpe", T, B)  # (x, z, p', p, e)
            if acc is None:
                acc = piece
            else:
                acc = np.tensordot(acc, piece, axes=(1, 0))
                acc = np.moveaxis(acc, acc.ndim - 4, 1)
        # acc axes: x0, z_last, then (p', p, e) per site
        acc = np.trace(acc, axis1=0, axis2=1)
        acc = acc.reshape((d, d, chi) * L)
        perm = [3 * i for i in range(L)] + [3 * i + 2 for i in range(L)] + [3 * i + 1 for i in range(L)]
        out += acc.transpose(perm)
    out /= len(blocks) ** L
    return out.reshape(chain.dim, chain.matter_dim)


def is_annihilated(vec: np.ndarray, tol: float = ANNIHILATION_TOL) -> bool:
    return bool(np.linalg.norm(vec) < tol)


# ---------------------------------------------------------------------------
# operator gauging

def gauge_operator(chain: GaugeChain, O: np.ndarray, start: int, length: int) -> np.ndarray:
    """Dense full-space matrix of the gauged version of ``O``.

    ``O`` acts on the ``length`` consecutive matter sites beginning at
    ``start`` (cyclically).  The operator is first extended by the rank one
    projector onto the unit vector on the right edge of every site of the
    segment, then summed over conjugations by the local symmetry at each
    segment site.  The plain sum (no 1/|G| per site) is the normalisation
    for which the gauged operator acts on gauged states exactly as ``O``
    acts on matter states; when the segment is the whole ring one factor
    ``1/|G|`` removes the overcounting by a global relabelling.
    """
    L = chain.L
    if not (1 <= length <= L and 0 <= start < L):
        raise GaugingError("segment out of range")
    sites = [(start + j) % L for j in range(length)]
    dl = chain.d ** length
    O = np.asarray(O, dtype=np.complex128)
    if O.shape != (dl, dl):
        raise GaugingError(f"operator must be {dl} x {dl}")
    if chain.dim > DENSE_MATRIX_CAP:
        raise SizeGuardError(f"dense operator of dimension {chain.dim} exceeds {DENSE_MATRIX_CAP}")
    N = chain.dim
    shape = chain.state_shape()
    X = np.eye(N, dtype=np.complex128).reshape(shape + (N,))
    # matter part: O on the segment sites
    O_t = O.reshape((chain.d,) * (2 * length))
    X = np.tensordot(O_t, X, axes=(list(range(length, 2 * length)), sites))
    X = np.moveaxis(X, list(range(length)), sites)
    # edge part: |v><v| on the right edge of each segment site
    e = chain.unit_edge_vector()
    rho = np.outer(e, e.conj())
    for i in sites:
        X = np.moveaxis(np.tensordot(rho, X, axes=(1, L + i)), 0, L + i)
    M = _as_vector(chain, X)
    # average the conjugation by the local symmetry on every segment site
    for i in sites:
        acc = np.zeros_like(M)
        for g in chain.blocks:
            Ug = embed_local(chain, chain.local_op(g), i)
            Ugi = embed_local(chain, chain.local_op(chain.group.inv(g)), i)
            acc += Ug @ M @ Ugi
        M = acc
    if length == L:
        # on the full ring, conjugating every site by the same element is
        # redundant with the global symmetry and overcounts by |G|
        M = M / len(chain.blocks)
    return M


# ---------------------------------------------------------------------------
# subgroup gauging

def gauge_subgroup(fusion: FusionData, L: int, N: Sequence[int], psi: np.ndarray):
    """Gauge only the normal subgroup ``N``; returns ``(chain, vector)``."""
    chain = make_chain(fusion, L, subgroup=N)
    return chain, gauge_state(chain, psi)


def quotient_symmetry_op(chain: GaugeChain, g: int) -> np.ndarray:
    """Dense global operator implementing ``g`` on the partially gauged space.

    Site tensors are ``T_g``; between neighbours the right leg of ``T_g`` and
    the edge (input block ``n``) fuse through ``W[g, n]`` and split again
    through ``Winv[g n g^-1, g]`` into the edge output (block ``g n g^-1``)
    and the left leg of the next ``T_g``.
    """
    fd = chain.fusion
    G = fd.group
    L, d, chi = chain.L, chain.d, chain.edge_dim
    cg = fd.rep.block_dims[g]
    E = np.zeros((cg, cg, chi, chi), dtype=np.complex128)  # (y, z, b', b)
    for n in chain.blocks:
        m = G.conj(g, n)
        if m not in chain.blocks:
            raise GroupError("edge blocks are not closed under conjugation")
        blk = np.einsum("ybm,mez->yzeb", fd.W[g, n], fd.Winv[m, g])
        E[:, :, chain.block(m), chain.block(n)] += blk
    tensors = []
    for _ in range(L):
        tensors += [fd.rep.tensors[g], E]
    M = chain_dense(tensors, cap=max(DENSE_MATRIX_CAP, chain.dim))
    # interleaved (p0, e0, p1, e1, ...) -> matter first
    M = M.reshape((d, chi) * L + (d, chi) * L)
    perm_out = [2 * i for i in range(L)] + [2 * i + 1 for i in range(L)]
    perm = perm_out + [2 * L + p for p in perm_out]
    return M.transpose(perm).reshape(chain.dim, chain.dim)
