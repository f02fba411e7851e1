"""MPO representations of finite groups.

Each element ``g`` carries a tensor ``T_g`` with axes
``(left, right, phys_out, phys_in)`` of shape ``(chi_g, chi_g, d, d)``.  The
MPO on a ring of ``L`` sites is ``U_g = Tr(T_g ... T_g)`` with the physical
legs of site 1 as the most significant factor of the dense matrix.

Two builders are provided:

* :func:`build_onsite_mpo` wraps a linear representation ``u`` as bond
  dimension one tensors.
* :func:`build_anomalous_mpo` realises a 3-cocycle ``omega`` with a
  "double line" construction: a site holds a pair ``(a, b)`` of group
  elements, the left bond copies ``a`` and the right bond copies ``b``, so
  the trace forces ``b_i == a_{i+1}`` and the ring effectively carries one
  group element per link.  ``T_g`` multiplies both entries by ``g`` from the
  left and attaches the phase ``conj(omega(g^-1, g a, a^-1 b))``.  With
  ``omega`` normalised this is the standard cocycle-twisted domain-wall
  symmetry, and its fusion tensors associate with exactly the class of
  ``omega``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .groups import (
    FiniteGroup,
    CocycleError,
    check_cocycle3,
    cocycle3_from_json,
    cocycle3_to_json,
    normalize_cocycle3,
)
from .reports import Report, default_tol
from .tensor import Tensor

__all__ = [
    "MpoError",
    "SizeGuardError",
    "MpoGroupRep",
    "build_onsite_mpo",
    "build_anomalous_mpo",
    "regular_rep",
    "diagonal_rep",
    "chain_dense",
    "realize_dense",
    "dense_mpo",
    "verify_group_law",
    "injectivity_rank",
    "check_injectivity",
    "DENSE_MATRIX_CAP",
]

# largest dense operator dimension we are willing to build
DENSE_MATRIX_CAP = 4096
TENSOR_LABELS = ("l", "r", "out", "in")


class MpoError(ValueError):
    """Invalid MPO input data."""


class SizeGuardError(MpoError):
    """A dense object would exceed the desk-scale size guard."""


@dataclass(frozen=True, eq=False)
class MpoGroupRep:
    group: FiniteGroup
    tensors: tuple
    kind: str = "custom"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ts = []
        for T in self.tensors:
            arr = np.array(T, dtype=np.complex128)
            if arr.ndim != 4 or arr.shape[0] != arr.shape[1] or arr.shape[2] != arr.shape[3]:
                raise MpoError(f"MPO tensor must have shape (chi, chi, d, d), got {arr.shape}")
            arr.setflags(write=False)
            ts.append(arr)
        if len(ts) != self.group.order:
            raise MpoError("need exactly one tensor per group element")
        if len({T.shape[2] for T in ts}) != 1:
            raise MpoError("all tensors must share the physical dimension")
        object.__setattr__(self, "tensors", tuple(ts))

    @property
    def d(self) -> int:
        return int(self.tensors[0].shape[2])

    @property
    def block_dims(self) -> tuple:
        return tuple(int(T.shape[0]) for T in self.tensors)

    @property
    def chi(self) -> int:
        return int(sum(self.block_dims))

    @property
    def offsets(self) -> tuple:
        off = np.concatenate([[0], np.cumsum(self.block_dims)])
        return tuple(int(x) for x in off[:-1])

    def block_slice(self, g: int) -> slice:
        o = self.offsets[g]
        return slice(o, o + self.block_dims[g])

    def tensor(self, g: int) -> Tensor:
        return Tensor(self.tensors[g], TENSOR_LABELS)

    def with_tensor(self, g: int, T) -> "MpoGroupRep":
        ts = list(self.tensors)
        ts[g] = np.asarray(T)
        return MpoGroupRep(self.group, tuple(ts), kind="custom", meta=dict(self.meta))

    def is_onsite(self) -> bool:
        return all(c == 1 for c in self.block_dims)

    def to_json(self) -> dict:
        out = {
            "group": self.group.to_json(),
            "kind": self.kind,
            "d": self.d,
            "block_dims": list(self.block_dims),
            "tensors": [self.tensor(g).to_json() for g in self.group.elements()],
        }
        if "cocycle" in self.meta:
            out["cocycle"] = cocycle3_to_json(self.meta["cocycle"])
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MpoGroupRep":
        G = FiniteGroup.from_json(obj["group"])
        ts = []
        for g, tj in enumerate(obj["tensors"]):
            t = Tensor.from_json(tj)
            if tuple(t.labels) != TENSOR_LABELS:
                t = t.transpose(TENSOR_LABELS)
            ts.append(t.data)
        meta = {}
        if "cocycle" in obj:
            meta["cocycle"] = cocycle3_from_json(obj["cocycle"], G)
        rep = cls(G, tuple(ts), kind=obj.get("kind", "custom"), meta=meta)
        if "block_dims" in obj and list(obj["block_dims"]) != list(rep.block_dims):
            raise MpoError("declared block dimensions do not match the tensors")
        return rep


# ---------------------------------------------------------------------------
# builders

def regular_rep(G: FiniteGroup) -> np.ndarray:
    """Left regular representation, u_g |h> = |gh>."""
    n = G.order
    u = np.zeros((n, n, n), dtype=np.complex128)
    for g in G.elements():
        for h in G.elements():
            u[g, G.mul(g, h), h] = 1.0
    return u


def diagonal_rep(G: FiniteGroup, generator_diag: Sequence[complex]) -> np.ndarray:
    """Powers of a diagonal generator, for cyclic groups: u_k = diag(x)^k."""
    x = np.asarray(generator_diag, dtype=np.complex128)
    return np.stack([np.diag(x**k) for k in range(G.order)])


def build_onsite_mpo(G: FiniteGroup, u, tol: float = 1e-10) -> MpoGroupRep:
    """Bond dimension one MPO for a linear unitary representation ``u``."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 3 or u.shape[0] != G.order or u.shape[1] != u.shape[2]:
        raise MpoError("u must have shape (|G|, d, d)")
    d = u.shape[1]
    eye = np.eye(d)
    for g in G.elements():
        if np.max(np.abs(u[g] @ u[g].conj().T - eye)) > tol:
            raise MpoError(f"u({g}) is not unitary")
        for h in G.elements():
            if np.max(np.abs(u[g] @ u[h] - u[G.mul(g, h)])) > tol:
                raise MpoError(f"not a representation: u({g})u({h}) != u({G.mul(g, h)})")
    tensors = tuple(u[g].reshape(1, 1, d, d) for g in G.elements())
    return MpoGroupRep(G, tensors, kind="onsite", meta={"u": u})


def build_anomalous_mpo(G: FiniteGroup, omega) -> MpoGroupRep:
    """Double-line MPO whose fusion tensors carry the class of ``omega``.

    Physical dimension ``|G|^2`` and ``chi_g = |G|`` for every ``g``.
    """
    omega = np.asarray(omega, dtype=np.complex128)
    if not check_cocycle3(G, omega):
        raise CocycleError("input is not a 3-cocycle")
    wn, _ = normalize_cocycle3(G, omega)
    n = G.order
    tab, inv = G.table, G.inverse
    tensors = []
    for g in G.elements():
        T = np.zeros((n, n, n * n, n * n), dtype=np.complex128)
        gi = inv[g]
        for a in range(n):
            ga = tab[g, a]
            for b in range(n):
                phase = np.conj(wn[gi, ga, tab[inv[a], b]])
                T[a, b, ga * n + tab[g, b], a * n + b] = phase
        tensors.append(T)
    return MpoGroupRep(G, tuple(tensors), kind="anomalous",
                       meta={"cocycle": omega, "normalized_cocycle": wn})


# ---------------------------------------------------------------------------
# dense realisation

def _join(M: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Contract the right leg of M with the left leg of T: (a, c, i, k, j, l)."""
    return np.tensordot(M, T, axes=(1, 0)).transpose(0, 3, 1, 4, 2, 5)

def chain_dense(tensors: Sequence[np.ndarray], periodic: bool = True,
                cap: int = DENSE_MATRIX_CAP) -> np.ndarray:
    """Dense operator of a chain of ``(l, r, out, in)`` tensors.

    With ``periodic`` the outer virtual legs are traced; otherwise they must
    have extent one.
    """
    dims_out = int(np.prod([T.shape[2] for T in tensors]))
    dims_in = int(np.prod([T.shape[3] for T in tensors]))
    if max(dims_out, dims_in) > cap:
        raise SizeGuardError(f"dense operator of dimension {max(dims_out, dims_in)} exceeds {cap}")
    M = tensors[0]
    for T in tensors[1:]:
        a, _, do, di = M.shape
        _, c, eo, ei = T.shape
        M = _join(M, T).reshape(a, c, do * eo, di * ei)
    if periodic:
        return np.einsum("aaij->ij", M)
    if M.shape[0] != 1 or M.shape[1] != 1:
        raise MpoError("open chain needs extent one boundary legs")
    return M[0, 0]


def dense_mpo(rep: MpoGroupRep, g: int, L: int) -> np.ndarray:
    if L < 1:
        raise MpoError("L must be at least 1")
    if rep.d ** L > DENSE_MATRIX_CAP:
        raise SizeGuardError(f"d^L = {rep.d ** L} exceeds {DENSE_MATRIX_CAP}")
    return chain_dense([rep.tensors[g]] * L)


def realize_dense(rep: MpoGroupRep, g: int, L: int) -> Tensor:
    """Dense ``U_g`` on ``L`` sites as a two-axis :class:`Tensor`."""
    return Tensor(dense_mpo(rep, g, L), ["out", "in"])


def verify_group_law(rep: MpoGroupRep, L: int, tol: Optional[float] = None) -> Report:
    """Check dense(U_g) dense(U_h) == dense(U_gh) for every pair."""
    tol = default_tol() if tol is None else tol
    G = rep.group
    dense = [dense_mpo(rep, g, L) for g in G.elements()]
    rep_out = Report(meta={"check": "group-law", "L": L, "order": G.order})
    for g in G.elements():
        for h in G.elements():
            res = np.max(np.abs(dense[g] @ dense[h] - dense[G.mul(g, h)]))
            rep_out.add(f"group-law[{g},{h}]", "MPO group law U_g U_h = U_gh", res, tol)
    return rep_out


# ---------------------------------------------------------------------------
# injectivity

def blocked_map(T: np.ndarray, k: int) -> np.ndarray:
    """Matrix from the virtual pair (left, right) to the k-site physical legs."""
    M = T
    for _ in range(k - 1):
        a, _, do, di = M.shape
        _, c, eo, ei = T.shape
        M = _join(M, T).reshape(a, c, do * eo, di * ei)
    a, c = M.shape[:2]
    return M.reshape(a * c, -1)


def injectivity_rank(T: np.ndarray, k: int, tol: float = 1e-10) -> int:
    s = np.linalg.svd(blocked_map(T, k), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def check_injectivity(rep: MpoGroupRep, g: int, max_block: int = 2):
    """Smallest blocking length certifying injectivity of ``T_g``, or ``None``."""
    T = rep.tensors[g]
    target = T.shape[0] * T.shape[1]
    for k in range(1, max_block + 1):
        if injectivity_rank(T, k) == target:
            return k
    return None
