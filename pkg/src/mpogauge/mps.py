"""Translation-invariant MPS on a ring and their gauging in closed form.

The site tensor ``A`` has axes ``(left, right, phys)``.  Internally it is
often viewed as an MPO tensor with a trivial input leg, ``A[..., None]``,
so the blocking and stacking helpers of :mod:`mpogauge.mpo` and
:mod:`mpogauge.fusion` apply unchanged.

Action tensors
--------------
For an MPO symmetry ``T_g`` the stacked tensor ``T_g A`` is written as
``X_g A Y_g`` with::

    X_g[x, a; a']    left action tensor,  shape (chi_g, D, D)
    Y_g[b'; y, b]    right action tensor, shape (D, chi_g, D)

``a'``/``b'`` touch ``A`` and ``(x, a)``/``(y, b)`` face outwards.  They are
normalised so that ``sum_{y,b} Y_g[c; y, b] X_g[y, b; c'] = delta_{c c'}``.

The L-symbols are the scalars in::

    sum_c Y_g[b'; x, c] Y_h[c; y, b] = L[g, h] sum_m Winv[g,h][m; x, y] Y_gh[b'; m, b]

so that the gauged MPS carries ``1 / L`` on its edge tensors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fusion import (
    FusionData,
    FusionError,
    NoSolutionError,
    factor_intertwiner,
    stack_tensors,
)
from .groups import FiniteGroup
from .mpo import SizeGuardError, chain_dense, injectivity_rank
from .reports import Report, default_tol
from .tensor import Tensor

__all__ = [
    "MpsError",
    "NotInjectiveError",
    "NotSymmetricError",
    "Mps",
    "ActionTensorSet",
    "mps_dense",
    "check_injectivity",
    "twirl_tensor",
    "extract_onsite_symmetry",
    "solve_action_tensors",
    "action_residual",
    "action_orthogonality_residual",
    "lsymbol_consistency_residual",
    "gauge_mps",
    "edge_tensor_exact",
    "gauged_mps_dense",
    "verify_gauged_mps",
    "STATE_CAP",
]

STATE_CAP = 2**16


class MpsError(ValueError):
    pass


class NotInjectiveError(MpsError):
    pass


class NotSymmetricError(MpsError):
    pass


def _as_mpo(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 3 or A.shape[0] != A.shape[1]:
        raise MpsError(f"MPS tensor must have shape (D, D, d), got {A.shape}")
    return A[..., None]


@dataclass(frozen=True, eq=False)
class Mps:
    A: np.ndarray
    L: int

    def __post_init__(self):
        arr = np.array(self.A, dtype=np.complex128)
        _as_mpo(arr)
        if not np.all(np.isfinite(arr)):
            raise MpsError("MPS tensor has non-finite entries")
        if self.L < 1:
            raise MpsError("L must be at least 1")
        arr.setflags(write=False)
        object.__setattr__(self, "A", arr)

    @property
    def D(self) -> int:
        return int(self.A.shape[0])

    @property
    def d(self) -> int:
        return int(self.A.shape[2])

    def dense(self) -> np.ndarray:
        return mps_dense(self.A, self.L)

    def to_json(self) -> dict:
        return {"A": Tensor(self.A, ["l", "r", "p"]).to_json(), "L": self.L}

    @classmethod
    def from_json(cls, obj: dict) -> "Mps":
        t = Tensor.from_json(obj["A"]).transpose(["l", "r", "p"])
        return cls(t.data, int(obj["L"]))


def mps_dense(A: np.ndarray, L: int, cap: int = STATE_CAP) -> np.ndarray:
    """State vector ``Tr(A^{p_1} ... A^{p_L})``, site 1 most significant."""
    return chain_dense([_as_mpo(A)] * L, cap=cap)[:, 0]


def check_injectivity(A: np.ndarray, max_block: int = 3):
    """``(True, k)`` for the smallest certifying block length, else ``(False, None)``."""
    if max_block < 1:
        raise MpsError("max_block must be at least 1")
    T = _as_mpo(A)
    target = T.shape[0] ** 2
    for k in range(1, max_block + 1):
        if injectivity_rank(T, k) == target:
            return True, k
    return False, None


def twirl_tensor(A0: np.ndarray, u: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Average ``A0`` so that ``u_g . A == V_g A V_g^-1`` for every ``g``.

    ``u`` and ``V`` are stacks over the group; ``V`` may be projective since
    only conjugation by it enters.
    """
    A0 = np.asarray(A0, dtype=np.complex128)
    out = np.zeros_like(A0)
    for ug, Vg in zip(u, V):
        conj = np.einsum("ab,bcp,cd->adp", Vg, A0, np.linalg.inv(Vg))
        out += np.einsum("qp,abq->abp", ug.conj(), conj)
    return out / len(u)


def _fix_matrix_gauge(V: np.ndarray) -> np.ndarray:
    D = V.shape[0]
    det = np.linalg.det(V)
    if abs(det) < 1e-14:
        raise MpsError("virtual symmetry matrix is singular")
    V = V / abs(det) ** (1.0 / D)
    flat = V.reshape(-1)
    mags = np.abs(flat)
    lead = int(np.flatnonzero(mags >= (1 - 1e-8) * mags.max())[0])
    return V * (mags[lead] / flat[lead])


def extract_onsite_symmetry(A: np.ndarray, u: np.ndarray, max_block: int = 3,
                            test_L: int = 3):
    """Virtual matrix ``V`` and phase with ``u . A == phase * V A V^-1``.

    ``V`` is normalised to ``|det V| = 1`` with its leading entry real
    positive.  The dense ring of length ``test_L`` is checked first.
    """
    A = np.asarray(A, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    d = A.shape[2]
    if u.shape != (d, d):
        raise MpsError("u must be a d x d matrix")
    ok, _ = check_injectivity(A, max_block)
    if not ok:
        raise NotInjectiveError("MPS tensor is not injective")
    if d ** test_L <= STATE_CAP:
        psi = mps_dense(A, test_L)
        U = u
        for _ in range(test_L - 1):
            U = np.kron(U, u)
        out = U @ psi
        ov = np.vdot(psi, out) / np.vdot(psi, psi)
        if np.linalg.norm(out - ov * psi) > 1e-8 * np.linalg.norm(psi) or abs(abs(ov) - 1) > 1e-8:
            raise NotSymmetricError("state is not an eigenvector of the on-site symmetry")
    T = _as_mpo(A)
    S = stack_tensors(u.reshape(1, 1, d, d), T)
    try:
        X, Y = factor_intertwiner(S, T, max_block, what="on-site action")
    except NoSolutionError as exc:
        raise NotSymmetricError(str(exc)) from exc
    V = _fix_matrix_gauge(X)
    D = V.shape[0]
    phase = complex(np.trace(Y @ X) / D)
    return V, phase


# ---------------------------------------------------------------------------
# action tensors

@dataclass(frozen=True, eq=False)
class ActionTensorSet:
    group: FiniteGroup
    X: dict
    Y: dict
    L: np.ndarray
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        n = self.group.order
        return {
            "group": self.group.to_json(),
            "X": [Tensor(self.X[g], ["x", "a", "ap"]).to_json() for g in range(n)],
            "Y": [Tensor(self.Y[g], ["bp", "y", "b"]).to_json() for g in range(n)],
            "L": [[[float(z.real), float(z.imag)] for z in row] for row in self.L],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ActionTensorSet":
        G = FiniteGroup.from_json(obj["group"])
        X = {g: Tensor.from_json(t).transpose(["x", "a", "ap"]).data for g, t in enumerate(obj["X"])}
        Y = {g: Tensor.from_json(t).transpose(["bp", "y", "b"]).data for g, t in enumerate(obj["Y"])}
        Lt = np.asarray(obj["L"], dtype=float)
        return cls(G, X, Y, Lt[..., 0] + 1j * Lt[..., 1])


def _normalize_action(X: np.ndarray, Y: np.ndarray):
    D = X.shape[1]
    prod = Y.reshape(D, -1) @ X.reshape(-1, D)
    c = np.trace(prod) / D
    if abs(c) < 1e-14 or np.max(np.abs(prod - c * np.eye(D))) > 1e-8 * abs(c):
        raise NoSolutionError("action tensors are not orthogonal up to a scalar")
    if abs(c - 1) > 1e-8:
        raise NotSymmetricError(f"MPO acts with a phase {c:.6g} per site")
    lam = np.sqrt(np.linalg.norm(Y) / np.linalg.norm(X))
    X, Y = X * lam, Y / lam
    flat = X.reshape(-1)
    mags = np.abs(flat)
    lead = int(np.flatnonzero(mags >= (1 - 1e-8) * mags.max())[0])
    ph = flat[lead] / mags[lead]
    return X / ph, Y * ph


def _lsymbol(fd: FusionData, Y: dict, g: int, h: int) -> complex:
    gh = fd.group.mul(g, h)
    lhs = np.einsum("pxc,cyb->pxyb", Y[g], Y[h])
    rhs = np.einsum("mxy,pmb->pxyb", fd.Winv[g, h], Y[gh])
    nr = np.vdot(rhs, rhs)
    if abs(nr) < 1e-14:
        raise FusionError(f"vanishing action product at ({g},{h})")
    val = np.vdot(rhs, lhs) / nr
    if np.linalg.norm(lhs - val * rhs) > 1e-8 * max(np.linalg.norm(lhs), 1e-300):
        raise NoSolutionError(f"action products are not proportional at ({g},{h})")
    return complex(val)


def solve_action_tensors(A: np.ndarray, fusion: FusionData, max_block: int = 3) -> ActionTensorSet:
    """Action tensors of every ``T_g`` on ``A`` plus the L-symbol table."""
    T = _as_mpo(A)
    ok, _ = check_injectivity(A, max_block)
    if not ok:
        raise NotInjectiveError("MPS tensor is not injective")
    rep = fusion.rep
    if rep.d != T.shape[2]:
        raise MpsError("physical dimensions of MPS and MPO differ")
    G = fusion.group
    D = T.shape[0]
    X, Y = {}, {}
    for g in G.elements():
        Tg = rep.tensors[g]
        chi = Tg.shape[0]
        S = stack_tensors(Tg, T)
        try:
            left, right = factor_intertwiner(S, T, max_block, what=f"action of {g}")
        except NoSolutionError as exc:
            raise NotSymmetricError(str(exc)) from exc
        X[g], Y[g] = _normalize_action(left.reshape(chi, D, D), right.reshape(D, chi, D))
    n = G.order
    Ls = np.array([[_lsymbol(fusion, Y, g, h) for h in range(n)] for g in range(n)])
    return ActionTensorSet(G, X, Y, Ls, meta={"D": D})


def action_residual(A: np.ndarray, rep, actions: ActionTensorSet) -> float:
    A = _as_mpo(A)[..., 0]
    worst = 0.0
    for g in rep.group.elements():
        lhs = np.einsum("xypq,abq->xaybp", rep.tensors[g], A)
        rhs = np.einsum("xac,cdp,dyb->xaybp", actions.X[g], A, actions.Y[g])
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def action_orthogonality_residual(actions: ActionTensorSet) -> float:
    worst = 0.0
    for g in actions.group.elements():
        Xg, Yg = actions.X[g], actions.Y[g]
        D = Xg.shape[1]
        prod = np.einsum("cyb,ybe->ce", Yg, Xg)
        worst = max(worst, float(np.max(np.abs(prod - np.eye(D)))))
    return worst


def lsymbol_consistency_residual(G: FiniteGroup, Ls: np.ndarray) -> float:
    """Max of ``|L[g,h] L[gh,k] - L[h,k] L[g,hk]|`` over all triples."""
    worst = 0.0
    for g in G.elements():
        for h in G.elements():
            for k in G.elements():
                a = Ls[g, h] * Ls[G.mul(g, h), k]
                b = Ls[h, k] * Ls[g, G.mul(h, k)]
                worst = max(worst, abs(a - b))
    return float(worst)


# ---------------------------------------------------------------------------
# gauged MPS

def _edge_layout(fusion: FusionData):
    dims = fusion.rep.block_dims
    off = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    return off, int(off[-1])


def gauge_mps(A: np.ndarray, fusion: FusionData, actions: ActionTensorSet):
    """Matter tensor ``A (x) 1_G`` and edge tensor ``B`` of the gauged MPS.

    ``B[(b', g), (a', h), e] = L[gh^-1, h]^-1 Y_{gh^-1}[b'; e, a'] / |G|`` with
    ``e`` running over block ``gh^-1`` of the edge space.
    """
    if not fusion.strict:
        raise FusionError("gauged MPS needs strict-gauge fusion data")
    A = np.asarray(A, dtype=np.complex128)
    G = fusion.group
    n = G.order
    D, _, d = A.shape
    off, chi = _edge_layout(fusion)
    At = np.einsum("abp,gh->agbhp", A, np.eye(n)).reshape(D * n, D * n, d)
    B = np.zeros((D, n, D, n, chi), dtype=np.complex128)
    for g in G.elements():
        for h in G.elements():
            k = G.mul(g, G.inv(h))
            coef = 1.0 / (actions.L[k, h] * n)
            B[:, g, :, h, off[k]:off[k + 1]] = coef * actions.Y[k].transpose(0, 2, 1)
    return At, B.reshape(D * n, D * n, chi)


def edge_tensor_exact(A: np.ndarray, fusion: FusionData, actions: ActionTensorSet) -> np.ndarray:
    """Edge tensor from the contraction ``Y_g Winv[gh^-1, h] X_h``, no L-symbols.

    Used to cross-check the closed form of :func:`gauge_mps`.
    """
    G = fusion.group
    n = G.order
    D = np.asarray(A).shape[0]
    off, chi = _edge_layout(fusion)
    B = np.zeros((D, n, D, n, chi), dtype=np.complex128)
    for g in G.elements():
        for h in G.elements():
            k = G.mul(g, G.inv(h))
            blk = np.einsum("pxb,xey,ybq->peq", actions.Y[g], fusion.Winv[k, h], actions.X[h])
            B[:, g, :, h, off[k]:off[k + 1]] = blk.transpose(0, 2, 1) / n
    return B.reshape(D * n, D * n, chi)


def gauged_mps_dense(At: np.ndarray, B: np.ndarray, L: int, cap: int = STATE_CAP) -> np.ndarray:
    """Dense ``Tr(At B At B ...)`` reordered to matter-first layout."""
    d, chi = At.shape[2], B.shape[2]
    if (d * chi) ** L > cap:
        raise SizeGuardError(f"gauged MPS dimension {(d * chi) ** L} exceeds {cap}")
    cell = np.tensordot(At, B, axes=(1, 0)).transpose(0, 2, 1, 3)
    cell = cell.reshape(At.shape[0], B.shape[1], d * chi)
    vec = chain_dense([cell[..., None]] * L, cap=cap)[:, 0]
    X = vec.reshape((d, chi) * L)
    perm = [2 * i for i in range(L)] + [2 * i + 1 for i in range(L)]
    return X.transpose(perm).reshape(-1)


def verify_gauged_mps(A: np.ndarray, fusion: FusionData, Ls=(2, 3),
                      tol: Optional[float] = None, actions: Optional[ActionTensorSet] = None) -> Report:
    """Two-path comparison of the closed-form gauged MPS with the gauging map."""
    from .gauging import gauge_state, make_chain

    tol = default_tol() if tol is None else tol
    actions = solve_action_tensors(A, fusion) if actions is None else actions
    rep = Report(meta={"check": "gauged-mps", "order": fusion.group.order})
    rep.add("action-tensors", "T_g A = X_g A Y_g", action_residual(A, fusion.rep, actions), tol)
    rep.add("action-orthogonality", "Y_g X_g = 1", action_orthogonality_residual(actions), tol)
    rep.add("lsymbol-unimodular", "|L_gh| = 1",
            float(np.max(np.abs(np.abs(actions.L) - 1))), max(tol, 1e-8))
    rep.add("lsymbol-consistency", "L-symbol associativity over triples",
            lsymbol_consistency_residual(fusion.group, actions.L), max(tol, 1e-8))
    At, B = gauge_mps(A, fusion, actions)
    rep.add("edge-tensor-closed-form", "B from L-symbols equals direct contraction",
            float(np.max(np.abs(B - edge_tensor_exact(A, fusion, actions)))), tol)
    for L in Ls:
        chain = make_chain(fusion, L)
        ref = gauge_state(chain, mps_dense(A, L))
        got = gauged_mps_dense(At, B, L)
        rep.add(f"gauged-mps[L={L}]", "gauged MPS equals gauging map on the MPS",
                float(np.max(np.abs(got - ref))), tol)
    return rep
