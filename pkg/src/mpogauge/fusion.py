"""Fusion data of an MPO group representation.

Index conventions (``chi_x`` is the bond dimension of block ``x``):

* ``W[g, h]`` has shape ``(chi_g, chi_h, chi_gh)``: it maps block ``gh`` into
  the stacked pair ``(g, h)``, with ``g`` the upper MPO (applied last).
* ``Winv[g, h]`` has shape ``(chi_gh, chi_g, chi_h)``.
* Zipper: ``sum_q T_g[.., p', q] T_h[.., q, p] = W T_gh[.., p', p] Winv`` on
  the stacked virtual legs, and ``Winv[g, h] . W[g, h] = 1``.
* Associativity: ``Winv[gh, k] (Winv[g, h] x 1) = omega(g, h, k)
  Winv[g, hk] (1 x Winv[h, k])``.
* Rescaling ``W -> beta W, Winv -> conj(beta) Winv`` turns ``omega`` into
  ``omega / coboundary3(beta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .groups import (
    FiniteGroup,
    check_cocycle3,
    coboundary_trivialize,
    cocycle3_from_json,
    cocycle3_to_json,
)
from .mpo import MpoGroupRep, blocked_map, injectivity_rank
from .reports import Report, default_tol
from .tensor import Tensor, _pinv

__all__ = [
    "FusionError",
    "NoSolutionError",
    "IllConditionedError",
    "AnomalousError",
    "FusionData",
    "stack_tensors",
    "fix_pair_gauge",
    "factor_intertwiner",
    "solve_fusion_tensors",
    "solve_fusion",
    "zipper_residual",
    "orthogonality_residual",
    "extract_3cocycle",
    "rescale",
    "gauge_fix_strict",
    "strict_associativity_residual",
    "mixed_identity_residual",
    "solve_unit_vector",
    "unit_vector_residual",
    "solve_Z_matrices",
    "z_matrix_residual",
    "verify_fusion",
    "prepare_strict",
]

PROPORTIONALITY_TOL = 1e-8


class FusionError(ValueError):
    pass


class NoSolutionError(FusionError):
    """The requested structural data does not exist for this input."""


class IllConditionedError(FusionError):
    """A rank decision could not be made with a clear gap."""


class AnomalousError(FusionError):
    """The extracted 3-cocycle is cohomologically nontrivial."""


@dataclass(frozen=True, eq=False)
class FusionData:
    rep: MpoGroupRep
    W: dict
    Winv: dict
    omega: np.ndarray
    beta: np.ndarray
    strict: bool = False
    v: Optional[np.ndarray] = None
    Z: Optional[dict] = None
    meta: dict = field(default_factory=dict)

    @property
    def group(self) -> FiniteGroup:
        return self.rep.group

    def to_json(self) -> dict:
        G = self.group
        pairs = []
        for g in G.elements():
            for h in G.elements():
                pairs.append({
                    "g": g, "h": h,
                    "W": Tensor(self.W[g, h], ["g", "h", "gh"]).to_json(),
                    "Winv": Tensor(self.Winv[g, h], ["gh", "g", "h"]).to_json(),
                })
        out = {
            "rep": self.rep.to_json(),
            "pairs": pairs,
            "omega": cocycle3_to_json(self.omega),
            "beta": [[[float(z.real), float(z.imag)] for z in row] for row in self.beta],
            "strict": self.strict,
        }
        if self.v is not None:
            out["v"] = Tensor(self.v, ["e"]).to_json()
        if self.Z is not None:
            out["Z"] = [Tensor(self.Z[g], ["g", "ginv"]).to_json() for g in G.elements()]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FusionData":
        rep = MpoGroupRep.from_json(obj["rep"])
        W, Winv = {}, {}
        for p in obj["pairs"]:
            key = (int(p["g"]), int(p["h"]))
            W[key] = Tensor.from_json(p["W"]).transpose(["g", "h", "gh"]).data
            Winv[key] = Tensor.from_json(p["Winv"]).transpose(["gh", "g", "h"]).data
        beta = np.asarray(obj["beta"], dtype=float)
        beta = beta[..., 0] + 1j * beta[..., 1]
        v = Tensor.from_json(obj["v"]).data if "v" in obj else None
        Z = None
        if "Z" in obj:
            Z = {g: Tensor.from_json(z).transpose(["g", "ginv"]).data for g, z in enumerate(obj["Z"])}
        return cls(rep, W, Winv, cocycle3_from_json(obj["omega"], rep.group), beta,
                   bool(obj.get("strict", False)), v, Z)


# ---------------------------------------------------------------------------
# solving

def stack_tensors(Tg: np.ndarray, Th: np.ndarray) -> np.ndarray:
    """Product MPO tensor, ``Tg`` on top of ``Th``, stacked legs ordered (g, h)."""
    a1, b1, do, _ = Tg.shape
    a2, b2, _, di = Th.shape
    # (a, b, p, q) x (c, d, q, r) -> (a, b, p, c, d, r)
    S = np.tensordot(Tg, Th, axes=(3, 2)).transpose(0, 3, 1, 4, 2, 5)
    return S.reshape(a1 * a2, b1 * b2, do, di)


def _injective_block(T: np.ndarray, max_block: int) -> int:
    target = T.shape[0] * T.shape[1]
    for k in range(1, max_block + 1):
        if injectivity_rank(T, k) == target:
            return k
    raise NoSolutionError("product tensor is not injective up to the maximal blocking length")


def fix_pair_gauge(W: np.ndarray, Winv: np.ndarray):
    """Normalise Winv W = 1, balance norms, make the leading entry of W real positive."""
    chi = W.shape[-1]
    Wm = W.reshape(-1, chi)
    Vm = Winv.reshape(chi, -1)
    prod = Vm @ Wm
    c = np.trace(prod) / chi
    if abs(c) < 1e-14:
        raise IllConditionedError("fusion tensors have vanishing overlap")
    Vm = Vm / c
    lam = np.sqrt(np.linalg.norm(Vm) / np.linalg.norm(Wm))
    Wm, Vm = Wm * lam, Vm / lam
    flat = Wm.reshape(-1)
    mags = np.abs(flat)
    lead = int(np.flatnonzero(mags >= (1 - 1e-8) * mags.max())[0])
    ph = flat[lead] / mags[lead]
    Wm, Vm = Wm / ph, Vm * ph
    return Wm.reshape(W.shape), Vm.reshape(Winv.shape)


def factor_intertwiner(S: np.ndarray, T: np.ndarray, max_block: int = 3,
                       gap_tol: float = 1e-8, what: str = "product"):
    """Write ``S = left . T . right`` on the virtual legs of two MPO tensors.

    ``S`` has virtual extent ``P`` and ``T`` extent ``q``.  The blocked map
    of ``T`` is inverted, the resulting intertwiner ``K[(A, B), (a, b)]`` is
    reshaped to ``((A, a), (b, B))`` and split by a rank-one SVD into
    ``left`` of shape ``(P, q)`` and ``right`` of shape ``(q, P)``.
    """
    P, q = S.shape[0], T.shape[0]
    k = _injective_block(T, max_block)
    Sk = blocked_map(S, k)
    Tk = blocked_map(T, k)
    K = Sk @ _pinv(Tk)
    scale = max(np.linalg.norm(Sk), 1e-300)
    if np.linalg.norm(K @ Tk - Sk) > 1e-8 * scale:
        raise NoSolutionError(f"{what} is not in the span of the target tensor")
    M = K.reshape(P, P, q, q).transpose(0, 2, 3, 1).reshape(P * q, q * P)
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0:
        raise NoSolutionError("vanishing intertwiner")
    if s.size > 1 and s[1] > gap_tol * s[0]:
        raise NoSolutionError(f"{what}: intertwiner is not a product (s1/s0 = {s[1] / s[0]:.2e})")
    left = (u[:, 0] * np.sqrt(s[0])).reshape(P, q)
    right = (vh[0] * np.sqrt(s[0])).reshape(q, P)
    return left, right


def solve_fusion_tensors(rep: MpoGroupRep, g: int, h: int, max_block: int = 3,
                         gap_tol: float = 1e-8):
    """Solve the zipper for the pair ``(g, h)``; returns ``(W, Winv)``.

    The product MPO is expressed through ``T_gh`` by inverting the injective
    blocked map of ``T_gh``; the resulting intertwiner factorises as
    ``W (x) Winv``, which a rank-one SVD recovers.
    """
    G = rep.group
    gh = G.mul(g, h)
    Tg, Th, Tgh = rep.tensors[g], rep.tensors[h], rep.tensors[gh]
    cg, ch, cgh = Tg.shape[0], Th.shape[0], Tgh.shape[0]
    if rep.is_onsite():
        return (np.ones((1, 1, 1), dtype=np.complex128),
                np.ones((1, 1, 1), dtype=np.complex128))
    S = stack_tensors(Tg, Th)
    left, right = factor_intertwiner(S, Tgh, max_block, gap_tol, what=f"product ({g},{h})")
    W = left.reshape(cg, ch, cgh)
    Winv = right.reshape(cgh, cg, ch)
    return fix_pair_gauge(W, Winv)


def zipper_residual(rep: MpoGroupRep, g: int, h: int, W, Winv) -> float:
    """Max entry of ``T_g T_h - W T_gh Winv`` on one site."""
    gh = rep.group.mul(g, h)
    lhs = np.einsum("abpq,cdqr->acbdpr", rep.tensors[g], rep.tensors[h], optimize=True)
    rhs = np.einsum("acx,xypr,ybd->acbdpr", W, rep.tensors[gh], Winv, optimize=True)
    return float(np.max(np.abs(lhs - rhs)))


def orthogonality_residual(W, Winv) -> float:
    chi = W.shape[-1]
    prod = np.einsum("xab,aby->xy", Winv, W)
    return float(np.max(np.abs(prod - np.eye(chi))))


def extract_3cocycle(G: FiniteGroup, W: dict, Winv: dict,
                     tol: float = PROPORTIONALITY_TOL) -> np.ndarray:
    """Associativity phase of the fusion tensors, for every triple."""
    n = G.order
    omega = np.zeros((n, n, n), dtype=np.complex128)
    for g in range(n):
        for h in range(n):
            gh = G.mul(g, h)
            for k in range(n):
                hk = G.mul(h, k)
                lhs = np.einsum("mxc,xab->mabc", Winv[gh, k], Winv[g, h])
                rhs = np.einsum("may,ybc->mabc", Winv[g, hk], Winv[h, k])
                nr = np.vdot(rhs, rhs)
                if abs(nr) < 1e-14:
                    raise FusionError(f"zero overlap at ({g},{h},{k})")
                w = np.vdot(rhs, lhs) / nr
                res = np.linalg.norm(lhs - w * rhs) / max(np.linalg.norm(lhs), 1e-300)
                if res > tol:
                    raise FusionError(f"associativity orders not proportional at ({g},{h},{k})")
                omega[g, h, k] = w
    if np.max(np.abs(np.abs(omega) - 1)) > tol:
        raise FusionError("extracted associativity phase is not unimodular")
    return omega


def solve_fusion(rep: MpoGroupRep, max_block: int = 3) -> FusionData:
    """Solve every pair, then extract the 3-cocycle (no gauge fixing of omega)."""
    G = rep.group
    W, Winv = {}, {}
    for g in G.elements():
        for h in G.elements():
            W[g, h], Winv[g, h] = solve_fusion_tensors(rep, g, h, max_block=max_block)
    omega = extract_3cocycle(G, W, Winv)
    if not check_cocycle3(G, omega, tol=1e-8):
        raise FusionError("extracted phases violate the cocycle condition")
    beta = np.ones((G.order, G.order), dtype=np.complex128)
    return FusionData(rep, W, Winv, omega, beta)


def rescale(fd: FusionData, beta: np.ndarray) -> FusionData:
    """Apply ``W -> beta W``, ``Winv -> conj(beta) Winv`` and update omega."""
    G = fd.group
    beta = np.asarray(beta, dtype=np.complex128)
    W = {k: beta[k] * w for k, w in fd.W.items()}
    Winv = {k: np.conj(beta[k]) * w for k, w in fd.Winv.items()}
    omega = extract_3cocycle(G, W, Winv)
    return replace(fd, W=W, Winv=Winv, omega=omega, beta=fd.beta * beta,
                   strict=False, v=None, Z=None)


def strict_associativity_residual(fd: FusionData) -> float:
    """Max deviation of the two association orders of Winv with omega dropped."""
    G = fd.group
    worst = 0.0
    for g in G.elements():
        for h in G.elements():
            for k in G.elements():
                lhs = np.einsum("mxc,xab->mabc", fd.Winv[G.mul(g, h), k], fd.Winv[g, h])
                rhs = np.einsum("may,ybc->mabc", fd.Winv[g, G.mul(h, k)], fd.Winv[h, k])
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def mixed_identity_residual(fd: FusionData) -> float:
    """Max deviation of ``Winv[g,hk] (1 x Winv[h,k]) (W[g,h] x 1) == Winv[gh,k]``."""
    G = fd.group
    worst = 0.0
    for g in G.elements():
        for h in G.elements():
            gh = G.mul(g, h)
            for k in G.elements():
                hk = G.mul(h, k)
                lhs = np.einsum("may,ybc,abx->mxc", fd.Winv[g, hk], fd.Winv[h, k], fd.W[g, h])
                worst = max(worst, float(np.max(np.abs(lhs - fd.Winv[gh, k]))))
    return worst


def _unit_phase(fd: FusionData):
    """Global phase ``lam`` making the left and right unit conditions compatible.

    Returns ``None`` when either one-sided system has no solution.
    """
    vw = _solve_affine(fd, use_w=True, use_winv=False)
    vv = _solve_affine(fd, use_w=False, use_winv=True)
    if vw is None or vv is None:
        return None
    i = int(np.argmax(np.abs(vw)))
    r = vv[i] / vw[i]
    if np.linalg.norm(vv - r * vw) > 1e-8 * max(np.linalg.norm(vv), 1.0):
        return None
    if abs(abs(r) - 1) > 1e-8:
        return None
    lam = np.conj(np.sqrt(r))
    v = vw / lam
    nz = np.flatnonzero(np.abs(v) > 1e-8)
    if nz.size and v[nz[0]].real < 0:
        lam = -lam
    return lam


def gauge_fix_strict(fd: FusionData) -> FusionData:
    """Rescale by a trivialising 2-cochain so that omega is identically 1.

    Raises :class:`AnomalousError` when no trivialiser exists.  A global
    phase is then chosen so that a unit vector (if any) satisfies both the
    left and the right unit conditions.
    """
    G = fd.group
    beta = coboundary_trivialize(G, fd.omega)
    if beta is None:
        raise AnomalousError("3-cocycle class is nontrivial; no strict gauge exists")
    out = rescale(fd, beta)
    lam = _unit_phase(out)
    if lam is not None and abs(lam - 1) > 1e-15:
        out = rescale(out, np.full((G.order, G.order), lam))
    if np.max(np.abs(out.omega - 1)) > 1e-9:
        raise FusionError("strict gauge could not be reached numerically")
    return replace(out, omega=np.ones_like(out.omega), strict=True)


# ---------------------------------------------------------------------------
# unit vector and Z matrices

def _solve_affine(fd: FusionData, use_w: bool = True, use_winv: bool = True):
    G = fd.group
    rows, rhs = [], []
    for g in G.elements():
        cg = fd.rep.block_dims[g]
        eye = np.eye(cg).reshape(-1)
        if use_w:
            # sum_c W[g,e][a, c, b] v_c = delta_ab
            rows.append(fd.W[g, 0].transpose(0, 2, 1).reshape(cg * cg, -1))
            rhs.append(eye)
        if use_winv:
            rows.append(fd.Winv[g, 0].reshape(cg * cg, -1))
            rhs.append(eye)
    A = np.concatenate(rows)
    y = np.concatenate(rhs).astype(np.complex128)
    v, *_ = np.linalg.lstsq(A, y, rcond=None)
    if np.max(np.abs(A @ v - y)) > 1e-8:
        return None
    return v


def unit_vector_residual(fd: FusionData, v: np.ndarray) -> float:
    G = fd.group
    worst = 0.0
    for g in G.elements():
        eye = np.eye(fd.rep.block_dims[g])
        left = np.einsum("acb,c->ab", fd.W[g, 0], v)
        right = np.einsum("abc,c->ab", fd.Winv[g, 0], v)
        worst = max(worst, float(np.max(np.abs(left - eye))), float(np.max(np.abs(right - eye))))
    return worst


def solve_unit_vector(fd: FusionData) -> np.ndarray:
    """Vector on the identity block contracting ``W[g, e]`` and ``Winv[g, e]`` to 1."""
    G = fd.group
    rows = []
    for g in G.elements():
        cg = fd.rep.block_dims[g]
        rows.append(fd.W[g, 0].transpose(0, 2, 1).reshape(cg * cg, -1))
        rows.append(fd.Winv[g, 0].reshape(cg * cg, -1))
    A = np.concatenate(rows)
    s = np.linalg.svd(A, compute_uv=False)
    null_dim = int(A.shape[1] - np.sum(s > 1e-10 * max(s[0], 1e-300)))
    v = _solve_affine(fd)
    if v is None:
        raise NoSolutionError("no unit vector for this representation")
    if null_dim > 0:
        raise NoSolutionError(f"unit vector is not unique: solution space of dimension {null_dim}")
    return v


def solve_Z_matrices(fd: FusionData, v: Optional[np.ndarray] = None) -> dict:
    """``Z_g = sum_c W[g, g^-1][a, b, c] v_c``, shape ``(chi_g, chi_{g^-1})``."""
    v = fd.v if v is None else v
    if v is None:
        raise FusionError("unit vector required")
    G = fd.group
    Z = {}
    for g in G.elements():
        Z[g] = np.einsum("abc,c->ab", fd.W[g, G.inv(g)], v)
        if np.linalg.matrix_rank(Z[g], tol=1e-10) != min(Z[g].shape):
            raise NoSolutionError(f"Z matrix of {g} is rank deficient")
    return Z


def z_matrix_residual(fd: FusionData, Z: dict) -> float:
    """Max deviation of ``W[g, g^-1 h][a,b,c] == sum Z_g[a,a'] Winv[g^-1, h][b; a', c]``."""
    G = fd.group
    worst = 0.0
    for g in G.elements():
        gi = G.inv(g)
        for h in G.elements():
            lhs = fd.W[g, G.mul(gi, h)]
            rhs = np.einsum("ax,bxc->abc", Z[g], fd.Winv[gi, h])
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def prepare_strict(rep: MpoGroupRep, max_block: int = 3) -> FusionData:
    """Solve, strict-gauge-fix, and attach the unit vector and Z matrices."""
    fd = gauge_fix_strict(solve_fusion(rep, max_block=max_block))
    v = solve_unit_vector(fd)
    Z = solve_Z_matrices(fd, v)
    return replace(fd, v=v, Z=Z)


def verify_fusion(fd: FusionData, tol: Optional[float] = None) -> Report:
    """Residuals of every structural identity that applies to ``fd``."""
    tol = default_tol() if tol is None else tol
    G = fd.group
    rep = Report(meta={"check": "fusion", "order": G.order, "strict": fd.strict})
    z = max(zipper_residual(fd.rep, g, h, fd.W[g, h], fd.Winv[g, h])
            for g in G.elements() for h in G.elements())
    o = max(orthogonality_residual(fd.W[g, h], fd.Winv[g, h])
            for g in G.elements() for h in G.elements())
    rep.add("zipper", "fusion tensors reduce T_g T_h to T_gh", z, tol)
    rep.add("orthogonality", "Winv W = 1 on each product block", o, tol)
    recomputed = extract_3cocycle(G, fd.W, fd.Winv)
    rep.add("cocycle-consistency", "stored omega equals re-extracted omega",
            float(np.max(np.abs(recomputed - fd.omega))), max(tol, 1e-8))
    if fd.strict:
        rep.add("strict-associativity", "omega == 1 after trivialisation",
                strict_associativity_residual(fd), tol)
        rep.add("mixed-identity", "Winv[g,hk](1 x Winv[h,k])(W[g,h] x 1) == Winv[gh,k]",
                mixed_identity_residual(fd), tol)
    if fd.v is not None:
        rep.add("unit-vector", "W[g,e] and Winv[g,e] contract with v to 1",
                unit_vector_residual(fd, fd.v), tol)
    if fd.Z is not None:
        rep.add("z-matrix", "W[g,g^-1 h] == Z_g Winv[g^-1,h]", z_matrix_residual(fd, fd.Z), tol)
    return rep
