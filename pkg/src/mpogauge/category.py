"""Fusion categories, their MPO representations and localised operators.

Objects are integers ``0..m-1`` with ``0`` the unit.  Fusion multiplicities
``N[a, b, c]`` are 0 or 1.  Quantum dimensions are the Perron eigenvector of
the summed fusion matrix, never read from input.

MPO tensors follow the group conventions of :mod:`mpogauge.mpo`.  Fusion
tensors are stored per channel::

    fusion[a, b][c] = (W, Winv),  W: (chi_a, chi_b, chi_c),  Winv: (chi_c, chi_a, chi_b)

with ``T_a T_b = sum_c W^c T_c Winv^c`` and ``Winv^c W^d = delta_cd 1_c``.

Fibonacci fixture
-----------------
The physical site holds a pair of labels ``(x, s)`` of the golden chain
(``d = 4``), like the double-line group MPO: the left bond copies the first
label, the right bond the second, so a ring forces ``s_i = x_{i+1}``.
``T_1`` is the projector onto admissible pairs; ``T_tau`` acts on a link
configuration with the weight ``[F^{x tau t}_tau]_{s y}`` per site (input
``(x, s)``, output ``(y, t)``).  Its bond carries ``(x, y)`` restricted to
admissible pairs, so ``chi_1 = 2`` and ``chi_tau = 3``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .anomaly import correlated_local
from .fusion import FusionData, NoSolutionError, fix_pair_gauge, stack_tensors
from .groups import FiniteGroup
from .mpo import DENSE_MATRIX_CAP, SizeGuardError, blocked_map, chain_dense
from .reports import Report, default_tol
from .tensor import _pinv

__all__ = [
    "CategoryError",
    "MultiplicityError",
    "FusionCategory",
    "validate_category",
    "trivial_category",
    "fibonacci_category",
    "group_category",
    "fibonacci_fsymbol",
    "CategoryMpoRep",
    "build_fibonacci_mpo",
    "category_rep_from_group",
    "factor_channels",
    "solve_category_fusion_tensors",
    "solve_category_fusion",
    "channel_zipper_residual",
    "channel_orthogonality_residual",
    "assoc_relation_residual",
    "dense_category_mpo",
    "local_op_category",
    "local_lambda_op",
    "CategorySplitChain",
    "make_category_chain",
    "category_unit_vector",
    "symmetrize_category",
    "CategoryActions",
    "category_action_tensors",
    "category_action_residual",
    "invariant_state_via_lambda",
    "verify_category",
]

PHI = (1 + 5**0.5) / 2


class CategoryError(ValueError):
    pass


class MultiplicityError(CategoryError):
    """A fusion or action multiplicity larger than one."""


# ---------------------------------------------------------------------------
# fusion rules

@dataclass(frozen=True, eq=False)
class FusionCategory:
    N: np.ndarray
    dual: tuple
    names: tuple = ()
    d: np.ndarray = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return int(self.N.shape[0])

    @property
    def D2(self) -> float:
        return float(np.sum(self.d**2))

    @property
    def lambda_weights(self) -> np.ndarray:
        return self.d / self.D2

    def channels(self, a: int, b: int) -> list:
        return [c for c in range(self.m) if self.N[a, b, c]]

    def to_json(self) -> dict:
        return {
            "objects": self.m,
            "N": self.N.tolist(),
            "dual": list(self.dual),
            "names": list(self.names),
            "d": [float(x) for x in self.d],
            "D2": self.D2,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FusionCategory":
        N = np.asarray(obj["N"], dtype=int)
        if N.shape != (obj["objects"],) * 3:
            raise CategoryError("N table does not match the number of objects")
        return validate_category(N, obj.get("dual"), obj.get("names") or None)


def _perron_dims(N: np.ndarray, iters: int = 10_000) -> np.ndarray:
    """Perron vector of ``1 + sum_a N_a`` by power iteration, scaled so ``d_0 = 1``.

    Power iteration from the all-ones vector keeps group categories at
    exactly ``d = 1``.
    """
    M = N.sum(axis=0).T.astype(float) + np.eye(N.shape[0])
    p = np.ones(N.shape[0])
    for _ in range(iters):
        q = M @ p
        q /= q[0]
        if np.array_equal(q, p) or np.max(np.abs(q - p)) < 1e-15:
            p = q
            break
        p = q
    if np.any(p <= 0):
        raise CategoryError("fusion matrix has no positive Perron vector")
    return p


def validate_category(N, dual: Optional[Sequence[int]] = None,
                      names: Optional[Sequence[str]] = None, tol: float = 1e-10) -> FusionCategory:
    """Check the fusion axioms, compute quantum dimensions and return the category."""
    N = np.asarray(N)
    if N.ndim != 3 or len(set(N.shape)) != 1:
        raise CategoryError("N must have shape (m, m, m)")
    if np.any(N < 0) or np.any(N != np.round(N)):
        raise CategoryError("multiplicities must be non-negative integers")
    N = N.astype(int)
    if np.any(N > 1):
        raise MultiplicityError("fusion multiplicities larger than one are not supported")
    m = N.shape[0]
    eye = np.eye(m, dtype=int)
    if not (np.array_equal(N[0], eye) and np.array_equal(N[:, 0, :], eye)):
        raise CategoryError("object 0 does not fuse as the unit")
    if dual is None:
        dual = []
        for a in range(m):
            cands = [b for b in range(m) if N[a, b, 0]]
            if len(cands) != 1:
                raise CategoryError(f"object {a} has no unique dual")
            dual.append(cands[0])
    dual = tuple(int(x) for x in dual)
    for a in range(m):
        if N[a, dual[a], 0] == 0:
            raise CategoryError(f"N[{a}, dual({a}), 1] vanishes")
        if dual[dual[a]] != a:
            raise CategoryError("duality is not an involution")
    for a, b, c in itertools.product(range(m), repeat=3):
        if not (N[a, b, c] == N[dual[a], c, b] == N[c, dual[b], a]):
            raise CategoryError(f"duality symmetry of N fails at ({a},{b},{c})")
    lhs = np.einsum("abe,ecd->abcd", N, N)
    rhs = np.einsum("afd,bcf->abcd", N, N)
    if not np.array_equal(lhs, rhs):
        raise CategoryError("fusion rules are not associative")
    d = _perron_dims(N)
    if np.max(np.abs(np.einsum("a,b->ab", d, d) - np.einsum("abc,c->ab", N, d))) > tol * max(1, d.max()**2):
        raise CategoryError("quantum dimensions violate d_a d_b = sum_c N_ab^c d_c")
    D2 = float(np.sum(d**2))
    if np.max(np.abs(np.einsum("abc,a,b->c", N, d, d) - D2 * d)) > tol * D2 * d.max():
        raise CategoryError("quantum dimensions violate sum_ab N_ab^c d_a d_b = D^2 d_c")
    if np.max(np.abs(d - d[list(dual)])) > tol:
        raise CategoryError("d_a differs from d of the dual")
    names = tuple(names) if names else tuple(str(a) for a in range(m))
    return FusionCategory(N, dual, names, d)


def trivial_category() -> FusionCategory:
    return validate_category(np.ones((1, 1, 1), dtype=int), names=["1"])


def fibonacci_category() -> FusionCategory:
    N = np.zeros((2, 2, 2), dtype=int)
    N[0, 0, 0] = N[0, 1, 1] = N[1, 0, 1] = N[1, 1, 0] = N[1, 1, 1] = 1
    return validate_category(N, names=["1", "tau"])


def group_category(G: FiniteGroup) -> FusionCategory:
    n = G.order
    N = np.zeros((n, n, n), dtype=int)
    for g in G.elements():
        for h in G.elements():
            N[g, h, G.mul(g, h)] = 1
    return validate_category(N, names=list(G.names))


def fibonacci_fsymbol(a, b, c, d, e, f) -> float:
    """``[F^{abc}_d]_{ef}`` for the real gauge with ``F^{ttt}_t`` symmetric."""
    adm = fibonacci_category().N
    if not (adm[a, b, e] and adm[e, c, d] and adm[b, c, f] and adm[a, f, d]):
        return 0.0
    if a == b == c == d == 1:
        M = np.array([[1 / PHI, PHI**-0.5], [PHI**-0.5, -1 / PHI]])
        return float(M[e, f])
    return 1.0


# ---------------------------------------------------------------------------
# MPO representations

@dataclass(frozen=True, eq=False)
class CategoryMpoRep:
    category: FusionCategory
    tensors: tuple
    fusion: dict = field(default_factory=dict)
    kind: str = "custom"

    def __post_init__(self):
        ts = tuple(np.asarray(T, dtype=np.complex128) for T in self.tensors)
        if len(ts) != self.category.m:
            raise CategoryError("need one tensor per object")
        if len({T.shape[2] for T in ts}) != 1:
            raise CategoryError("tensors must share the physical dimension")
        object.__setattr__(self, "tensors", ts)

    @property
    def d(self) -> int:
        return int(self.tensors[0].shape[2])

    @property
    def block_dims(self) -> tuple:
        return tuple(int(T.shape[0]) for T in self.tensors)

    @property
    def chi(self) -> int:
        return int(sum(self.block_dims))

    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.block_dims)]).astype(int)

    def to_json(self) -> dict:
        from .tensor import Tensor

        return {
            "category": self.category.to_json(),
            "kind": self.kind,
            "tensors": [Tensor(T, ["l", "r", "out", "in"]).to_json() for T in self.tensors],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CategoryMpoRep":
        from .tensor import Tensor

        cat = FusionCategory.from_json(obj["category"])
        ts = [Tensor.from_json(t).transpose(["l", "r", "out", "in"]).data for t in obj["tensors"]]
        return cls(cat, tuple(ts), kind=obj.get("kind", "custom"))


def build_fibonacci_mpo() -> CategoryMpoRep:
    """Double-line golden-chain MPO for ``{1, tau}`` (``d = 4``)."""
    cat = fibonacci_category()
    N = cat.N
    pairs = [(x, y) for x in range(2) for y in range(2) if N[x, y, 1]]  # admissible neighbours
    index = {p: i for i, p in enumerate(pairs)}
    T1 = np.zeros((2, 2, 4, 4), dtype=np.complex128)
    for x, s in itertools.product(range(2), repeat=2):
        if N[x, 1, s]:
            T1[x, s, 2 * x + s, 2 * x + s] = 1.0
    Tt = np.zeros((3, 3, 4, 4), dtype=np.complex128)
    for (x, y), (s, t) in itertools.product(pairs, repeat=2):
        w = fibonacci_fsymbol(x, 1, t, 1, s, y)
        if w != 0.0:
            Tt[index[x, y], index[s, t], 2 * y + t, 2 * x + s] = w
    return CategoryMpoRep(cat, (T1, Tt), kind="fibonacci")


def category_rep_from_group(fusion: FusionData) -> CategoryMpoRep:
    """View a group MPO with its solved fusion tensors as a category rep."""
    G = fusion.group
    cat = group_category(G)
    fus = {}
    for g in G.elements():
        for h in G.elements():
            fus[g, h] = {G.mul(g, h): (fusion.W[g, h], fusion.Winv[g, h])}
    return CategoryMpoRep(cat, fusion.rep.tensors, fus, kind="group")


def dense_category_mpo(rep: CategoryMpoRep, a: int, L: int) -> np.ndarray:
    if rep.d ** L > DENSE_MATRIX_CAP:
        raise SizeGuardError(f"d^L = {rep.d ** L} exceeds {DENSE_MATRIX_CAP}")
    return chain_dense([rep.tensors[a]] * L)


# ---------------------------------------------------------------------------
# fusion tensors per channel

def factor_channels(S: np.ndarray, targets: dict, max_block: int = 3,
                    gap_tol: float = 1e-8, zero_tol: float = 1e-9):
    """Split ``S = sum_c left_c T_c right_c`` over the channels in ``targets``.

    The blocked maps of all targets are stacked and inverted jointly.
    Channels with a vanishing intertwiner map to ``None``; a channel whose
    intertwiner has rank above one raises :class:`MultiplicityError`.
    """
    keys = list(targets)
    P = S.shape[0]
    k_found = None
    for k in range(1, max_block + 1):
        M = np.concatenate([blocked_map(targets[c], k) for c in keys])
        s = np.linalg.svd(M, compute_uv=False)
        if s.size and np.sum(s > 1e-10 * s[0]) == M.shape[0]:
            k_found = k
            break
    if k_found is None:
        raise NoSolutionError("channel tensors are not jointly injective")
    Sk = blocked_map(S, k_found)
    K = Sk @ _pinv(M)
    if np.linalg.norm(K @ M - Sk) > 1e-8 * max(np.linalg.norm(Sk), 1e-300):
        raise NoSolutionError("product is not in the span of the channel tensors")
    out, col = {}, 0
    scale = max(np.linalg.norm(K), 1e-300)
    for c in keys:
        q = targets[c].shape[0]
        Kc = K[:, col:col + q * q]
        col += q * q
        if np.linalg.norm(Kc) < zero_tol * scale:
            out[c] = None
            continue
        Mc = Kc.reshape(P, P, q, q).transpose(0, 2, 3, 1).reshape(P * q, q * P)
        u, sv, vh = np.linalg.svd(Mc, full_matrices=False)
        if sv.size > 1 and sv[1] > gap_tol * sv[0]:
            raise MultiplicityError(f"channel {c} appears with multiplicity above one")
        out[c] = ((u[:, 0] * np.sqrt(sv[0])).reshape(P, q), (vh[0] * np.sqrt(sv[0])).reshape(q, P))
    return out


def solve_category_fusion_tensors(rep: CategoryMpoRep, a: int, b: int, max_block: int = 3) -> dict:
    """``{c: (W, Winv)}`` over the channels with ``N_ab^c = 1``."""
    cat = rep.category
    chans = cat.channels(a, b)
    S = stack_tensors(rep.tensors[a], rep.tensors[b])
    parts = factor_channels(S, {c: rep.tensors[c] for c in chans}, max_block)
    ca, cb = rep.block_dims[a], rep.block_dims[b]
    out = {}
    for c in chans:
        if parts[c] is None:
            raise NoSolutionError(f"channel {c} of {a} x {b} is missing from the MPO product")
        left, right = parts[c]
        cc = rep.block_dims[c]
        out[c] = fix_pair_gauge(left.reshape(ca, cb, cc), right.reshape(cc, ca, cb))
    return out


def solve_category_fusion(rep: CategoryMpoRep, max_block: int = 3) -> CategoryMpoRep:
    m = rep.category.m
    fus = {(a, b): solve_category_fusion_tensors(rep, a, b, max_block)
           for a in range(m) for b in range(m)}
    return replace(rep, fusion=fus)


def channel_zipper_residual(rep: CategoryMpoRep, a: int, b: int) -> float:
    lhs = np.einsum("abpq,cdqr->acbdpr", rep.tensors[a], rep.tensors[b], optimize=True)
    rhs = np.zeros_like(lhs)
    for c, (W, Winv) in rep.fusion[a, b].items():
        rhs += np.einsum("acx,xypr,ybd->acbdpr", W, rep.tensors[c], Winv, optimize=True)
    return float(np.max(np.abs(lhs - rhs)))


def channel_orthogonality_residual(rep: CategoryMpoRep, a: int, b: int) -> float:
    worst = 0.0
    chans = rep.fusion[a, b]
    for c, (_, Winv) in chans.items():
        for e, (W, _) in chans.items():
            prod = np.einsum("xab,aby->xy", Winv, W)
            target = np.eye(prod.shape[0]) if c == e else np.zeros_like(prod)
            worst = max(worst, float(np.max(np.abs(prod - target))))
    return worst


def assoc_relation_residual(rep: CategoryMpoRep) -> float:
    """Max deviation of the recoupling identity behind the local algebra.

    For each admissible ``(a, b, c, d, e)``:
    ``Winv^d_{e,c} (x) W^d_{e,c} == sum_f left_f (x) right_f`` with
    ``left_f = Winv^d_{a,f} (1 x Winv^f_{b,c}) (W^e_{a,b} x 1)`` and
    ``right_f = (Winv^e_{a,b} x 1) (1 x W^f_{b,c}) W^d_{a,f}``.
    """
    cat = rep.category
    F = rep.fusion
    m = cat.m
    worst = 0.0
    for a, b, c in itertools.product(range(m), repeat=3):
        for e in cat.channels(a, b):
            for d in cat.channels(e, c):
                Wd, Vd = F[e, c][d]
                lhs = np.multiply.outer(Vd, Wd)
                rhs = np.zeros_like(lhs)
                We, Ve = F[a, b][e]
                for f in cat.channels(b, c):
                    if not cat.N[a, f, d]:
                        continue
                    Wf, Vf = F[b, c][f]
                    Wad, Vad = F[a, f][d]
                    left = np.einsum("abE,fbg,maf->mEg", We, Vf, Vad, optimize=True)
                    right = np.einsum("afn,bgf,Eab->Egn", Wad, Wf, Ve, optimize=True)
                    rhs += np.multiply.outer(left, right)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# ---------------------------------------------------------------------------
# localised operators

def local_op_category(rep: CategoryMpoRep, a: int) -> np.ndarray:
    """Six-leg local operator of object ``a`` on ``(l, site, r)``."""
    if not rep.fusion:
        raise CategoryError("fusion tensors have not been solved")
    terms = []
    for b in range(rep.category.m):
        for c, (W, Winv) in rep.fusion[a, b].items():
            terms.append((b, c, Winv, W))
    return correlated_local(rep.block_dims, rep.tensors[a], terms)


def local_lambda_op(rep: CategoryMpoRep) -> np.ndarray:
    cat = rep.category
    return sum(w * local_op_category(rep, a) for a, w in enumerate(cat.lambda_weights))


def _as_matrix(op6: np.ndarray) -> np.ndarray:
    n = op6.shape[0] * op6.shape[1] * op6.shape[2]
    return op6.reshape(n, n)


@dataclass(frozen=True, eq=False)
class CategorySplitChain:
    rep: CategoryMpoRep
    L: int
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def d(self) -> int:
        return self.rep.d

    @property
    def chi(self) -> int:
        return self.rep.chi

    @property
    def matter_dim(self) -> int:
        return self.d ** self.L

    @property
    def gauge_dim(self) -> int:
        return self.chi ** (2 * self.L)

    @property
    def dim(self) -> int:
        return self.matter_dim * self.gauge_dim

    def state_shape(self) -> tuple:
        return (self.d,) * self.L + (self.chi,) * (2 * self.L)

    def support(self, i: int) -> list:
        i %= self.L
        return [self.L + 2 * i, i, self.L + 2 * i + 1]

    def local_op(self, a) -> np.ndarray:
        if a not in self.cache:
            self.cache[a] = local_lambda_op(self.rep) if a == "lambda" else local_op_category(self.rep, a)
        return self.cache[a]


def make_category_chain(rep: CategoryMpoRep, L: int, cap: int = 2**16) -> CategorySplitChain:
    chain = CategorySplitChain(rep, L)
    if chain.dim > cap:
        raise SizeGuardError(f"split gauge space of dimension {chain.dim} exceeds {cap}")
    return chain


def _apply(chain: CategorySplitChain, op6: np.ndarray, i: int, X: np.ndarray) -> np.ndarray:
    axes = chain.support(i)
    Y = np.tensordot(op6, X, axes=([3, 4, 5], axes))
    return np.moveaxis(Y, [0, 1, 2], axes)


def category_unit_vector(rep: CategoryMpoRep) -> Optional[np.ndarray]:
    """Vector on the unit block with ``W^a_{a,1} v = 1`` and ``Winv^a_{a,1} v = 1``, if any."""
    rows, rhs = [], []
    for a in range(rep.category.m):
        W, Winv = rep.fusion[a, 0][a]
        ca = rep.block_dims[a]
        rows += [W.transpose(0, 2, 1).reshape(ca * ca, -1), Winv.reshape(ca * ca, -1)]
        rhs += [np.eye(ca).reshape(-1)] * 2
    A = np.concatenate(rows)
    y = np.concatenate(rhs).astype(np.complex128)
    v, *_ = np.linalg.lstsq(A, y, rcond=None)
    if np.max(np.abs(A @ v - y)) > 1e-8:
        return None
    e = np.zeros(rep.chi, dtype=np.complex128)
    e[:rep.block_dims[0]] = v
    return e


def symmetrize_category(chain: CategorySplitChain, psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``prod_i O_Lambda^[i] (psi (x) phi)`` as a flat vector."""
    psi = np.asarray(psi, dtype=np.complex128)
    phi = np.asarray(phi, dtype=np.complex128)
    if psi.shape != (chain.matter_dim,) or phi.shape != (chain.gauge_dim,):
        raise CategoryError("dimension mismatch between chain and input states")
    X = np.multiply.outer(psi, phi).reshape(chain.state_shape())
    P = chain.local_op("lambda")
    for i in range(chain.L):
        X = _apply(chain, P, i, X)
    return X.reshape(-1)


def product_gauge_state(chain: CategorySplitChain, leg: np.ndarray) -> np.ndarray:
    out = np.ones(1, dtype=np.complex128)
    for _ in range(2 * chain.L):
        out = np.kron(out, leg)
    return out


# ---------------------------------------------------------------------------
# MPS actions

@dataclass(frozen=True, eq=False)
class CategoryActions:
    X: dict
    Y: dict
    M: np.ndarray


def category_action_tensors(blocks: Sequence[np.ndarray], rep: CategoryMpoRep,
                            max_block: int = 5) -> CategoryActions:
    """Decompose ``T_a A_x = sum_y X A_y Y`` and read off the multiplicities."""
    blocks = [np.asarray(A, dtype=np.complex128) for A in blocks]
    targets = {y: A[..., None] for y, A in enumerate(blocks)}
    m = rep.category.m
    M = np.zeros((m, len(blocks), len(blocks)), dtype=int)
    X, Y = {}, {}
    for a in range(m):
        ca = rep.block_dims[a]
        for x, Ax in enumerate(blocks):
            S = stack_tensors(rep.tensors[a], Ax[..., None])
            parts = factor_channels(S, targets, max_block)
            Dx = Ax.shape[0]
            for y, part in parts.items():
                if part is None:
                    continue
                Dy = blocks[y].shape[0]
                Xa = part[0].reshape(ca, Dx, Dy)
                Ya = part[1].reshape(Dy, ca, Dx)
                prod = np.einsum("ayb,ybc->ac", Ya, Xa)
                c = np.trace(prod) / Dy
                if abs(c) < 1e-14:
                    raise NoSolutionError("vanishing action channel")
                X[a, x, y], Y[a, x, y] = Xa / np.sqrt(c), Ya / np.sqrt(c)
                M[a, x, y] = 1
    return CategoryActions(X, Y, M)


def category_action_residual(blocks, rep: CategoryMpoRep, acts: CategoryActions):
    """``(decomposition residual, orthogonality residual)``."""
    dec, orth = 0.0, 0.0
    m = rep.category.m
    for a in range(m):
        for x, Ax in enumerate(blocks):
            lhs = np.einsum("xypq,abq->xaybp", rep.tensors[a], Ax)
            rhs = np.zeros_like(lhs)
            ys = [y for y in range(len(blocks)) if acts.M[a, x, y]]
            for y in ys:
                rhs += np.einsum("xac,cdp,dyb->xaybp", acts.X[a, x, y], blocks[y], acts.Y[a, x, y])
            dec = max(dec, float(np.max(np.abs(lhs - rhs))))
            for y in ys:
                for z in ys:
                    prod = np.einsum("ayb,ybc->ac", acts.Y[a, x, y], acts.X[a, x, z])
                    target = np.eye(prod.shape[0]) if y == z else np.zeros_like(prod)
                    orth = max(orth, float(np.max(np.abs(prod - target))))
    return dec, orth


def invariant_state_via_lambda(A: np.ndarray, rep: CategoryMpoRep, L: int) -> np.ndarray:
    """``O_Lambda |psi_A>`` as a dense vector (zero output is returned, not raised)."""
    A = np.asarray(A, dtype=np.complex128)
    psi = chain_dense([A[..., None]] * L)[:, 0]
    OL = sum(w * dense_category_mpo(rep, a, L) for a, w in enumerate(rep.category.lambda_weights))
    return OL @ psi


# ---------------------------------------------------------------------------
# bundled verification

def verify_category(rep: CategoryMpoRep, L: int = 2, tol: Optional[float] = None,
                    seed: int = 0, split_L: int = 2) -> Report:
    """Run the category identities; dense MPO checks at ``L``, split-chain checks at ``split_L``."""
    tol = default_tol() if tol is None else tol
    rel = max(tol, 1e-8)
    cat = rep.category
    m = cat.m
    if not rep.fusion:
        rep = solve_category_fusion(rep)
    out = Report(meta={"check": "fusion-category", "objects": m, "L": L,
                       "d": [float(x) for x in cat.d], "D2": cat.D2})
    z = max(channel_zipper_residual(rep, a, b) for a in range(m) for b in range(m))
    o = max(channel_orthogonality_residual(rep, a, b) for a in range(m) for b in range(m))
    out.add("category-zipper", "T_a T_b = sum_c W T_c Winv", z, tol)
    out.add("category-orthogonality", "Winv^c W^d = delta_cd", o, tol)
    out.add("category-recoupling", "recoupling identity of the channel fusion tensors",
            assoc_relation_residual(rep), tol)
    dense = [dense_category_mpo(rep, a, L) for a in range(m)]
    alg = max(float(np.max(np.abs(dense[a] @ dense[b] - sum(cat.N[a, b, c] * dense[c] for c in range(m)))))
              for a in range(m) for b in range(m))
    out.add("mpo-algebra", "O_a O_b = sum_c N_ab^c O_c (dense)", alg, tol)
    loc = [_as_matrix(local_op_category(rep, a)) for a in range(m)]
    lalg = max(float(np.max(np.abs(loc[a] @ loc[b] - sum(cat.N[a, b, c] * loc[c] for c in range(m)))))
               for a in range(m) for b in range(m))
    out.add("local-algebra", "local operators fuse with N_ab^c", lalg, tol)
    OL = sum(w * loc[a] for a, w in enumerate(cat.lambda_weights))
    out.add("lambda-idempotent", "O_Lambda^2 = O_Lambda", float(np.max(np.abs(OL @ OL - OL))), rel)
    absorb = max(max(float(np.max(np.abs(loc[a] @ OL - cat.d[a] * OL))),
                     float(np.max(np.abs(OL @ loc[a] - cat.d[a] * OL)))) for a in range(m))
    out.add("lambda-absorbing", "O_a O_Lambda = O_Lambda O_a = d_a O_Lambda", absorb, rel)
    chain = make_category_chain(rep, split_L)
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=chain.matter_dim) + 1j * rng.normal(size=chain.matter_dim)
    leg = category_unit_vector(rep)
    if leg is None:
        leg = rng.normal(size=chain.chi) + 1j * rng.normal(size=chain.chi)
    vec = symmetrize_category(chain, psi, product_gauge_state(chain, leg))
    nrm = max(np.linalg.norm(vec), 1e-300)
    X = vec.reshape(chain.state_shape())
    worst = 0.0
    for i in range(split_L):
        for a in range(m):
            Y = _apply(chain, chain.local_op(a), i, X)
            worst = max(worst, float(np.linalg.norm(Y - cat.d[a] * X) / nrm))
    out.add("symmetrized-eigen", "O_a^[i] G psi = d_a G psi (relative)", worst, rel)
    return out
