"""Localised symmetry operators for possibly anomalous MPO symmetries.

Every matter site ``i`` carries its own left and right gauge legs
``[i]_l`` and ``[i]_r``, each the graded space ``(+)_g C^{chi_g}`` of
dimension ``chi``.  Neighbouring legs ``[i]_r`` and ``[i+1]_l`` are *not*
identified, so the local operators of different sites act on disjoint
factors.  States are arrays of shape ``(d,)*L + (chi,)*(2L)`` with gauge axes
ordered ``l_0, r_0, l_1, r_1, ...``.

The correlated local operator, in the basis ``(l, site, r)`` with outputs
first::

    <a', p', b'| u_g |a, p, b> = sum_h Winv[g,h][a'; x, a] T_g[x, y, p', p] W[g,h][y, b; b']

with ``a, b`` in block ``h`` and ``a', b'`` in block ``gh``.  The phases of
the two association orders cancel between the left and the right half, so
these operators multiply as the group for any 3-cocycle class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fusion import FusionData, NoSolutionError, factor_intertwiner, stack_tensors
from .groups import coboundary_trivialize
from .mpo import DENSE_MATRIX_CAP, SizeGuardError, chain_dense, dense_mpo
from .reports import Report, default_tol

__all__ = [
    "AnomalyError",
    "SplitGaugeChain",
    "make_split_chain",
    "anomaly_class",
    "correlated_local",
    "localized_op",
    "localized_matrix",
    "apply_split_local",
    "split_projector",
    "unit_gauge_state",
    "omega_state",
    "symmetrize_state",
    "symmetrize_closed_form",
    "omega_overlap_matrix",
    "check_omega_overlap",
    "symmetrize_operator",
    "apply_split_operator",
    "renormalize_onsite",
    "schmidt_rank",
    "BlockActions",
    "solve_block_actions",
    "symmetrized_mps",
    "block_mps_dense",
    "verify_anomalous",
]


class AnomalyError(ValueError):
    pass


def anomaly_class(fusion: FusionData) -> str:
    """``'trivial'``, ``'nontrivial'`` or ``'undecided'`` for the extracted 3-cocycle."""
    if fusion.strict:
        return "trivial"
    try:
        beta = coboundary_trivialize(fusion.group, fusion.omega)
    except Exception:
        return "undecided"
    return "nontrivial" if beta is None else "trivial"


@dataclass(frozen=True, eq=False)
class SplitGaugeChain:
    fusion: FusionData
    L: int
    local_ops: dict = field(default_factory=dict, repr=False)

    @property
    def group(self):
        return self.fusion.group

    @property
    def d(self) -> int:
        return self.fusion.rep.d

    @property
    def chi(self) -> int:
        return self.fusion.rep.chi

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

    def left_axis(self, i: int) -> int:
        return self.L + 2 * (i % self.L)

    def right_axis(self, i: int) -> int:
        return self.L + 2 * (i % self.L) + 1

    def support(self, i: int) -> list:
        return [self.left_axis(i), i % self.L, self.right_axis(i)]

    def local_op(self, g: int) -> np.ndarray:
        if g not in self.local_ops:
            self.local_ops[g] = localized_op(self.fusion, g)
        return self.local_ops[g]


def make_split_chain(fusion: FusionData, L: int, cap: int = 2**16) -> SplitGaugeChain:
    if L < 1:
        raise AnomalyError("L must be at least 1")
    chain = SplitGaugeChain(fusion, L)
    if chain.dim > cap:
        raise SizeGuardError(f"split gauge space of dimension {chain.dim} exceeds {cap}")
    return chain


# ---------------------------------------------------------------------------
# local operators

def _offsets(fusion: FusionData):
    dims = fusion.rep.block_dims
    return np.concatenate([[0], np.cumsum(dims)]).astype(int)


def correlated_local(block_dims: Sequence[int], T: np.ndarray, terms) -> np.ndarray:
    """Six-leg local operator ``sum Winv . T . W`` over the given block channels.

    ``terms`` yields ``(b, c, Winv, W)``: input legs in block ``b``, output
    legs in block ``c``, ``Winv`` of shape ``(chi_c, chi_T, chi_b)`` and ``W`` of
    shape ``(chi_T, chi_b, chi_c)``.  Shared by the group and category code.
    """
    off = np.concatenate([[0], np.cumsum(block_dims)]).astype(int)
    chi, d = int(off[-1]), T.shape[2]
    U = np.zeros((chi, d, chi, chi, d, chi), dtype=np.complex128)
    for b, c, Winv, W in terms:
        blk = np.einsum("mxa,xyqp,ybn->mqnapb", Winv, T, W, optimize=True)
        sb, sc = slice(off[b], off[b + 1]), slice(off[c], off[c + 1])
        U[sc, :, sc, sb, :, sb] += blk
    return U


def localized_op(fusion: FusionData, g: int) -> np.ndarray:
    """Six-leg correlated local operator, axes ``(l', p', r', l, p, r)``."""
    if not fusion.W or not fusion.Winv:
        raise AnomalyError("fusion tensors are missing")
    G = fusion.group
    terms = ((h, G.mul(g, h), fusion.Winv[g, h], fusion.W[g, h]) for h in G.elements())
    return correlated_local(fusion.rep.block_dims, fusion.rep.tensors[g], terms)


def localized_matrix(fusion: FusionData, g: int) -> np.ndarray:
    U = localized_op(fusion, g)
    n = U.shape[0] * U.shape[1] * U.shape[2]
    return U.reshape(n, n)


def apply_split_local(chain: SplitGaugeChain, op6: np.ndarray, i: int, X: np.ndarray) -> np.ndarray:
    axes = chain.support(i)
    Y = np.tensordot(op6, X, axes=([3, 4, 5], axes))
    return np.moveaxis(Y, [0, 1, 2], axes)


def _average(chain: SplitGaugeChain) -> np.ndarray:
    if "avg" not in chain.local_ops:
        G = chain.group
        chain.local_ops["avg"] = sum(chain.local_op(g) for g in G.elements()) / G.order
    return chain.local_ops["avg"]


def split_projector(chain: SplitGaugeChain, X: np.ndarray) -> np.ndarray:
    """Product over sites of the group-averaged local operators."""
    P = _average(chain)
    for i in range(chain.L):
        X = apply_split_local(chain, P, i, X)
    return X


# ---------------------------------------------------------------------------
# gauge states and symmetrisation

def _unit_leg(fusion: FusionData) -> np.ndarray:
    if fusion.v is None:
        raise AnomalyError("unit vector missing from fusion data")
    e = np.zeros(fusion.rep.chi, dtype=np.complex128)
    off = _offsets(fusion)
    e[off[0]:off[1]] = fusion.v
    return e


def unit_gauge_state(chain: SplitGaugeChain) -> np.ndarray:
    """Unit vector on every gauge leg, flattened over the gauge axes."""
    e = _unit_leg(chain.fusion)
    out = np.ones(1, dtype=np.complex128)
    for _ in range(2 * chain.L):
        out = np.kron(out, e)
    return out


def omega_state(chain: SplitGaugeChain) -> np.ndarray:
    """Maximally entangled pairs on every ``([i]_r, [i+1]_l)``, normalised."""
    chi, L = chain.chi, chain.L
    pair = np.eye(chi, dtype=np.complex128) / np.sqrt(chi)
    X = np.ones((), dtype=np.complex128)
    for _ in range(L):
        X = np.multiply.outer(X, pair)
    # axes now (r_0, l_1, r_1, l_2, ..., r_{L-1}, l_0); rotate l_0 to the front
    X = np.moveaxis(X, 2 * L - 1, 0)
    return X.reshape(-1)


def _coupled(chain: SplitGaugeChain, psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    phi = np.asarray(phi, dtype=np.complex128)
    if psi.shape[0] != chain.matter_dim:
        raise AnomalyError(f"matter vector of dimension {psi.shape[0]}, expected {chain.matter_dim}")
    if phi.shape != (chain.gauge_dim,):
        raise AnomalyError(f"gauge state of dimension {phi.shape}, expected {chain.gauge_dim}")
    batch = psi.shape[1:]
    X = np.multiply.outer(psi, phi)
    if batch:
        X = np.moveaxis(X, 1, -1)
    return X.reshape(chain.state_shape() + batch)


def symmetrize_state(chain: SplitGaugeChain, psi: np.ndarray, phi: Optional[np.ndarray] = None) -> np.ndarray:
    """Projector path: ``P (psi (x) phi)``; ``phi`` defaults to the unit state."""
    phi = unit_gauge_state(chain) if phi is None else phi
    X = split_projector(chain, _coupled(chain, psi, phi))
    return X.reshape((chain.dim,) + X.shape[2 * chain.L + chain.L:])


def symmetrize_closed_form(chain: SplitGaugeChain, psi: np.ndarray) -> np.ndarray:
    """Unit-state symmetrisation as a product of single-site maps.

    Each site is sent through ``(1/|G|) sum_g T_g`` with both virtual legs of
    ``T_g`` left open as the gauge legs of that site (block ``g``).  No
    fusion tensor enters this path.
    """
    fd = chain.fusion
    G = fd.group
    off = _offsets(fd)
    chi, d, L = chain.chi, chain.d, chain.L
    M = np.zeros((chi, d, chi, d), dtype=np.complex128)  # (l, p', r, p)
    for g in G.elements():
        s = slice(off[g], off[g + 1])
        M[s, :, s, :] += fd.rep.tensors[g].transpose(0, 2, 1, 3)
    M /= G.order
    psi = np.asarray(psi, dtype=np.complex128)
    X = psi.reshape((d,) * L)
    for i in range(L):
        X = np.tensordot(M, X, axes=(3, 3 * i))
        # new legs (l, p, r) at the front; restore site-major order
        X = np.moveaxis(X, [0, 1, 2], [3 * i, 3 * i + 1, 3 * i + 2])
    # X has axes (l_0, p_0, r_0, l_1, ...) -> matter first, then (l_i, r_i)
    perm = [3 * i + 1 for i in range(L)] + [a for i in range(L) for a in (3 * i, 3 * i + 2)]
    return X.transpose(perm).reshape(-1)


def omega_overlap_matrix(chain: SplitGaugeChain) -> np.ndarray:
    """Matter operator ``<Omega| P |Omega>``."""
    if chain.matter_dim > DENSE_MATRIX_CAP:
        raise SizeGuardError("matter dimension too large for a dense overlap")
    Om = omega_state(chain)
    eye = np.eye(chain.matter_dim, dtype=np.complex128)
    X = split_projector(chain, _coupled(chain, eye, Om))
    X = X.reshape(chain.matter_dim, chain.gauge_dim, chain.matter_dim)
    return np.einsum("g,agb->ab", Om.conj(), X)


def check_omega_overlap(chain: SplitGaugeChain, psi: Optional[np.ndarray] = None,
                        tol: Optional[float] = None, seed: int = 0) -> Report:
    """Proportionality of ``<Omega|P|Omega>`` to ``sum_g U_g`` and the overlap identity."""
    tol = default_tol() if tol is None else tol
    G = chain.group
    rep = Report(meta={"check": "omega-overlap", "L": chain.L})
    M = omega_overlap_matrix(chain)
    S = sum(dense_mpo(chain.fusion.rep, g, chain.L) for g in G.elements())
    c = np.vdot(S, M) / np.vdot(S, S)
    rep.meta["omega_scalar"] = [float(c.real), float(c.imag)]
    rep.add("omega-proportionality", "<Omega|P|Omega> proportional to sum_g U_g",
            float(np.max(np.abs(M - c * S))), tol, note=f"scalar {c:.12g}")
    if psi is None:
        rng = np.random.default_rng(seed)
        psi = rng.normal(size=chain.matter_dim) + 1j * rng.normal(size=chain.matter_dim)
    Om = omega_state(chain)
    base = M @ psi
    for g in G.elements():
        Ug = dense_mpo(chain.fusion.rep, g, chain.L)
        X = symmetrize_state(chain, Ug @ psi, Om).reshape(chain.matter_dim, chain.gauge_dim)
        lhs = X @ Om.conj()
        rep.add(f"omega-overlap[{g}]", "<Omega|G_Omega U_g psi> = <Omega|G_Omega psi>",
                float(np.max(np.abs(lhs - base))), tol)
    return rep


# ---------------------------------------------------------------------------
# operators

def symmetrize_operator(chain: SplitGaugeChain, O: np.ndarray, start: int, length: int) -> np.ndarray:
    """Dense symmetrised operator on the segment's sites and their gauge legs.

    The basis of the returned matrix is site-major ``(l, p, r)`` per segment
    site.  ``O`` is extended by ``|v><v|`` on both gauge legs of every
    segment site and then summed over conjugations by the local operators.
    The segment never wraps onto itself because gauge legs are not shared.
    """
    if not (1 <= length <= chain.L and 0 <= start < chain.L):
        raise AnomalyError("segment out of range")
    G = chain.group
    d, chi = chain.d, chain.chi
    dl = d ** length
    O = np.asarray(O, dtype=np.complex128)
    if O.shape != (dl, dl):
        raise AnomalyError(f"operator must be {dl} x {dl}")
    n = (chi * d * chi) ** length
    if n > DENSE_MATRIX_CAP:
        raise SizeGuardError(f"segment operator of dimension {n} exceeds {DENSE_MATRIX_CAP}")
    e = _unit_leg(chain.fusion)
    rho = np.outer(e, e.conj())
    # assemble E[O] in site-major order
    Ot = O.reshape((d,) * (2 * length))
    M = Ot
    for _ in range(2 * length):
        M = np.multiply.outer(M, rho)
    # axes: p'_0..p'_{k-1}, p_0..p_{k-1}, (l'_0, l_0), (r'_0, r_0), (l'_1, l_1), ...
    k = length
    out_axes, in_axes = [], []
    for j in range(k):
        lo, li = 2 * k + 4 * j, 2 * k + 4 * j + 1
        ro, ri = 2 * k + 4 * j + 2, 2 * k + 4 * j + 3
        out_axes += [lo, j, ro]
        in_axes += [li, k + j, ri]
    M = M.transpose(out_axes + in_axes).reshape(n, n)
    locs = [localized_matrix(chain.fusion, g) for g in G.elements()]
    s = chi * d * chi
    for j in range(k):
        # conjugate only the j-th site factor of both the row and column index
        left, right = s ** j, s ** (k - j - 1)
        Mt = M.reshape(left, s, right, left, s, right)
        acc = np.zeros_like(Mt)
        for g in G.elements():
            Y = np.einsum("xa,iajkbl->ixjkbl", locs[g], Mt, optimize=True)
            acc += np.einsum("ixjkbl,by->ixjkyl", Y, locs[G.inv(g)], optimize=True)
        M = acc.reshape(n, n)
    return M


def apply_split_operator(chain: SplitGaugeChain, M: np.ndarray, start: int, length: int,
                         vec: np.ndarray) -> np.ndarray:
    """Apply a site-major segment operator to a full split-chain vector."""
    X = np.asarray(vec, dtype=np.complex128).reshape(chain.state_shape())
    axes = []
    for j in range(length):
        axes += chain.support(start + j)
    shape = (chain.chi, chain.d, chain.chi) * length
    Mt = M.reshape(shape + shape)
    Y = np.tensordot(Mt, X, axes=(list(range(3 * length, 6 * length)), axes))
    Y = np.moveaxis(Y, list(range(3 * length)), axes)
    return Y.reshape(-1)


# ---------------------------------------------------------------------------
# on-site reduction

def renormalize_onsite(fusion: FusionData, tol: Optional[float] = None) -> Report:
    """Two neighbouring on-site local operators in the coarse-grained basis.

    On-site local operators correlate the two gauge legs of a site, so their
    common range holds one group label per site.  The isometry sends
    ``|a, p, q, b>`` to ``|a, p, a> (x) |b, q, b>`` (legs ``l, site, r`` of
    two neighbouring sites): the outer legs keep their coordinates, the two
    inner legs are identified with them, and the matter pair becomes one
    site of dimension ``d^2``.  Under it the product of the two local
    operators becomes ``L_g (x) (u_g (x) u_g) (x) L_g``.
    """
    tol = default_tol() if tol is None else tol
    rep = fusion.rep
    if not rep.is_onsite():
        raise AnomalyError("renormalisation needs an on-site representation")
    G = fusion.group
    n, d = G.order, rep.d
    out = Report(meta={"check": "onsite-renormalisation", "order": n})
    # the isometry is a coordinate embedding, so everything factorises per site
    cols = {(a, p, a, b, q, b) for a, p, q, b in itertools.product(range(n), range(d), range(d), range(n))}
    out.add("isometry", "coarse-graining map is an isometry",
            float(n * d * d * n - len(cols)), tol)
    u = np.stack([rep.tensors[g][0, 0] for g in G.elements()])
    off_diag = ~np.eye(n, dtype=bool)
    worst, leak = 0.0, 0.0
    for g in G.elements():
        ug = localized_op(fusion, g)
        Ud = np.einsum("xqyapa->xqyap", ug)          # input legs l = r = a
        inside = np.einsum("xqxap->xqap", Ud)        # output legs l' = r' too
        outside = np.abs(Ud).max(axis=(1, 3, 4))[off_diag].max(initial=0.0)
        got = np.einsum("xpaP,yqbQ->xpqyaPQb", inside, inside).reshape(n * d * d * n, -1)
        Lg = np.zeros((n, n))
        for h in G.elements():
            Lg[G.mul(g, h), h] = 1
        target = np.kron(np.kron(Lg, np.kron(u[g], u[g])), Lg)
        worst = max(worst, float(np.max(np.abs(got - target))))
        leak = max(leak, float(outside) * float(np.abs(Ud).max()))
    out.add("renormalised-operator", "u_g (x) u_g -> L_g (x) u_g (x) L_g entrywise", worst, tol)
    out.add("invariant-range", "local operators preserve the coarse-grained subspace", leak, tol)
    return out


def schmidt_rank(vec: np.ndarray, dims: Sequence[int], cut: Sequence[int], tol: float = 1e-10) -> int:
    """Rank across the bipartition (axes in ``cut``) | (the rest)."""
    X = np.asarray(vec).reshape(dims)
    rest = [a for a in range(len(dims)) if a not in cut]
    m = X.transpose(list(cut) + rest).reshape(int(np.prod([dims[a] for a in cut])), -1)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


# ---------------------------------------------------------------------------
# block MPS

@dataclass(frozen=True, eq=False)
class BlockActions:
    """Action tensors ``T_g A_x = X[g, x] A_{g.x} Y[g, x]`` for a permutation action."""

    perm: np.ndarray
    X: dict
    Y: dict


def solve_block_actions(blocks: Sequence[np.ndarray], fusion: FusionData, perm,
                        max_block: int = 3) -> BlockActions:
    """``perm[g][x]`` is the block reached from ``x`` by ``g``."""
    rep = fusion.rep
    G = fusion.group
    perm = np.asarray(perm, dtype=int)
    if perm.shape != (G.order, len(blocks)):
        raise AnomalyError("perm must have shape (|G|, number of blocks)")
    for g in G.elements():
        if sorted(perm[g]) != list(range(len(blocks))):
            raise AnomalyError(f"perm[{g}] is not a permutation")
    X, Y = {}, {}
    for g in G.elements():
        Tg = rep.tensors[g]
        chi = Tg.shape[0]
        for x, Ax in enumerate(blocks):
            y = int(perm[g, x])
            Ay = np.asarray(blocks[y], dtype=np.complex128)[..., None]
            S = stack_tensors(Tg, np.asarray(Ax, dtype=np.complex128)[..., None])
            try:
                left, right = factor_intertwiner(S, Ay, max_block, what=f"block action ({g},{x})")
            except NoSolutionError as exc:
                raise AnomalyError(f"blocks not permuted consistently: {exc}") from exc
            Dx, Dy = Ax.shape[0], Ay.shape[0]
            Xg = left.reshape(chi, Dx, Dy)
            Yg = right.reshape(Dy, chi, Dx)
            prod = np.einsum("ayb,ybc->ac", Yg, Xg)
            c = np.trace(prod) / Dy
            if abs(c) < 1e-14:
                raise AnomalyError("vanishing block action")
            X[g, x], Y[g, x] = Xg / np.sqrt(c), Yg / np.sqrt(c)
    return BlockActions(perm, X, Y)


def symmetrized_mps(blocks: Sequence[np.ndarray], fusion: FusionData, actions: BlockActions) -> dict:
    """Tensors of the symmetrised block MPS, one entry per block ``x``.

    ``A[x]`` carries the label ``g`` on its virtual legs (block ``g.x``),
    ``B[x]`` joins ``Y[g, x]`` and ``X[h, x]`` with gauge legs
    ``([i]_r in block g, [i+1]_l in block h)``, and ``C[x]`` is the single
    site form ``sum_g X[g, x] A_{g.x} Y[g, x]`` with legs ``(l, p, r)``.
    """
    G = fusion.group
    n = G.order
    off = _offsets(fusion)
    chi = fusion.rep.chi
    out = {"A": {}, "B": {}, "C": {}}
    for x, Ax in enumerate(blocks):
        Dx = Ax.shape[0]
        dims = [blocks[actions.perm[g, x]].shape[0] for g in G.elements()]
        vo = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        tot = int(vo[-1])
        d = Ax.shape[2]
        At = np.zeros((tot, tot, d), dtype=np.complex128)
        B = np.zeros((tot, tot, chi, chi), dtype=np.complex128)
        C = np.zeros((Dx, Dx, chi, d, chi), dtype=np.complex128)
        for g in G.elements():
            y = actions.perm[g, x]
            sg = slice(vo[g], vo[g + 1])
            At[sg, sg] = blocks[y]
            eg = slice(off[g], off[g + 1])
            C[:, :, eg, :, eg] += np.einsum("lac,cdp,dre->aelpr", actions.X[g, x], blocks[y],
                                            actions.Y[g, x]) / n
            for h in G.elements():
                sh = slice(vo[h], vo[h + 1])
                eh = slice(off[h], off[h + 1])
                B[sg, sh, eg, eh] = np.einsum("arc,lcb->abrl", actions.Y[g, x], actions.X[h, x]) / n
        out["A"][x], out["B"][x] = At, B.reshape(tot, tot, chi * chi)
        out["C"][x] = C.reshape(Dx, Dx, chi * d * chi)
    return out


def block_mps_dense(chain: SplitGaugeChain, data: dict, form: str = "B") -> np.ndarray:
    """Dense split-chain vector of ``sum_x`` of the symmetrised block MPS."""
    L, d, chi = chain.L, chain.d, chain.chi
    total = np.zeros(chain.dim, dtype=np.complex128)
    for x in data["A"]:
        if form == "B":
            At, B = data["A"][x], data["B"][x]
            cell = np.tensordot(At, B, axes=(1, 0)).transpose(0, 2, 1, 3)
            cell = cell.reshape(At.shape[0], B.shape[1], d * chi * chi)
            vec = chain_dense([cell[..., None]] * L, cap=chain.dim)[:, 0]
            # per site (p_i, r_i, l_{i+1}); site 0's left leg sits at the end
            Xt = vec.reshape((d, chi, chi) * L)
            Xt = np.moveaxis(Xt, 3 * L - 1, 0)  # l_0 to the front
            # order now (l_0, p_0, r_0, l_1, p_1, r_1, ...)
        else:
            C = data["C"][x]
            vec = chain_dense([C[..., None]] * L, cap=chain.dim)[:, 0]
            Xt = vec.reshape((chi, d, chi) * L)
        perm = [3 * i + 1 for i in range(L)] + [a for i in range(L) for a in (3 * i, 3 * i + 2)]
        total += Xt.transpose(perm).reshape(-1)
    return total


# ---------------------------------------------------------------------------
# bundled verification

def verify_anomalous(fusion: FusionData, L: int = 2, tol: Optional[float] = None,
                     seed: int = 0) -> Report:
    """Group law of the local operators, symmetrisation two-path check, Omega identities."""
    tol = default_tol() if tol is None else tol
    G = fusion.group
    rep = Report(meta={"check": "anomalous-localisation", "L": L,
                       "anomaly_class": anomaly_class(fusion)})
    mats = [localized_matrix(fusion, g) for g in G.elements()]
    law = max(float(np.max(np.abs(mats[g] @ mats[h] - mats[G.mul(g, h)])))
              for g in G.elements() for h in G.elements())
    rep.add("localized-group-law", "correlated local operators multiply as the group", law, tol)
    rep.add("localized-unit-projector", "local operator of the identity is a projector",
            float(np.max(np.abs(mats[0] @ mats[0] - mats[0]))), tol)
    chain = make_split_chain(fusion, L)
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=chain.matter_dim) + 1j * rng.normal(size=chain.matter_dim)
    psi = sum(dense_mpo(fusion.rep, g, L) for g in G.elements()) @ psi / G.order
    if fusion.v is not None:
        a = symmetrize_state(chain, psi)
        b = symmetrize_closed_form(chain, psi)
        rep.add("symmetrize-two-path", "projector path equals the single-site closed form",
                float(np.max(np.abs(a - b))), tol)
        X = a.reshape(chain.state_shape())
        worst = 0.0
        for i in range(L):
            for g in G.elements():
                Y = apply_split_local(chain, chain.local_op(g), i, X)
                worst = max(worst, float(np.max(np.abs(Y - X))))
        rep.add("symmetrized-invariance", "symmetrised state is invariant under every local operator",
                worst, tol)
    rep.extend(check_omega_overlap(chain, psi, tol))
    return rep
