"""Finite groups as multiplication tables, and low-degree group cohomology.

Group elements are the integers ``0..n-1`` with ``0`` the identity.
Cochains are dense complex arrays: a 2-cochain has shape ``(n, n)`` and a
3-cochain shape ``(n, n, n)``.

Coboundary conventions
----------------------
For a 2-cochain ``beta`` the 3-coboundary is::

    (d beta)(g, h, k) = beta(g, h) beta(gh, k) / (beta(h, k) beta(g, hk))

and for a 1-cochain ``gamma`` the 2-coboundary is::

    (d gamma)(g, h) = gamma(g) gamma(h) / gamma(gh)

Deciding whether a cocycle is a coboundary is done exactly on log-phases.
Writing ``omega = exp(2 pi i w)`` the question is whether ``w`` lies in
``image(D) + Z^N`` where ``D`` is the integer coboundary matrix.  An
unimodular row reduction ``U D = H`` splits this into a solvable real system
(rows with pivots) and integrality conditions (the zero rows of ``H``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "GroupError",
    "CocycleError",
    "FiniteGroup",
    "make_group",
    "cyclic",
    "dihedral",
    "symmetric",
    "direct_product",
    "quotient",
    "is_subgroup",
    "is_normal",
    "check_cocycle3",
    "check_cocycle2",
    "coboundary3",
    "coboundary2",
    "coboundary_trivialize",
    "trivialize2",
    "normalize_cocycle3",
    "cyclic_cocycle3",
    "trivial_cocycle3",
    "cocycle3_to_json",
    "cocycle3_from_json",
]

COCYCLE_TOL = 1e-10


class GroupError(ValueError):
    """Invalid multiplication table or subgroup data."""


class CocycleError(ValueError):
    """A phase table that fails the cocycle condition."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray
    names: tuple = field(default=())

    def __post_init__(self):
        tab = np.array(self.table, dtype=np.int64)
        tab.setflags(write=False)
        object.__setattr__(self, "table", tab)
        n = tab.shape[0]
        inv = np.empty(n, dtype=np.int64)
        for g in range(n):
            inv[g] = int(np.flatnonzero(tab[g] == 0)[0])
        inv.setflags(write=False)
        object.__setattr__(self, "inverse", inv)
        if not self.names:
            object.__setattr__(self, "names", tuple(str(g) for g in range(n)))

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverse[g])

    def conj(self, g: int, n: int) -> int:
        """Return g n g^-1."""
        return int(self.table[self.table[g, n], self.inverse[g]])

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def key(self) -> bytes:
        return self.table.tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and np.array_equal(
            self.table, other.table
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "table": self.table.tolist(),
            "names": list(self.names),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteGroup":
        grp = make_group(obj["table"], obj.get("names"))
        if int(obj.get("order", grp.order)) != grp.order:
            raise GroupError("declared order does not match the table")
        return grp


def make_group(table, names: Optional[Sequence[str]] = None) -> FiniteGroup:
    """Validate a multiplication table and wrap it as a :class:`FiniteGroup`."""
    tab = np.asarray(table)
    if tab.ndim != 2 or tab.shape[0] != tab.shape[1] or tab.shape[0] == 0:
        raise GroupError("table must be a non-empty square array")
    n = tab.shape[0]
    if not np.issubdtype(tab.dtype, np.integer):
        if not np.all(tab == np.round(tab)):
            raise GroupError("table entries must be integers")
        tab = tab.astype(np.int64)
    if tab.min() < 0 or tab.max() >= n:
        raise GroupError("table entries must lie in 0..n-1")
    ident = np.arange(n)
    if not (np.array_equal(tab[0], ident) and np.array_equal(tab[:, 0], ident)):
        raise GroupError("element 0 is not a two-sided identity")
    for g in range(n):
        if len(set(tab[g].tolist())) != n or len(set(tab[:, g].tolist())) != n:
            raise GroupError(f"element {g} is not invertible")
    # (gh)k == g(hk) for every triple
    lhs = tab[tab[:, :, None], np.arange(n)[None, None, :]]
    rhs = tab[np.arange(n)[:, None, None], tab[None, :, :]]
    if not np.array_equal(lhs, rhs):
        bad = np.argwhere(lhs != rhs)[0]
        raise GroupError(f"not associative at triple {tuple(bad.tolist())}")
    if names is not None and len(names) != n:
        raise GroupError("names must list one entry per element")
    return FiniteGroup(tab, tuple(names) if names is not None else ())


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group order must be positive")
    idx = np.arange(n)
    return make_group((idx[:, None] + idx[None, :]) % n)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; label k + n*f stands for r^k s^f."""
    if n < 1:
        raise GroupError("dihedral parameter must be positive")
    tab = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for a in range(2 * n):
        ka, fa = a % n, a // n
        for b in range(2 * n):
            kb, fb = b % n, b // n
            k = (ka + (kb if fa == 0 else -kb)) % n
            tab[a, b] = k + n * ((fa + fb) % 2)
    names = [f"r{k}" if f == 0 else f"r{k}s" for f in (0, 1) for k in range(n)]
    return make_group(tab, names)


def symmetric(m: int) -> FiniteGroup:
    """Symmetric group on m letters; permutations in lexicographic order.

    The product is composition, (p q)(i) = p(q(i)).
    """
    perms = list(itertools.permutations(range(m)))
    index = {p: i for i, p in enumerate(perms)}
    tab = [[index[tuple(p[q[i]] for i in range(m))] for q in perms] for p in perms]
    names = ["".join(str(x) for x in p) for p in perms]
    return make_group(tab, names)


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Direct product; the pair (g, h) gets label g * |b| + h."""
    na, nb = a.order, b.order
    tab = np.zeros((na * nb, na * nb), dtype=np.int64)
    for g1, h1, g2, h2 in itertools.product(range(na), range(nb), range(na), range(nb)):
        tab[g1 * nb + h1, g2 * nb + h2] = a.table[g1, g2] * nb + b.table[h1, h2]
    names = [f"({x},{y})" for x in a.names for y in b.names]
    return make_group(tab, names)


def is_subgroup(G: FiniteGroup, subset: Sequence[int]) -> bool:
    s = set(int(x) for x in subset)
    if 0 not in s or not s <= set(G.elements()):
        return False
    return all(G.mul(a, b) in s for a in s for b in s)


def is_normal(G: FiniteGroup, subset: Sequence[int]) -> bool:
    s = set(int(x) for x in subset)
    return is_subgroup(G, s) and all(G.conj(g, x) in s for g in G.elements() for x in s)


def quotient(G: FiniteGroup, N: Sequence[int]):
    """Quotient group G/N and the coset map g -> [g].

    Cosets are labelled in order of their smallest element, so the coset
    of the identity is 0.
    """
    N = sorted(set(int(x) for x in N))
    if not is_subgroup(G, N):
        raise GroupError(f"{N} is not a subgroup")
    if not is_normal(G, N):
        raise GroupError(f"{N} is not normal")
    cosets = []
    coset_of = np.full(G.order, -1, dtype=np.int64)
    for g in G.elements():
        if coset_of[g] >= 0:
            continue
        members = sorted(G.mul(g, x) for x in N)
        for m in members:
            coset_of[m] = len(cosets)
        cosets.append(members)
    q = len(cosets)
    tab = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            tab[a, b] = coset_of[G.mul(cosets[a][0], cosets[b][0])]
    return make_group(tab), coset_of


# ---------------------------------------------------------------------------
# cochains

def coboundary3(G: FiniteGroup, beta: np.ndarray) -> np.ndarray:
    """3-coboundary of a 2-cochain, see the module docstring."""
    n = G.order
    t = G.table
    g, h, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    return beta[g, h] * beta[t[g, h], k] / (beta[h, k] * beta[g, t[h, k]])


def coboundary2(G: FiniteGroup, gamma: np.ndarray) -> np.ndarray:
    n = G.order
    g, h = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return gamma[g] * gamma[h] / gamma[G.table[g, h]]


def _cocycle3_defect(G: FiniteGroup, w: np.ndarray) -> float:
    n = G.order
    t = G.table
    g, h, k, l = np.meshgrid(*(np.arange(n),) * 4, indexing="ij")
    lhs = w[g, h, k] * w[g, t[h, k], l] * w[h, k, l]
    rhs = w[t[g, h], k, l] * w[g, h, t[k, l]]
    return float(np.max(np.abs(lhs - rhs)))


def check_cocycle3(G: FiniteGroup, w, tol: float = COCYCLE_TOL) -> bool:
    """True iff ``w`` is a unit-modulus 3-cocycle on ``G``."""
    w = np.asarray(w, dtype=np.complex128)
    n = G.order
    if w.shape != (n, n, n):
        return False
    if np.max(np.abs(np.abs(w) - 1.0)) > tol:
        return False
    return _cocycle3_defect(G, w) <= tol


def check_cocycle2(G: FiniteGroup, w, tol: float = COCYCLE_TOL) -> bool:
    """True iff ``w(g,h) w(gh,k) == w(h,k) w(g,hk)`` with unit modulus."""
    w = np.asarray(w, dtype=np.complex128)
    n = G.order
    if w.shape != (n, n) or np.max(np.abs(np.abs(w) - 1.0)) > tol:
        return False
    t = G.table
    g, h, k = np.meshgrid(*(np.arange(n),) * 3, indexing="ij")
    lhs = w[g, h] * w[t[g, h], k]
    rhs = w[h, k] * w[g, t[h, k]]
    return float(np.max(np.abs(lhs - rhs))) <= tol


def trivial_cocycle3(G: FiniteGroup) -> np.ndarray:
    return np.ones((G.order,) * 3, dtype=np.complex128)


def cyclic_cocycle3(n: int, p: int = 1) -> np.ndarray:
    """Standard representative of class p in H^3(Z_n, U(1)) = Z_n.

    w(a, b, c) = exp(2 pi i p a (b + c - [b + c]_n) / n^2).  For n = 2 and
    p = 1 this is (-1)^(abc).
    """
    a, b, c = np.meshgrid(*(np.arange(n),) * 3, indexing="ij")
    carry = b + c - (b + c) % n
    return np.exp(2j * np.pi * p * a * carry / n**2)


# ---------------------------------------------------------------------------
# exact coboundary decision

def _coboundary_matrix3(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    D = np.zeros((n**3, n**2), dtype=np.int64)
    for g, h, k in itertools.product(range(n), repeat=3):
        r = (g * n + h) * n + k
        D[r, g * n + h] += 1
        D[r, table[g, h] * n + k] += 1
        D[r, h * n + k] -= 1
        D[r, g * n + table[h, k]] -= 1
    return D


def _coboundary_matrix2(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    D = np.zeros((n**2, n), dtype=np.int64)
    for g, h in itertools.product(range(n), repeat=2):
        r = g * n + h
        D[r, g] += 1
        D[r, h] += 1
        D[r, table[g, h]] -= 1
    return D


def _integer_row_reduce(D: np.ndarray):
    """Unimodular U with U @ D row-echelon; returns (U, rank).

    Rows ``rank:`` of ``U @ D`` vanish, so those rows of ``U`` form a
    Z-basis of the integer left kernel of ``D``.
    """
    A = np.array(D, dtype=np.int64)
    m, n = A.shape
    U = np.eye(m, dtype=np.int64)
    r = 0
    for col in range(n):
        if r == m:
            break
        while True:
            nz = np.flatnonzero(A[r:, col]) + r
            if nz.size == 0:
                break
            p = nz[np.argmin(np.abs(A[nz, col]))]
            if p != r:
                A[[r, p]] = A[[p, r]]
                U[[r, p]] = U[[p, r]]
            below = np.flatnonzero(A[r + 1:, col]) + r + 1
            if below.size == 0:
                break
            q = A[below, col] // A[r, col]
            A[below] -= q[:, None] * A[r][None, :]
            U[below] -= q[:, None] * U[r][None, :]
        if A[r, col] != 0:
            r += 1
    if np.abs(U).max() > 2**40:
        raise ArithmeticError("integer row reduction overflowed")
    return U, r


@lru_cache(maxsize=64)
def _reduction3(key: bytes, n: int):
    table = np.frombuffer(key, dtype=np.int64).reshape(n, n)
    D = _coboundary_matrix3(table)
    U, r = _integer_row_reduce(D)
    return D, U, r


@lru_cache(maxsize=64)
def _reduction2(key: bytes, n: int):
    table = np.frombuffer(key, dtype=np.int64).reshape(n, n)
    D = _coboundary_matrix2(table)
    U, r = _integer_row_reduce(D)
    return D, U, r


def _solve_log_phases(D, U, r, w: np.ndarray, int_tol: float):
    """Real b with D b = w mod 1, or None if the integrality test fails."""
    z = U @ w
    bottom = z[r:]
    if bottom.size and np.max(np.abs(bottom - np.round(bottom))) > int_tol:
        return None
    H = (U @ D)[:r].astype(float)
    b, *_ = np.linalg.lstsq(H, z[:r], rcond=None)
    return b


def coboundary_trivialize(G: FiniteGroup, w, tol: float = 1e-9) -> Optional[np.ndarray]:
    """Return ``beta`` with ``coboundary3(G, beta) == w``, or ``None``.

    ``None`` certifies that ``w`` represents a nontrivial class in
    H^3(G, U(1)).  Raises :class:`CocycleError` if ``w`` is not a cocycle.
    """
    w = np.asarray(w, dtype=np.complex128)
    if not check_cocycle3(G, w, tol=max(tol, COCYCLE_TOL)):
        raise CocycleError("input is not a 3-cocycle")
    n = G.order
    D, U, r = _reduction3(G.key(), n)
    logw = np.angle(w).reshape(-1) / (2 * np.pi)
    b = _solve_log_phases(D, U, r, logw, int_tol=1e-6)
    if b is None:
        return None
    beta = np.exp(2j * np.pi * b).reshape(n, n)
    if np.max(np.abs(coboundary3(G, beta) - w)) > max(tol, 1e-9):
        return None
    return beta


def trivialize2(G: FiniteGroup, w, tol: float = 1e-9) -> Optional[np.ndarray]:
    """Return ``gamma`` with ``coboundary2(G, gamma) == w``, or ``None``."""
    w = np.asarray(w, dtype=np.complex128)
    if not check_cocycle2(G, w, tol=max(tol, COCYCLE_TOL)):
        raise CocycleError("input is not a 2-cocycle")
    n = G.order
    D, U, r = _reduction2(G.key(), n)
    logw = np.angle(w).reshape(-1) / (2 * np.pi)
    b = _solve_log_phases(D, U, r, logw, int_tol=1e-6)
    if b is None:
        return None
    gamma = np.exp(2j * np.pi * b)
    if np.max(np.abs(coboundary2(G, gamma) - w)) > max(tol, 1e-9):
        return None
    return gamma


def normalize_cocycle3(G: FiniteGroup, w):
    """Cohomologous cocycle equal to 1 whenever an argument is the identity.

    Returns ``(w_normalized, beta)`` with ``w == w_normalized * coboundary3(beta)``.
    """
    w = np.asarray(w, dtype=np.complex128)
    a = w[0, 0, :]          # w(e, e, k)
    b = w[:, 0, 0]          # w(g, e, e)
    beta = b[:, None] / a[None, :]
    wn = w / coboundary3(G, beta)
    return wn, beta


def cocycle3_to_json(w: np.ndarray) -> list:
    w = np.asarray(w, dtype=np.complex128)
    return [[[[float(z.real), float(z.imag)] for z in row] for row in plane] for plane in w]


def cocycle3_from_json(obj, G: Optional[FiniteGroup] = None) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise CocycleError(f"cocycle JSON is not a numeric array: {exc}") from exc
    if arr.ndim != 4 or arr.shape[-1] != 2 or not (arr.shape[0] == arr.shape[1] == arr.shape[2]):
        raise CocycleError("cocycle JSON must be an n x n x n array of [re, im]")
    w = arr[..., 0] + 1j * arr[..., 1]
    if G is not None and w.shape[0] != G.order:
        raise CocycleError("cocycle size does not match the group order")
    return w
