"""Dense complex tensors with named axes.

Every structural object in the package (MPO tensors, fusion tensors, states)
is ultimately a dense complex array.  :class:`Tensor` attaches a label to
each axis so that contractions can be written by matching labels instead of
by positional index bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TensorError",
    "Tensor",
    "contract",
    "matricize",
    "dematricize",
    "pseudo_inverse",
    "distance",
    "DEFAULT_RANK_TOL",
]

DEFAULT_RANK_TOL = 1e-10


class TensorError(ValueError):
    """Raised for malformed tensors or incompatible axis pairings."""


@dataclass(frozen=True)
class Tensor:
    """A dense complex array with one distinct string label per axis.

    The array is copied on construction and marked read-only, so tensors can
    be shared freely.
    """

    data: np.ndarray
    labels: tuple

    def __init__(self, data, labels: Sequence[str]):
        arr = np.array(data, dtype=np.complex128)
        labels = tuple(str(lbl) for lbl in labels)
        if arr.ndim != len(labels):
            raise TensorError(
                f"{arr.ndim} axes but {len(labels)} labels: {labels}"
            )
        if len(set(labels)) != len(labels):
            raise TensorError(f"axis labels must be distinct: {labels}")
        if not np.all(np.isfinite(arr)):
            raise TensorError("tensor entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "labels", labels)

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise TensorError(f"label {label!r} not in {self.labels}") from None

    def extent(self, label: str) -> int:
        return self.data.shape[self.axis(label)]

    def transpose(self, labels: Sequence[str]) -> "Tensor":
        """Reorder axes to the given label order."""
        if sorted(labels) != sorted(self.labels):
            raise TensorError(f"{labels} is not a permutation of {self.labels}")
        perm = [self.axis(lbl) for lbl in labels]
        return Tensor(np.transpose(self.data, perm), labels)

    def relabel(self, mapping: dict) -> "Tensor":
        return Tensor(self.data, [mapping.get(lbl, lbl) for lbl in self.labels])

    def __add__(self, other: "Tensor") -> "Tensor":
        other = other.transpose(self.labels)
        return Tensor(self.data + other.data, self.labels)

    def __mul__(self, scalar) -> "Tensor":
        return Tensor(self.data * scalar, self.labels)

    __rmul__ = __mul__

    # JSON form: {"shape": [...], "labels": [...], "data": [[re, im], ...]}
    def to_json(self) -> dict:
        flat = self.data.reshape(-1)
        return {
            "shape": list(self.data.shape),
            "labels": list(self.labels),
            "data": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Tensor":
        shape = [int(s) for s in obj["shape"]]
        if any(s <= 0 for s in shape):
            raise TensorError(f"extents must be positive: {shape}")
        pairs = np.asarray(obj["data"], dtype=float).reshape(-1, 2)
        if pairs.shape[0] != int(np.prod(shape)):
            raise TensorError(
                f"{pairs.shape[0]} entries stored for shape {shape}"
            )
        data = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape)
        return cls(data, obj["labels"])


def contract(a: Tensor, b: Tensor, pairing: Iterable[tuple]) -> Tensor:
    """Sum over paired axes of ``a`` and ``b``.

    ``pairing`` lists ``(label_in_a, label_in_b)`` pairs.  The result carries
    the unpaired axes of ``a`` followed by the unpaired axes of ``b``.
    """
    pairing = list(pairing)
    left = [p[0] for p in pairing]
    right = [p[1] for p in pairing]
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        raise TensorError(f"a label is paired twice in {pairing}")
    ax_a = [a.axis(lbl) for lbl in left]
    ax_b = [b.axis(lbl) for lbl in right]
    for la, lb, i, j in zip(left, right, ax_a, ax_b):
        if a.shape[i] != b.shape[j]:
            raise TensorError(
                f"extent mismatch {la}:{a.shape[i]} vs {lb}:{b.shape[j]}"
            )
    free_a = [lbl for lbl in a.labels if lbl not in left]
    free_b = [lbl for lbl in b.labels if lbl not in right]
    if set(free_a) & set(free_b):
        raise TensorError(
            f"free labels collide: {sorted(set(free_a) & set(free_b))}"
        )
    out = np.tensordot(a.data, b.data, axes=(ax_a, ax_b))
    return Tensor(out, free_a + free_b)


def matricize(t: Tensor, row_labels: Sequence[str], col_labels: Sequence[str],
              row_name: str = "row", col_name: str = "col") -> Tensor:
    """Group axes into a matrix with rows ``row_labels`` and columns ``col_labels``."""
    row_labels, col_labels = list(row_labels), list(col_labels)
    if sorted(row_labels + col_labels) != sorted(t.labels):
        raise TensorError(
            f"{row_labels} + {col_labels} does not partition {t.labels}"
        )
    arr = t.transpose(row_labels + col_labels).data
    nr = int(np.prod([t.extent(lbl) for lbl in row_labels]))
    return Tensor(arr.reshape(nr, -1), [row_name, col_name])


def dematricize(m: Tensor, row_labels: Sequence[str], row_shape: Sequence[int],
                col_labels: Sequence[str], col_shape: Sequence[int]) -> Tensor:
    """Inverse of :func:`matricize` given the original grouped axes."""
    if m.data.ndim != 2:
        raise TensorError("dematricize expects a two-axis tensor")
    shape = list(row_shape) + list(col_shape)
    if int(np.prod(shape)) != m.data.size:
        raise TensorError(f"shape {shape} does not match {m.shape}")
    return Tensor(m.data.reshape(shape), list(row_labels) + list(col_labels))


def _pinv(mat: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    if mat.size == 0:
        return np.zeros(mat.shape[::-1], dtype=np.complex128)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(mat.shape[::-1], dtype=np.complex128)
    keep = s >= tol * s[0]
    return (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T


def pseudo_inverse(m: Tensor, tol: float = DEFAULT_RANK_TOL) -> Tensor:
    """Moore-Penrose pseudo-inverse; singular values below ``tol * s_max`` are dropped.

    The result has the two axis labels of ``m`` in swapped roles, i.e. its
    first axis has the extent of the column axis of ``m``.
    """
    if m.data.ndim != 2:
        raise TensorError("pseudo_inverse expects a two-axis tensor")
    return Tensor(_pinv(m.data, tol), [m.labels[1], m.labels[0]])


def distance(a: Tensor, b: Tensor) -> float:
    """Frobenius norm of ``a - b`` after aligning ``b`` to the labels of ``a``."""
    if sorted(a.labels) != sorted(b.labels):
        raise TensorError(f"label sets differ: {a.labels} vs {b.labels}")
    b = b.transpose(a.labels)
    if a.shape != b.shape:
        raise TensorError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm((a.data - b.data).ravel()))
