"""Dense cubical tensors and the box-product algebra.

A tensor of order ``m`` and dimension ``n`` is held as a float64 numpy
array of shape ``(n,) * m`` where ``a[i1-1, ..., im-1]`` is the entry
``a_{i1...im}``.  The canonical flat layout is linear indexing, i.e.
first index fastest, which is ``a.ravel(order="F")``; see
:func:`from_linear` and :func:`to_linear`.

The numerical kernels never tabulate index tuples.  Multi-indices are
handled by reshaping (views, no copies) so auxiliary memory stays at a
small multiple of ``n**m``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidIndexError, ShapeError

_MAX_ELEMENTS = np.iinfo(np.intp).max // 8


@dataclass(frozen=True)
class Shape:
    """Order ``m`` (number of indices) and dimension ``n`` (states)."""

    order: int
    dim: int

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 2:
            raise ShapeError(f"order must be an integer >= 2, got {self.order!r}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise ShapeError(f"dim must be an integer >= 2, got {self.dim!r}")
        if self.dim ** self.order > _MAX_ELEMENTS:
            raise ShapeError(
                f"dim**order = {self.dim}**{self.order} exceeds the addressable range"
            )

    @property
    def size(self) -> int:
        return self.dim ** self.order

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.dim,) * self.order

    @classmethod
    def of(cls, a: np.ndarray) -> "Shape":
        a = np.asarray(a)
        if a.ndim < 2 or len(set(a.shape)) != 1:
            raise ShapeError(f"tensor must be cubical with order >= 2, got shape {a.shape}")
        return cls(order=a.ndim, dim=a.shape[0])


def as_tensor(a) -> np.ndarray:
    """Validate ``a`` as a finite cubical tensor and return a C-contiguous float64 array."""
    arr = np.ascontiguousarray(a, dtype=np.float64)
    Shape.of(arr)
    if not np.isfinite(arr).all():
        raise ShapeError("tensor entries must be finite")
    return arr


def from_linear(values, order: int, dim: int) -> np.ndarray:
    """Build a tensor from values listed in linear (first-index-fastest) order."""
    shape = Shape(order, dim)
    flat = np.asarray(values, dtype=np.float64).ravel()
    if flat.size != shape.size:
        raise ShapeError(f"expected {shape.size} values for order {order}, dim {dim}; got {flat.size}")
    return as_tensor(flat.reshape(shape.dims, order="F"))


def to_linear(a) -> np.ndarray:
    """Flat copy of ``a`` in linear (first-index-fastest) order."""
    return np.asarray(a).ravel(order="F")


def linear_offset(idx, shape: Shape) -> int:
    """Zero-based linear offset of the 1-based index tuple ``idx``.

    >>> linear_offset((2, 1, 2, 1), Shape(4, 2))
    5
    """
    idx = tuple(idx)
    if len(idx) != shape.order:
        raise InvalidIndexError(f"index tuple has length {len(idx)}, expected {shape.order}")
    offset = 0
    stride = 1
    for i in idx:
        if int(i) != i or not 1 <= i <= shape.dim:
            raise InvalidIndexError(f"index component {i!r} outside 1..{shape.dim}")
        offset += (int(i) - 1) * stride
        stride *= shape.dim
    return offset


def multi_index(offset: int, shape: Shape) -> tuple[int, ...]:
    """Inverse of :func:`linear_offset`; returns a 1-based tuple."""
    if int(offset) != offset or not 0 <= offset < shape.size:
        raise InvalidIndexError(f"offset {offset!r} outside 0..{shape.size - 1}")
    offset = int(offset)
    out = []
    for _ in range(shape.order):
        offset, r = divmod(offset, shape.dim)
        out.append(r + 1)
    return tuple(out)


def index_table(shape: Shape, reversed: bool = False) -> np.ndarray:
    """All ``n**m`` index tuples as rows of an integer array (1-based).

    Forward order runs the first index fastest; ``reversed=True`` gives each
    forward row flipped left to right, i.e. the last index runs fastest.
    Uses O(m * n**m) memory, so it is meant for inspection and tests only.
    """
    rows = np.stack(np.unravel_index(np.arange(shape.size), shape.dims, order="F"), axis=1) + 1
    return rows[:, ::-1].copy() if reversed else rows


def identity_tensor(shape: Shape) -> np.ndarray:
    """Tensor with entry 1 where ``i1 == i2`` and 0 elsewhere."""
    out = np.zeros(shape.dims)
    r = np.arange(shape.dim)
    out[r, r] = 1.0
    return out


def ones_tensor(shape: Shape) -> np.ndarray:
    return np.ones(shape.dims)


def diagonal_part(a) -> np.ndarray:
    """Copy of ``a`` with every entry where ``i1 != i2`` set to zero."""
    a = as_tensor(a)
    out = np.zeros_like(a)
    r = np.arange(a.shape[0])
    out[r, r] = a[r, r]
    return out


def box_product(a, b, out: np.ndarray | None = None) -> np.ndarray:
    r"""Box product ``c = a ⊠ b``.

    .. math:: c_{i_1 i_2 \ldots i_m} = \sum_j a_{i_1 j i_2 \ldots i_{m-1}}\, b_{j i_2 \ldots i_m}

    For ``m == 2`` this is the matrix product.  The product is not
    associative for ``m >= 3``.

    Parameters
    ----------
    a, b : ndarray
        Cubical tensors of identical shape.
    out : ndarray, optional
        C-contiguous float64 buffer of the same shape to receive the result.
        Must not alias ``a`` or ``b``.

    Notes
    -----
    With ``K = n**(m-2)`` the trailing indices ``i2..i_{m-1}`` collapse to a
    single batch index ``t``; the product is then ``K`` independent
    ``n x n`` matrix products ``c[:, t, :] = a[:, :, t] @ b[:, t, :]``.
    All reshapes are views.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError(f"box product needs equal shapes, got {a.shape} and {b.shape}")
    n = a.shape[0]
    k = n ** (a.ndim - 2)
    if out is None:
        out = np.empty_like(a)
    elif out.shape != a.shape or out.dtype != np.float64 or not out.flags.c_contiguous:
        raise ShapeError("out must be a C-contiguous float64 array of the operand shape")
    a3 = a.reshape(n, n, k)
    b3 = b.reshape(n, k, n)
    c3 = out.reshape(n, k, n)
    np.matmul(a3.transpose(2, 0, 1), b3.transpose(1, 0, 2), out=c3.transpose(1, 0, 2))
    return out


def box_power(a, k: int) -> np.ndarray:
    """``a**k`` under the box product, by left-fold ``((a ⊠ a) ⊠ a) ...``.

    ``k == 0`` gives the identity tensor.  Repeated squaring would be wrong
    here because the product is not associative.
    """
    a = as_tensor(a)
    if int(k) != k or k < 0:
        raise ValueError(f"power must be a non-negative integer, got {k!r}")
    if k == 0:
        return identity_tensor(Shape.of(a))
    acc = a.copy()
    scratch = np.empty_like(a)
    for _ in range(int(k) - 1):
        box_product(acc, a, out=scratch)
        acc, scratch = scratch, acc
    return acc


def _check_mode(k: int, order: int) -> int:
    if int(k) != k or not 1 <= k <= order:
        raise ShapeError(f"mode {k!r} outside 1..{order}")
    return int(k)


def matricize(a, k: int) -> np.ndarray:
    """Mode-``k`` matricization: an ``n x n**(m-1)`` matrix of mode-``k`` fibers.

    Columns follow the linear order of the remaining ``m - 1`` indices.
    """
    a = as_tensor(a)
    k = _check_mode(k, a.ndim)
    n = a.shape[0]
    return np.moveaxis(a, k - 1, 0).reshape(n, -1, order="F")


def tensorize(b, k: int) -> np.ndarray:
    """Inverse of :func:`matricize`; the order is inferred from the column count."""
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of ndim {b.ndim}")
    n, cols = b.shape
    if n < 2:
        raise ShapeError("matrix must have at least 2 rows")
    order = 1
    rest = cols
    while rest > 1 and rest % n == 0:
        rest //= n
        order += 1
    if rest != 1 or order < 2:
        raise ShapeError(f"column count {cols} is not a positive power of the row count {n}")
    k = _check_mode(k, order)
    t = b.reshape((n,) * order, order="F")
    return as_tensor(np.moveaxis(t, 0, k - 1))


def khatri_rao(a, b) -> np.ndarray:
    """Columnwise Khatri-Rao product: column ``j`` is ``kron(a[:, j], b[:, j])``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("khatri_rao expects two matrices")
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"column counts differ: {a.shape[1]} vs {b.shape[1]}")
    return (a[:, None, :] * b[None, :, :]).reshape(a.shape[0] * b.shape[0], a.shape[1])
