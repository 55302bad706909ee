"""Transition tensors, k-step tensors, regularity/ergodicity and the reduced chain."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergenceError, ShapeError, StochasticityError
from .tensor_core import Shape, as_tensor, box_power, box_product, matricize, multi_index

DEFAULT_STOCHASTIC_TOL = 1e-10
DEFAULT_STATIONARY_TOL = 1e-12
DEFAULT_STATIONARY_MAX_ITER = 10**6

CONFIRMED = "confirmed"
REFUTED = "refuted-within-horizon"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class TransitionTensor:
    """A stochastic tensor ``p[i1, i2, ..., im] = Pr(next = i1 | i2, ..., im)``.

    Build through :func:`validate_transition_tensor`; direct construction
    skips the checks.
    """

    tensor: np.ndarray
    stochastic_tol: float = DEFAULT_STOCHASTIC_TOL

    @property
    def shape(self) -> Shape:
        return Shape.of(self.tensor)

    @property
    def order(self) -> int:
        return self.tensor.ndim

    @property
    def dim(self) -> int:
        return self.tensor.shape[0]


@dataclass(frozen=True)
class ReachabilityVerdict:
    status: str
    witness_k: int | None
    horizon: int

    @property
    def confirmed(self) -> bool:
        return self.status == CONFIRMED


@dataclass(frozen=True)
class StationaryResult:
    """Limiting distribution ``pi`` over ``n`` states and the reduced-chain vector ``y``."""

    pi: np.ndarray
    y: np.ndarray
    iterations: int
    residual: float


def _trailing_context(col: int, shape: Shape) -> tuple[int, ...]:
    # column `col` of the mode-1 matricization is the trailing tuple (i2..im)
    return multi_index(col * shape.dim, shape)[1:]


def validate_transition_tensor(a, tol: float = DEFAULT_STOCHASTIC_TOL) -> TransitionTensor:
    """Check that ``a`` is stochastic and return it wrapped, clamped to [0, 1].

    Raises
    ------
    StochasticityError
        If an entry lies outside ``[-tol, 1 + tol]`` or some column
        ``p[:, i2, ..., im]`` does not sum to 1 within ``tol``.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    arr = as_tensor(a)
    shape = Shape.of(arr)
    cols = matricize(arr, 1)
    bad = np.flatnonzero(((cols < -tol) | (cols > 1 + tol)).any(axis=0))
    if bad.size:
        ctx = _trailing_context(int(bad[0]), shape)
        raise StochasticityError(f"entry outside [0, 1] in column {ctx}", context=ctx)
    sums = cols.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        ctx = _trailing_context(int(bad[0]), shape)
        raise StochasticityError(
            f"column {ctx} sums to {sums[bad[0]]!r}, not 1", context=ctx
        )
    return TransitionTensor(np.clip(arr, 0.0, 1.0), float(tol))


def as_transition(p) -> TransitionTensor:
    if isinstance(p, TransitionTensor):
        return p
    return validate_transition_tensor(p)


def k_step_tensor(p, k: int) -> np.ndarray:
    """k-step transition tensor ``P**k`` (box power)."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return box_power(as_transition(p).tensor, k)


def default_kmax(shape: Shape) -> int:
    return min(shape.size, 10**4)


def _pattern_product(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    # 0/1 operands: each output is an exact small integer count
    return box_product(pa.astype(np.float64), pb.astype(np.float64)) > 0


def _digest(*patterns: np.ndarray) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    for pat in patterns:
        h.update(np.packbits(pat, axis=None).tobytes())
    return h.digest()


def positivity_patterns(p, kmax: int):
    """Yield ``(k, pattern of P**k)`` for ``k = 1..kmax`` by boolean box products."""
    base = as_transition(p).tensor > 0
    cur = base
    for k in range(1, kmax + 1):
        yield k, cur
        if k < kmax:
            cur = _pattern_product(cur, base)


def check_regular(p, kmax: int | None = None) -> ReachabilityVerdict:
    """Search for ``k <= kmax`` with ``P**k`` entrywise positive.

    The pattern sequence is eventually periodic; a repeated pattern with no
    all-positive member so far refutes regularity outright.
    """
    p = as_transition(p)
    kmax = default_kmax(p.shape) if kmax is None else int(kmax)
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    seen = set()
    for k, pat in positivity_patterns(p, kmax):
        if pat.all():
            return ReachabilityVerdict(CONFIRMED, k, kmax)
        key = _digest(pat)
        if key in seen:
            return ReachabilityVerdict(REFUTED, None, kmax)
        seen.add(key)
    return ReachabilityVerdict(UNDETERMINED, None, kmax)


def check_ergodic(p, kmax: int | None = None) -> ReachabilityVerdict:
    """Search for ``k <= kmax`` by which every entry has been positive in some ``P**j``."""
    p = as_transition(p)
    kmax = default_kmax(p.shape) if kmax is None else int(kmax)
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    union = np.zeros(p.tensor.shape, dtype=bool)
    seen = set()
    for k, pat in positivity_patterns(p, kmax):
        union |= pat
        if union.all():
            return ReachabilityVerdict(CONFIRMED, k, kmax)
        key = _digest(pat, union)
        if key in seen:
            return ReachabilityVerdict(REFUTED, None, kmax)
        seen.add(key)
    return ReachabilityVerdict(UNDETERMINED, None, kmax)


def reduced_chain_matrix(p) -> np.ndarray:
    """Transition matrix ``Q`` (``N x N``, ``N = n**(m-1)``) of the reduced first-order chain.

    ``Q`` is the columnwise Khatri-Rao product of ``G = [I I ... I]``
    (``n`` copies of the ``n**(m-2)`` identity) with the mode-1
    matricization of ``P``.  ``G`` is not formed: column ``j`` of ``G`` is
    the unit vector ``e_{j mod n**(m-2)}``, so column ``j`` of ``Q`` is
    ``P[:, j]`` placed in row block ``j mod n**(m-2)``.
    """
    p = as_transition(p)
    n, m = p.dim, p.order
    pmat = matricize(p.tensor, 1)
    big_n = pmat.shape[1]
    block = np.arange(big_n) % n ** (m - 2)
    q = np.zeros((big_n, big_n))
    rows = block[None, :] * n + np.arange(n)[:, None]
    q[rows, np.arange(big_n)[None, :]] = pmat
    return q


def _check_distribution(y, length: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size != length:
        raise ShapeError(f"distribution has length {y.size}, expected {length}")
    if (y < 0).any() or not np.isfinite(y).all():
        raise ValueError("distribution entries must be finite and non-negative")
    if abs(y.sum() - 1.0) > 1e-12 + length * np.finfo(float).eps:
        raise ValueError(f"distribution sums to {y.sum()!r}, not 1")
    return y


def propagate_distribution(p, y) -> np.ndarray:
    """Next-state distribution ``x_{t+1} = P y_t`` with ``P`` the mode-1 matricization."""
    p = as_transition(p)
    pmat = matricize(p.tensor, 1)
    y = _check_distribution(y, pmat.shape[1])
    return pmat @ y


def marginal_of_current(y, dim: int) -> np.ndarray:
    """``pi = P0 y`` where ``P0`` is the mode-1 matricization of the identity tensor.

    ``P0[i, j] = 1`` exactly when the first component of reduced state ``j``
    is ``i``, so this sums ``y`` over all but the first component.
    """
    y = np.asarray(y, dtype=np.float64)
    return y.reshape(dim, -1, order="F").sum(axis=1)


def stationary_distribution(
    p, tol: float = DEFAULT_STATIONARY_TOL, max_iter: int = DEFAULT_STATIONARY_MAX_ITER
) -> StationaryResult:
    """Limiting distribution through the reduced chain.

    Iterates the lazy chain ``z <- (z + Q z) / 2`` from the uniform vector.
    Its limit is the projection of the start vector onto the eigenvalue-1
    eigenspace of ``Q``, i.e. the Cesaro limit of ``Q**t z0``, but it
    converges geometrically even when ``Q`` is periodic or the eigenvalue 1
    is repeated.  Stops when ``||z_{t+1} - z_t||_1 < tol``.

    Returns
    -------
    StationaryResult
        ``y`` over the ``n**(m-1)`` reduced states, ``pi = P0 y`` over the
        ``n`` states, and the residual ``||Q y - y||_1``.

    Raises
    ------
    NonConvergenceError
        After ``max_iter`` steps without meeting ``tol``.
    """
    p = as_transition(p)
    q = reduced_chain_matrix(p)
    big_n = q.shape[0]
    z = np.full(big_n, 1.0 / big_n)
    diff = np.inf
    for it in range(1, int(max_iter) + 1):
        nxt = 0.5 * (z + q @ z)
        diff = np.abs(nxt - z).sum()
        z = nxt
        if diff < tol:
            break
    else:
        raise NonConvergenceError(
            f"stationary iteration did not reach tol={tol} in {max_iter} steps",
            residual=float(2 * diff),
            iterations=int(max_iter),
        )
    y = np.clip(z, 0.0, None)
    y /= y.sum()
    residual = float(np.abs(q @ y - y).sum())
    pi = marginal_of_current(y, p.dim)
    pi /= pi.sum()
    return StationaryResult(pi=pi, y=y, iterations=it, residual=residual)
