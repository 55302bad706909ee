"""Ever-reaching probabilities, state classification and mean first passage times."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack
from scipy.sparse.linalg import LinearOperator, gmres

from .chain_model import as_transition
from .errors import NonConvergenceError, ShapeError, SingularSystemError
from .tensor_core import as_tensor, box_product, matricize

DEFAULT_ERP_TOL = 1e-6
DEFAULT_MAX_TERMS = 10**5
DEFAULT_MFPT_TOL = 1e-6
DEFAULT_MFPT_MAX_ITER = 10**5
DEFAULT_CLASS_TOL = 1e-3
# blocks with more unknowns are solved matrix-free (a dense block is N**2 doubles)
DENSE_BLOCK_MAX = 2048

RECURRENT = "recurrent"
TRANSIENT = "transient"
FULLY_TRANSIENT = "fully-transient"


@dataclass(frozen=True)
class EverReachResult:
    f: np.ndarray
    terms_used: int
    converged: bool
    last_term_max: float
    tol: float


@dataclass(frozen=True)
class MfptResult:
    mu: np.ndarray
    method: str
    iterations: int
    residual_max: float
    solver: str = ""


@dataclass(frozen=True)
class ClassificationReport:
    """Per-state labels.

    ``diagonal_values[i]`` holds ``f[i, i, i3, ..., im]`` for all trailing
    tuples in linear order.  A fully transient state is also transient in
    the broad sense but only carries the more specific label.
    """

    labels: tuple[str, ...]
    diagonal_values: np.ndarray
    class_tol: float


def _zero_diagonal(a: np.ndarray) -> np.ndarray:
    r = np.arange(a.shape[0])
    a[r, r] = 0.0
    return a


def ever_reaching(p, tol: float = DEFAULT_ERP_TOL, max_terms: int = DEFAULT_MAX_TERMS) -> EverReachResult:
    r"""Partial sum of the first-passage series ``F = sum_k F[k]``.

    ``F[1] = P`` and ``F[k+1] = (F[k] - diag(F[k])) ⊠ P``; ``F[k]`` holds the
    probabilities that the first passage happens at step ``k``.  Summation
    stops after the first term whose largest entry is below ``tol`` (that
    term is included), or after ``max_terms`` terms with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    pt = as_transition(p).tensor
    term = pt.copy()
    acc = pt.copy()
    scratch = np.empty_like(pt)
    terms = 1
    last = float(np.abs(term).max())
    while last >= tol and terms < max_terms:
        box_product(_zero_diagonal(term), pt, out=scratch)
        term, scratch = scratch, term
        acc += term
        terms += 1
        last = float(np.abs(term).max())
    return EverReachResult(acc, terms, last < tol, last, float(tol))


def classify_states(er: EverReachResult, class_tol: float = DEFAULT_CLASS_TOL) -> ClassificationReport:
    """Label each state from the diagonal fibers ``f[i, i, ...]`` of ``F``.

    Recurrent if every diagonal value is at least ``1 - class_tol``, fully
    transient if every value is below, transient otherwise.
    """
    f = er.f
    n = f.shape[0]
    r = np.arange(n)
    diag = f[r, r].reshape(n, -1, order="F")
    hit = diag >= 1.0 - class_tol
    labels = []
    for i in range(n):
        if hit[i].all():
            labels.append(RECURRENT)
        elif not hit[i].any():
            labels.append(FULLY_TRANSIENT)
        else:
            labels.append(TRANSIENT)
    return ClassificationReport(tuple(labels), diag, float(class_tol))


def fixed_point_residual(mu, p) -> float:
    """Largest entry of ``|mu - E - (mu - mu_d) ⊠ P|``."""
    pt = as_transition(p).tensor
    mu = as_tensor(mu)
    r = box_product(_zero_diagonal(mu.copy()), pt)
    r += 1.0
    np.subtract(mu, r, out=r)
    return float(np.abs(r).max())


def _mfpt_block(pmat: np.ndarray, k: int, n: int, m: int) -> np.ndarray:
    # unknowns mu[k, i2..im] in linear order of (i2..im); row t is the
    # equation for trailing tuple t, unknown s = a + n * (t mod n**(m-2))
    big_n = pmat.shape[1]
    t = np.arange(big_n)
    a = np.delete(np.arange(n), k)
    cols = a[:, None] + n * (t % n ** (m - 2))[None, :]
    block = np.eye(big_n)
    block[np.broadcast_to(t, cols.shape), cols] -= pmat[a, :]
    return block


def mfpt_direct(p) -> MfptResult:
    """Mean first passage time tensor by solving ``n`` independent linear systems.

    For ``i1 = k`` the unknowns ``mu[k, i2, ..., im]`` satisfy
    ``mu[k, i2..im] - sum_{a != k} mu[k, a, i2..i_{m-1}] p[a, i2..im] = 1``,
    an ``N x N`` system with ``N = n**(m-1)``.  Blocks with at most
    ``DENSE_BLOCK_MAX`` unknowns are assembled densely and solved by LU with
    partial pivoting.  Larger blocks would need ``N**2`` doubles, so they
    are solved by restarted GMRES with a matrix-free operator built from
    the tensor itself, keeping memory at a few multiples of ``n**m``.

    Raises
    ------
    SingularSystemError
        If block ``k`` (1-based) is numerically singular, which happens
        when the chain is not ergodic.
    """
    pt = as_transition(p).tensor
    n, m = pt.shape[0], pt.ndim
    big_n = n ** (m - 1)
    dense = big_n <= DENSE_BLOCK_MAX
    mu = np.empty_like(pt)
    solve = _dense_block_solver(pt) if dense else _krylov_block_solver(pt)
    for k in range(n):
        mu[k] = solve(k)
    solver = "dense-lu" if dense else "gmres"
    return MfptResult(mu, "direct", 0, fixed_point_residual(mu, pt), solver)


def _dense_block_solver(pt: np.ndarray):
    n, m = pt.shape[0], pt.ndim
    pmat = matricize(pt, 1)
    big_n = pmat.shape[1]
    rhs = np.ones(big_n)

    def solve(k):
        block = _mfpt_block(pmat, k, n, m)
        anorm = np.abs(block).sum(axis=0).max()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(block, overwrite_a=True, check_finite=False)
        rcond, info = lapack.dgecon(lu, anorm, norm="1")
        if info != 0 or not rcond > big_n * np.finfo(float).eps:
            raise SingularSystemError(
                f"MFPT block {k + 1} is singular (rcond={rcond:.3g}); chain is not ergodic",
                block=k + 1,
            )
        sol = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
        return sol.reshape((n,) * (m - 1), order="F")

    return solve


def _krylov_block_solver(pt: np.ndarray, rtol: float = 1e-14, max_residual: float = 1e-10):
    n, m = pt.shape[0], pt.ndim
    inner = n ** (m - 2)
    big_n = n * inner
    # C-order views: p3[a, t, l] = p[a, i2..i_{m-1}, im] with t the merged
    # middle indices; the block unknowns x[i2..im] merge the same way
    p3 = pt.reshape(n, inner, n)
    rhs = np.ones(big_n)

    def solve(k):
        def matvec(x):
            xv = x.reshape(n, inner)
            y = np.einsum("atl,at->tl", p3, xv)
            y -= p3[k] * xv[k][:, None]
            return x - y.ravel()

        op = LinearOperator((big_n, big_n), matvec=matvec, dtype=np.float64)
        x, info = gmres(op, rhs, rtol=rtol, atol=0.0, restart=40, maxiter=1000)
        resid = float(np.abs(matvec(x) - rhs).max())
        if not resid <= max_residual:
            raise SingularSystemError(
                f"MFPT block {k + 1}: GMRES failed (info={info}, residual={resid:.3g}); "
                "system is singular or ill-conditioned, chain likely not ergodic",
                block=k + 1,
            )
        return x.reshape((n,) * (m - 1))

    return solve


def mfpt_iterative(
    p, mu0=None, tol: float = DEFAULT_MFPT_TOL, max_iter: int = DEFAULT_MFPT_MAX_ITER
) -> MfptResult:
    """Mean first passage times by ``mu <- E + (mu - mu_d) ⊠ P``.

    Starts from the all-ones tensor unless ``mu0`` is given and stops when
    successive iterates differ by less than ``tol`` in every entry.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pt = as_transition(p).tensor
    if mu0 is None:
        mu = np.ones_like(pt)
    else:
        mu = as_tensor(mu0).copy()
        if mu.shape != pt.shape:
            raise ShapeError(f"mu0 has shape {mu.shape}, expected {pt.shape}")
    work = np.empty_like(pt)
    new = np.empty_like(pt)
    diff = np.inf
    for it in range(1, int(max_iter) + 1):
        np.copyto(work, mu)
        box_product(_zero_diagonal(work), pt, out=new)
        new += 1.0
        np.subtract(new, mu, out=work)
        diff = float(np.abs(work).max())
        mu, new = new, mu
        if diff < tol:
            break
        if not np.isfinite(diff):
            raise NonConvergenceError("MFPT iteration diverged", residual=diff, iterations=it)
    else:
        raise NonConvergenceError(
            f"MFPT iteration did not reach tol={tol} in {max_iter} iterations",
            residual=diff,
            iterations=int(max_iter),
        )
    return MfptResult(mu, "iterative", it, fixed_point_residual(mu, pt))
