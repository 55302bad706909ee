"""Seeded trajectory simulation of higher-order chains.

Random numbers come from counter-based SplitMix64 streams: trajectory ``i``
owns a stream keyed by ``splitmix64(seed, i)`` and its ``t``-th uniform is
``mix64(key_i + (t + 1) * GOLDEN) >> 11`` scaled to [0, 1).  Any draw is
addressable from ``(seed, trajectory, step)`` alone, so results never
depend on how trajectories are batched or threaded.

``HOMC_THREADS`` caps the worker threads used for trajectory batches.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chain_model import as_transition
from .errors import InvalidIndexError
from .tensor_core import matricize

RNG_NAME = "splitmix64-counter (per-trajectory streams keyed by splitmix64(seed, trajectory))"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_BATCH = 1 << 15


@dataclass(frozen=True)
class SimConfig:
    """``horizon=None`` resolves to ``1000 * n`` steps."""

    seed: int = 0
    trajectories: int = 10**4
    horizon: int | None = None

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.trajectories < 1:
            raise ValueError("trajectories must be >= 1")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be >= 1")

    def horizon_for(self, dim: int) -> int:
        return 1000 * dim if self.horizon is None else int(self.horizon)


@dataclass(frozen=True)
class Estimate:
    value: float
    standard_error: float
    samples: int
    censored: int = 0


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def stream_keys(seed: int, trajectories: np.ndarray) -> np.ndarray:
    base = np.uint64(seed)
    with np.errstate(over="ignore"):
        return _mix64(base + (trajectories.astype(np.uint64) + np.uint64(1)) * _GOLDEN)


def uniforms(keys: np.ndarray, step: int) -> np.ndarray:
    """Uniforms in [0, 1) for the given stream keys at ``step`` (0-based)."""
    with np.errstate(over="ignore"):
        z = _mix64(keys + np.uint64(step + 1) * _GOLDEN)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def step(p, context, u: float) -> int:
    """Sample the next state by inverse CDF over column ``p[:, i2, ..., im]``.

    ``context`` lists the current state first, then older ones (1-based).
    Returns the smallest ``i1`` whose cumulative probability exceeds ``u``.
    """
    p = as_transition(p)
    col = _context_code(context, p.dim, p.order)
    column = matricize(p.tensor, 1)[:, col]
    cdf = np.cumsum(column)
    hit = np.flatnonzero(cdf > u)
    if hit.size:
        return int(hit[0]) + 1
    return int(np.flatnonzero(column > 0)[-1]) + 1


def _context_code(context, n: int, m: int) -> int:
    context = tuple(context)
    if len(context) != m - 1:
        raise InvalidIndexError(f"context must have {m - 1} states, got {len(context)}")
    code = 0
    for pos, s in enumerate(context):
        if int(s) != s or not 1 <= s <= n:
            raise InvalidIndexError(f"state {s!r} outside 1..{n}")
        code += (int(s) - 1) * n**pos
    return code


def _check_target(target, n: int) -> int:
    if int(target) != target or not 1 <= target <= n:
        raise InvalidIndexError(f"target {target!r} outside 1..{n}")
    return int(target) - 1


class _Sampler:
    def __init__(self, p):
        p = as_transition(p)
        self.n, self.m = p.dim, p.order
        pmat = matricize(p.tensor, 1)
        cdf = np.cumsum(pmat, axis=0)
        # beyond the last positive entry the CDF is a hard stop, so roundoff
        # in the column sum never selects a zero-probability state
        last = pmat.shape[0] - 1 - np.argmax(pmat[::-1] > 0, axis=0)
        rows = np.arange(pmat.shape[0])[:, None]
        cdf[rows >= last[None, :]] = np.inf
        self.cdf = cdf
        self.shift = self.n ** (self.m - 2)

    def advance(self, codes: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nxt = (self.cdf[:, codes] <= u[None, :]).sum(axis=0)
        return nxt, nxt + self.n * (codes % self.shift)


def _threads() -> int:
    env = os.environ.get("HOMC_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _run_batches(fn, total: int) -> np.ndarray:
    bounds = [(lo, min(lo + _BATCH, total)) for lo in range(0, total, _BATCH)]
    workers = min(_threads(), len(bounds))
    if workers <= 1:
        parts = [fn(lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: fn(*b), bounds))
    return np.concatenate(parts)


def _first_passage_times(p, start, target: int, cfg: SimConfig) -> tuple[np.ndarray, int]:
    """Per-trajectory first passage step (0 when not reached within the horizon)."""
    sampler = _Sampler(p)
    code0 = _context_code(start, sampler.n, sampler.m)
    tgt = _check_target(target, sampler.n)
    horizon = cfg.horizon_for(sampler.n)

    def batch(lo, hi):
        ids = np.arange(lo, hi)
        keys = stream_keys(cfg.seed, ids)
        times = np.zeros(hi - lo, dtype=np.int64)
        alive = np.arange(hi - lo)
        codes = np.full(hi - lo, code0, dtype=np.int64)
        for t in range(horizon):
            if alive.size == 0:
                break
            nxt, codes = sampler.advance(codes, uniforms(keys[alive], t))
            done = nxt == tgt
            times[alive[done]] = t + 1
            alive, codes = alive[~done], codes[~done]
        return times

    return _run_batches(batch, cfg.trajectories), horizon


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    if x.size == 0:
        return math.nan, math.nan
    mean = float(x.sum() / x.size)
    if x.size < 2:
        return mean, 0.0
    return mean, float(np.std(x, ddof=1) / math.sqrt(x.size))


def estimate_kstep(p, start, target: int, k: int, cfg: SimConfig) -> Estimate:
    """Monte Carlo estimate of the k-step probability ``P**k[target, start...]``."""
    sampler = _Sampler(p)
    code0 = _context_code(start, sampler.n, sampler.m)
    tgt = _check_target(target, sampler.n)
    if k < 1 or k > cfg.horizon_for(sampler.n):
        raise ValueError("k must lie in 1..horizon")

    def batch(lo, hi):
        keys = stream_keys(cfg.seed, np.arange(lo, hi))
        codes = np.full(hi - lo, code0, dtype=np.int64)
        for t in range(k):
            nxt, codes = sampler.advance(codes, uniforms(keys, t))
        return (nxt == tgt).astype(np.float64)

    hits = _run_batches(batch, cfg.trajectories)
    value, se = _mean_se(hits)
    return Estimate(value, se, hits.size, 0)


def estimate_ever_reach(p, start, target: int, cfg: SimConfig) -> Estimate:
    """Fraction of trajectories that visit ``target`` at some step ``1..horizon``.

    Trajectories that never reach it are censored but stay in the
    denominator, so the estimate is biased low by the horizon cut.
    """
    times, _ = _first_passage_times(p, start, target, cfg)
    reached = (times > 0).astype(np.float64)
    value, se = _mean_se(reached)
    return Estimate(value, se, times.size, int(times.size - np.count_nonzero(times)))


def estimate_mfpt(p, start, target: int, cfg: SimConfig) -> Estimate:
    """Mean first passage step over the trajectories that reach ``target``.

    Censored trajectories are excluded from the mean and counted.
    """
    times, _ = _first_passage_times(p, start, target, cfg)
    reached = times[times > 0].astype(np.float64)
    value, se = _mean_se(reached)
    return Estimate(value, se, times.size, int(times.size - reached.size))
