"""Independent reference implementations used only by the tests."""
import itertools

import numpy as np
import scipy.linalg


def naive_box_product(a, b):
    n, m = a.shape[0], a.ndim
    c = np.zeros_like(a)
    for idx in itertools.product(range(n), repeat=m):
        i1, rest = idx[0], idx[1:]
        c[idx] = sum(a[(i1, j) + rest[:-1]] * b[(j,) + rest] for j in range(n))
    return c


def naive_box_power(a, k):
    n, m = a.shape[0], a.ndim
    acc = np.zeros_like(a)
    for idx in itertools.product(range(n), repeat=m):
        acc[idx] = 1.0 if idx[0] == idx[1] else 0.0
    for _ in range(k):
        acc = naive_box_product(acc, a)
    return acc


def naive_matricize(a, k):
    """Column j is the mode-k fiber at the j-th remaining index tuple, first index fastest."""
    n, m = a.shape[0], a.ndim
    cols = []
    for rest in itertools.product(range(n), repeat=m - 1):
        rest = rest[::-1]  # itertools runs the last position fastest
        cols.append([a[rest[: k - 1] + (i,) + rest[k - 1 :]] for i in range(n)])
    return np.array(cols).T


def explicit_g(n, m):
    inner = n ** (m - 2)
    return np.hstack([np.eye(inner)] * n)


def first_order_mfpt(p):
    """Classical M = E + (M - M_d) P for column-stochastic P, one target at a time.

    For target i the times h(s) from s obey h(s) = 1 + sum_{a != i} p[a, s] h(a),
    i.e. (I - T^T) h = 1 with T = P having row i removed.
    """
    n = p.shape[0]
    m = np.empty_like(p)
    for i in range(n):
        t = p.copy()
        t[i, :] = 0
        m[i, :] = np.linalg.solve(np.eye(n) - t.T, np.ones(n))
    return m


def null_space_stationary(p):
    v = scipy.linalg.null_space(p - np.eye(p.shape[0]))[:, 0]
    return v / v.sum()


def brute_force_first_passage(p, start, target, horizon):
    """Exact first passage distribution by propagating context probabilities.

    Returns the probabilities that the first visit to ``target`` (0-based)
    happens at steps 1..horizon from the 0-based context ``start``.
    """
    n, m = p.shape[0], p.ndim
    weights = {tuple(start): 1.0}
    out = []
    for _ in range(horizon):
        hit = 0.0
        nxt = {}
        for ctx, w in weights.items():
            for a in range(n):
                pr = w * p[(a,) + ctx]
                if pr == 0:
                    continue
                if a == target:
                    hit += pr
                else:
                    key = ((a,) + ctx)[: m - 1]
                    nxt[key] = nxt.get(key, 0.0) + pr
        out.append(hit)
        weights = nxt
    return np.array(out)
