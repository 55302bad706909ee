"""Transition tensors of the worked examples, built from their frontal slices.

The same tensors ship as JSON files under ``homc/fixtures``.
"""
from __future__ import annotations

from importlib import resources

import numpy as np

from .tensor_core import as_tensor


def from_slices(slices) -> np.ndarray:
    """Stack ``n x n`` frontal slices ``A[:, :, i3]`` (``i3 = 1..n``) into an order-3 tensor."""
    return as_tensor(np.stack([np.asarray(s, dtype=np.float64) for s in slices], axis=2))


def regular_chain() -> np.ndarray:
    """4-state second-order chain; regular."""
    return from_slices([
        [[0.5, 0, 0, 0], [0.5, 0, 1, 0], [0, 1, 0, 1], [0, 0, 0, 0]],
        [[0, 0, 0.5, 1], [0, 0.5, 0, 0], [0.5, 0.5, 0, 0], [0.5, 0, 0.5, 0]],
        [[0, 1, 0, 1], [1, 0, 0.5, 0], [0, 0, 0.5, 0], [0, 0, 0, 0]],
        [[0, 0, 0, 0], [1, 1, 1, 0], [0, 0, 0, 0.5], [0, 0, 0, 0.5]],
    ])


def ergodic_chain() -> np.ndarray:
    """3-state second-order chain; ergodic, not regular (period 2)."""
    s = [[0, 0.5, 0], [1, 0, 1], [0, 0.5, 0]]
    return from_slices([s, s, s])


def first_order_chain() -> np.ndarray:
    return as_tensor([[0.5, 0.5, 0], [0.5, 0, 1], [0, 0.5, 0]])


def transient_chain() -> np.ndarray:
    """3-state second-order chain with a transient, a recurrent and a fully transient state."""
    t = 1 / 3
    return from_slices([
        [[0.5, t, 0.5], [0.5, t, 0], [0, t, 0.5]],
        [[1, 0, 0.5], [0, 1, 0.5], [0, 0, 0]],
        [[0, 0, 0.5], [1, 0, 0.5], [0, 1, 0]],
    ])


def absorbing_chain() -> np.ndarray:
    """Two absorbing states: reducible, so the MFPT system is singular."""
    return as_tensor(np.eye(2))


FIXTURES = {
    "reg": regular_chain,
    "erg": ergodic_chain,
    "first": first_order_chain,
    "transient": transient_chain,
    "nonergodic": absorbing_chain,
}


def fixture_path(name: str):
    """Path of the shipped JSON fixture ``name`` (a key of ``FIXTURES``)."""
    return resources.files("homc") / "fixtures" / f"{name}.json"
