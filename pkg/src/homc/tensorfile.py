"""Self-describing JSON container for tensors and matrices.

::

    {"format_version": 1, "order": m, "dim": n,
     "layout": "linear-first-index-fastest", "data": [...]}

Non-square matrices add ``"rows"`` and ``"cols"`` (``order`` is 2 and
``data`` is column-major).  Floats are written with ``repr``, the shortest
string that parses back to the same double, so write/read is bit-exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import HomcError
from .tensor_core import Shape, ShapeError, as_tensor, from_linear, to_linear

FORMAT_VERSION = 1
LAYOUT = "linear-first-index-fastest"


class TensorFileError(HomcError, ValueError):
    """Malformed tensor file."""


def _reject_constant(name):
    raise TensorFileError(f"non-finite value {name} in tensor data")


def to_document(a) -> dict:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 2 and a.shape[0] != a.shape[1]:
        rows, cols = a.shape
        if not np.isfinite(a).all():
            raise ShapeError("matrix entries must be finite")
        return {
            "format_version": FORMAT_VERSION,
            "order": 2,
            "dim": rows,
            "rows": rows,
            "cols": cols,
            "layout": LAYOUT,
            "data": [float(x) for x in a.ravel(order="F")],
        }
    a = as_tensor(a)
    return {
        "format_version": FORMAT_VERSION,
        "order": a.ndim,
        "dim": a.shape[0],
        "layout": LAYOUT,
        "data": [float(x) for x in to_linear(a)],
    }


def from_document(doc) -> np.ndarray:
    if not isinstance(doc, dict):
        raise TensorFileError("tensor file must hold a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise TensorFileError(f"unsupported format_version {doc.get('format_version')!r}")
    if doc.get("layout") != LAYOUT:
        raise TensorFileError(f"unsupported layout {doc.get('layout')!r}")
    data = doc.get("data")
    if not isinstance(data, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in data
    ):
        raise TensorFileError("data must be a list of numbers")
    values = np.array(data, dtype=np.float64)
    if not np.isfinite(values).all():
        raise TensorFileError("data contains non-finite values")
    order, dim = doc.get("order"), doc.get("dim")
    if "rows" in doc or "cols" in doc:
        rows, cols = doc.get("rows"), doc.get("cols")
        if order != 2 or not all(isinstance(v, int) and v >= 1 for v in (rows, cols)):
            raise TensorFileError("matrix files need order 2 and positive integer rows/cols")
        if values.size != rows * cols:
            raise TensorFileError(f"expected {rows * cols} values, got {values.size}")
        return values.reshape(rows, cols, order="F")
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (order, dim)):
        raise TensorFileError("order and dim must be integers")
    try:
        shape = Shape(order, dim)
    except ShapeError as exc:
        raise TensorFileError(str(exc)) from exc
    if values.size != shape.size:
        raise TensorFileError(
            f"order {order}, dim {dim} needs {shape.size} values, file has {values.size}"
        )
    return from_linear(values, order, dim)


def read_tensor(path) -> np.ndarray:
    """Load a tensor file. Missing files raise ``OSError``; bad content ``TensorFileError``."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise TensorFileError(f"{path}: invalid JSON ({exc})") from exc
    return from_document(doc)


def write_tensor(path, a) -> None:
    Path(path).write_text(json.dumps(to_document(a), allow_nan=False) + "\n")

