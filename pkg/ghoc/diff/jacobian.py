from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

import numpy as np

from ..utils import ShapeError, log
from .dual import DualNumber, value_of


def _flatten_output(out: Any) -> list[Any]:
    if isinstance(out, np.ndarray):
        return list(out.ravel())
    if isinstance(out, (list, tuple)):
        flat = []
        for item in out:
            flat.extend(_flatten_output(item))
        return flat
    return [out]


def _seed_batches(n: int, batch_size: int | None) -> list[range]:
    if batch_size is None or batch_size >= n:
        return [range(n)]
    if batch_size < 1:
        raise ShapeError(f"batch_size must be >= 1, got {batch_size}")
    return [range(start, min(start + batch_size, n)) for start in range(0, n, batch_size)]


def _sweep(f: Callable, x: np.ndarray, batch: range):
    size = len(batch)
    args = np.array(x.tolist(), dtype=object)
    eye = np.eye(size)
    for column, index in enumerate(batch):
        args[index] = DualNumber(float(x[index]), eye[column])
    outputs = _flatten_output(f(args))
    values = np.array([value_of(o) for o in outputs])
    block = np.zeros((len(outputs), size))
    for row, o in enumerate(outputs):
        if isinstance(o, DualNumber):
            block[row] = o.derivs
    return values, block


def value_and_jacobian(
    f: Callable[[np.ndarray], Any],
    x: Sequence[float],
    *,
    batch_size: int | None = None,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Evaluate ``f`` and its forward-mode Jacobian at ``x``.

    ``f`` receives an object array in which the seeded entries are dual
    numbers and the rest are floats. Seeds are split in groups of
    ``batch_size``; with ``threads > 1`` the groups are swept concurrently.
    The result does not depend on the grouping.
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n == 0:
        raise ShapeError("cannot differentiate with respect to an empty vector")
    batches = _seed_batches(n, batch_size)
    log(5, f"[jacobian] n={n} batches={len(batches)} threads={threads}\n")
    if threads > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda b: _sweep(f, x, b), batches))
    else:
        results = [_sweep(f, x, b) for b in batches]
    values = results[0][0]
    jac = np.zeros((values.size, n))
    for batch, (_, block) in zip(batches, results):
        jac[:, batch.start : batch.stop] = block
    return values, jac


def jacobian(
    f: Callable[[np.ndarray], Any],
    x: Sequence[float],
    *,
    batch_size: int | None = None,
    threads: int = 1,
) -> np.ndarray:
    """
    Examples:
        >>> jacobian(lambda v: v, [1.0, 2.0]).tolist()
        [[1.0, 0.0], [0.0, 1.0]]
        >>> jacobian(lambda v: v[0] * v[1], [3.0, 4.0]).tolist()
        [[4.0, 3.0]]
    """
    return value_and_jacobian(f, x, batch_size=batch_size, threads=threads)[1]


def jvp(
    f: Callable[[np.ndarray], Any], x: Sequence[float], v: Sequence[float]
) -> np.ndarray:
    """Directional derivative of ``f`` at ``x`` along ``v`` in one sweep."""
    x = np.asarray(x, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if x.shape != v.shape:
        raise ShapeError(f"direction shape {v.shape} does not match {x.shape}")
    args = np.array(
        [DualNumber(float(xi), np.array([vi])) for xi, vi in zip(x, v)],
        dtype=object,
    )
    outputs = _flatten_output(f(args))
    return np.array(
        [o.derivs[0] if isinstance(o, DualNumber) else 0.0 for o in outputs]
    )
