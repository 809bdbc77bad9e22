"""Finite-difference stencils on uniform lattices."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple[int, ...], m: int) -> tuple[float, ...]:
    """Weights ``w`` with ``sum w_k g(x + k) ~ g^(m)(x)`` for unit spacing."""
    n = len(offsets)
    if m >= n:
        raise ValueError("need more stencil points than the derivative order")
    A = np.vander(np.asarray(offsets, dtype=float), n, increasing=True).T
    b = np.zeros(n)
    b[m] = math.factorial(m)
    return tuple(np.linalg.solve(A, b))


def diff(a: NDArray, spacing: float, axis: int, order: int = 6) -> NDArray:
    """First derivative along ``axis`` accurate to ``O(spacing**order)``.

    Centered ``order + 1`` point stencils in the interior and shifted
    (one-sided) stencils of the same width near the two ends.
    """
    if order % 2 or order < 2:
        raise ValueError("order must be a positive even integer")
    a = np.moveaxis(np.asarray(a, dtype=float), axis, 0)
    n = a.shape[0]
    k = order // 2
    width = order + 1
    if n < width:
        raise ValueError(f"need at least {width} points along axis {axis}, got {n}")
    out = np.empty_like(a)
    w = fd_weights(tuple(range(-k, k + 1)), 1)
    out[k : n - k] = sum(w[j] * a[j : n - 2 * k + j] for j in range(width))
    for i in list(range(k)) + list(range(n - k, n)):
        start = min(max(i - k, 0), n - width)
        offs = tuple(range(start - i, start - i + width))
        ww = np.asarray(fd_weights(offs, 1))
        out[i] = np.tensordot(ww, a[start : start + width], axes=1)
    return np.moveaxis(out / spacing, 0, axis)


def central(fp: NDArray, fm: NDArray, h: float) -> NDArray:
    """Second-order centered difference from values at ``x + h`` and ``x - h``."""
    return (fp - fm) / (2.0 * h)
