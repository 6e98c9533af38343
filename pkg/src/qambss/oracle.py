"""Brute-force references for the rotation solvers.

These evaluate the true post-rotation cost on a dense parameter grid by
materializing the rotated rows. Nothing here touches the solver code.
"""

from __future__ import annotations

import itertools
from typing import Literal

import numpy as np

Criterion = Literal["mm", "am"]

DEFAULT_GRID_STEP = 1e-4
DEFAULT_BOUND = 1.0


def _touched_pairs(n: int, p: int, q: int) -> list[tuple[int, int, float]]:
    # leading rows plus the structural companion (sign = companion parameter sign)
    if p < n and q < n:
        return [(p, q, 1.0), (p + n, q + n, 1.0)]
    if p < n <= q:
        if q == p + n:
            return [(p, q, 1.0)]
        return [(p, q, 1.0), (q - n, p + n, -1.0)]
    raise ValueError(f"rows ({p}, {q}) do not lead a structured pair")


def _criterion(z: np.ndarray, criterion: Criterion, d_or_r: float) -> np.ndarray:
    if criterion == "mm":
        return ((z * z - d_or_r) ** 2).sum(axis=-1)
    if criterion == "am":
        return (1.0 - np.sin(z * (np.pi / (2.0 * d_or_r))) ** 2).sum(axis=-1)
    raise ValueError(f"unknown criterion {criterion!r}")


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError("grid_step must be positive")
    k = int(np.floor((hi - lo) / step + 1e-9))
    g = lo + step * np.arange(k + 1)
    return np.unique(np.concatenate([g, [0.0, hi]]))


def _scan(data, p, q, criterion, d_or_r, grid, hyperbolic: bool, chunk: int = 2048):
    n = data.shape[0] // 2
    pairs = _touched_pairs(n, p, q)
    best_x, best_f = 0.0, np.inf
    for start in range(0, grid.size, chunk):
        x = grid[start : start + chunk, None]
        total = np.zeros(x.shape[0])
        for a, b, sign in pairs:
            ya, yb = data[a][None, :], data[b][None, :]
            if hyperbolic:
                c, s = np.cosh(x), sign * np.sinh(x)
                za, zb = c * ya + s * yb, s * ya + c * yb
            else:
                c, s = np.cos(x), np.sin(x)
                za, zb = c * ya + s * yb, -s * ya + c * yb
            total += _criterion(za, criterion, d_or_r) + _criterion(zb, criterion, d_or_r)
        i = int(np.argmin(total))
        if total[i] < best_f:
            best_x, best_f = float(x[i, 0]), float(total[i])
    return best_x, best_f


def grid_min_givens(
    data: np.ndarray, p: int, q: int, criterion: Criterion, d_or_r: float, grid_step: float = DEFAULT_GRID_STEP
) -> tuple[float, float]:
    """Grid minimizer ``(theta, cost)`` over ``[-pi/4, pi/4]`` of the cost on the touched rows.

    ``d_or_r`` is the half spacing for ``am`` and the dispersion for ``mm``.
    """
    grid = _grid(-np.pi / 4, np.pi / 4, grid_step)
    return _scan(np.asarray(data, float), p, q, criterion, d_or_r, grid, hyperbolic=False)


def grid_min_hyperbolic(
    data: np.ndarray,
    p: int,
    q: int,
    criterion: Criterion,
    d_or_r: float,
    grid_step: float = DEFAULT_GRID_STEP,
    bound: float = DEFAULT_BOUND,
) -> tuple[float, float]:
    """Grid minimizer ``(gamma, cost)`` over ``[-bound, bound]``."""
    if not bound > 0:
        raise ValueError("bound must be positive")
    grid = _grid(-bound, bound, grid_step)
    return _scan(np.asarray(data, float), p, q, criterion, d_or_r, grid, hyperbolic=True)


def touched_cost(data: np.ndarray, p: int, q: int, criterion: Criterion, d_or_r: float) -> float:
    """Naive cost over the rows a pair led by ``(p, q)`` touches."""
    n = data.shape[0] // 2
    rows = sorted({r for a, b, _ in _touched_pairs(n, p, q) for r in (a, b)})
    return float(sum(_criterion(data[r], criterion, d_or_r) for r in rows))


def best_permutation(g: np.ndarray) -> np.ndarray:
    """Exhaustive assignment maximizing ``sum_j |g[j, perm[j]]|^2``."""
    mag = np.abs(np.asarray(g)) ** 2
    n = mag.shape[0]
    best, best_val = None, -np.inf
    for perm in itertools.permutations(range(n)):
        val = mag[np.arange(n), perm].sum()
        if val > best_val:
            best, best_val = perm, val
    return np.array(best)
