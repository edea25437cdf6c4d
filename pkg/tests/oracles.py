"""Independent reference implementations used to check the closed forms.

Everything here evaluates the processes from their definitions (loops,
quadrature, dense grids) and deliberately shares no code with the
package's pairwise/corner algorithms.
"""

import math

import numpy as np


def brute_v1(values, r1, index_start=1):
    w = values[index_start - 1 :]
    total = sum((1.0 if v <= r1 else 0.0) - r1 for v in w)
    return total / math.sqrt(len(w))


def brute_v2_lag(values, j, r1, r2):
    n = len(values)
    total = 0.0
    for t in range(j, n):
        ind = (1.0 if values[t] <= r1 else 0.0) * (
            1.0 if values[t - j] <= r2 else 0.0
        )
        total += ind - r1 * r2
    return total / math.sqrt(n - j)


def brute_vp(values, p, r):
    n = len(values)
    total = 0.0
    for t in range(p - 1, n):
        ind = 1.0
        for i in range(p):
            ind *= 1.0 if values[t - i] <= r[i] else 0.0
        total += ind - math.prod(r)
    return total / math.sqrt(n - p + 1)


def _pair_counts_on_grid(x, y, r1_grid, r2_grid):
    """counts[i, k] = #{t : x_t <= r1_grid[i], y_t <= r2_grid[k]}."""
    counts = np.empty((r1_grid.shape[0], r2_grid.shape[0]))
    for i, r1 in enumerate(r1_grid):
        ys = np.sort(y[x <= r1])
        counts[i, :] = np.searchsorted(ys, r2_grid, side="right")
    return counts


def quadrature_cvm_lag(values, j, grid=400):
    """Midpoint-rule quadrature of the squared lag-j process."""
    v = np.asarray(values)
    x, y = v[j:], v[: v.shape[0] - j]
    m = x.shape[0]
    mid = (np.arange(grid) + 0.5) / grid
    counts = _pair_counts_on_grid(x, y, mid, mid)
    vhat = (counts - m * np.outer(mid, mid)) / math.sqrt(m)
    return float(np.mean(vhat**2))


def quadrature_cvm_marginal(values, grid=400):
    v = np.sort(np.asarray(values))
    n = v.shape[0]
    mid = (np.arange(grid) + 0.5) / grid
    counts = np.searchsorted(v, mid, side="right")
    vhat = (counts - n * mid) / math.sqrt(n)
    return float(np.mean(vhat**2))


def grid_ks_lag(values, j, grid=1000):
    """Max |lag-j process| over the grid {i/grid : i = 1..grid}^2."""
    v = np.asarray(values)
    x, y = v[j:], v[: v.shape[0] - j]
    m = x.shape[0]
    pts = np.arange(1, grid + 1) / grid
    counts = _pair_counts_on_grid(x, y, pts, pts)
    vhat = (counts - m * np.outer(pts, pts)) / math.sqrt(m)
    return float(np.max(np.abs(vhat)))


def grid_ks_marginal(values, grid=1000):
    v = np.sort(np.asarray(values))
    n = v.shape[0]
    pts = np.arange(1, grid + 1) / grid
    counts = np.searchsorted(v, pts, side="right")
    return float(np.max(np.abs(counts - n * pts)) / math.sqrt(n))


def grid_resolution_bound(m, grid):
    """|exact sup - grid max| cannot exceed this for an m-pair process:
    moving to the next grid corner changes m*r1*r2 by at most
    m*(2/grid + 1/grid^2) while the count moves in the favorable
    direction."""
    return math.sqrt(m) * (2.0 / grid + 1.0 / grid**2)
