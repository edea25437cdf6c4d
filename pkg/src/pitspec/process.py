"""Empirical processes of generalized residuals and their exact statistics.

Given a sequence ``u`` of probability-integral transforms (uniform on
(0,1) when the model is correctly specified), this module evaluates

* the marginal process: ``(1/sqrt(m)) * sum_t [I(u_t <= r1) - r1]``,
* the lag-j pairwise process:
  ``(1/sqrt(n-j)) * sum_{t=j+1..n} [I(u_t <= r1) I(u_{t-j} <= r2) - r1 r2]``,
* the order-p joint process over consecutive observations,

and computes their Cramér-von Mises (integral of the squared process)
and Kolmogorov-Smirnov (supremum of the absolute process) statistics in
closed form, with no numerical integration or maximization.  The CvM
integrals use the pairwise identities ``int I(a<=r) dr = 1-a``,
``int I(a<=r) r dr = (1-a^2)/2`` and ``int r^2 dr = 1/3`` per axis; the
KS suprema enumerate the corners of the rectangle grid induced by the
observed values (with 1 appended), under both the closed-count (<=) and
left-limit (<) conventions, which is where the piecewise process attains
its extremes.

Statistics can be aggregated over lags 1..k: ``adj`` sums the CvM
values, ``mdj`` maximizes the KS values, and the ``adj0``/``mdj0``
variants fold in the marginal statistic.

All functions are pure; inputs are never mutated.
"""

import functools
import math
import operator
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateSampleError, InsufficientSampleError

#: PIT values numerically equal to 0 or 1 are pulled inside the open
#: interval by this amount so indicator and left-limit logic stay sharp.
CLAMP_EPS = 1e-12

#: Upper bound on the corner-grid size for the order-p (p >= 3) KS
#: supremum; the pairwise case streams in row blocks and supports the
#: documented n <= 5000 instead.
MAX_GRID_CELLS = 1 << 24
_MAX_PAIR_GRID_CELLS = 5001 * 5001


@dataclass(frozen=True)
class UniformSequence:
    """An ordered sequence of generalized residuals, strictly inside (0,1).

    Construct via :func:`uniform_sequence`, which validates and clamps.
    """

    values: np.ndarray

    def __len__(self):
        return self.values.shape[0]


def uniform_sequence(values) -> UniformSequence:
    """Validate ``values`` as PITs and wrap them.

    Values must be finite and within [0,1]; exact 0s and 1s are clamped
    to ``CLAMP_EPS`` / ``1 - CLAMP_EPS``.
    """
    v = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if v.shape[0] == 0:
        raise DegenerateSampleError("degenerate sample: empty sequence")
    if not np.all(np.isfinite(v)):
        raise ValueError("PIT values must be finite")
    if np.any(v < 0.0) or np.any(v > 1.0):
        raise ValueError("PIT values must lie in [0, 1]")
    np.clip(v, CLAMP_EPS, 1.0 - CLAMP_EPS, out=v)
    v.flags.writeable = False
    return UniformSequence(v)


def _values(u) -> np.ndarray:
    if isinstance(u, UniformSequence):
        return u.values
    return uniform_sequence(u).values


@dataclass(frozen=True)
class StatisticValue:
    """A named nonnegative test statistic.

    ``kind`` is "cvm" or "ks"; ``scope`` identifies the process and lag
    structure, e.g. "marginal", "lag(3)", "pwise(3)", "adj(5)",
    "adj0(5)", "mdj(1)".
    """

    kind: str
    scope: str
    value: float


def _check_point(r, p):
    r = np.asarray(r, dtype=np.float64).reshape(-1)
    if r.shape[0] != p:
        raise ValueError(f"evaluation point must have {p} coordinates")
    if np.any(r < 0.0) or np.any(r > 1.0):
        raise ValueError("evaluation point coordinates must lie in [0, 1]")
    return r


def eval_v1(u, r1: float, index_start: int = 1) -> float:
    """Marginal empirical process at ``r1``.

    ``index_start`` (1-based, 1 or 2) selects the full-sample or the
    drop-first convention; the divisor is the number of summands.
    """
    v = _values(u)
    if index_start not in (1, 2):
        raise ValueError("index_start must be 1 or 2")
    (r1,) = _check_point([r1], 1)
    w = v[index_start - 1 :]
    m = w.shape[0]
    if m == 0:
        raise DegenerateSampleError("degenerate sample: empty summation range")
    count = int(np.count_nonzero(w <= r1))
    return (count - m * r1) / math.sqrt(m)


def eval_v2_lag(u, j: int, r) -> float:
    """Lag-``j`` pairwise empirical process at ``r = (r1, r2)``."""
    v = _values(u)
    n = v.shape[0]
    _check_lag(j, n)
    r1, r2 = _check_point(r, 2)
    x = v[j:]
    y = v[: n - j]
    m = n - j
    count = int(np.count_nonzero((x <= r1) & (y <= r2)))
    return (count - m * r1 * r2) / math.sqrt(m)


def eval_vp(u, p: int, r) -> float:
    """Order-``p`` joint empirical process at ``r = (r1, ..., rp)``.

    Coordinate ``i`` applies to the observation lagged ``i-1`` steps, so
    ``p = 2`` reduces to :func:`eval_v2_lag` with ``j = 1``.
    """
    v = _values(u)
    n = v.shape[0]
    if p < 2:
        raise ValueError("order p must be at least 2")
    if p > n:
        raise InsufficientSampleError("insufficient sample for order p")
    r = _check_point(r, p)
    w = _lag_matrix(v, p)
    m = w.shape[0]
    ind = np.all(w <= r[None, :], axis=1)
    count = int(np.count_nonzero(ind))
    return (count - m * float(np.prod(r))) / math.sqrt(m)


def _check_lag(j, n):
    if not 1 <= j:
        raise ValueError("lag must be at least 1")
    if j >= n:
        raise InsufficientSampleError("insufficient sample for lag")


def _lag_matrix(v, p):
    """Rows ``t = p..n`` (1-based) of ``(u_t, u_{t-1}, ..., u_{t-p+1})``."""
    n = v.shape[0]
    m = n - p + 1
    return np.stack([v[p - 1 - i : n - i] for i in range(p)], axis=1)


def cvm_lag(u, j: int) -> StatisticValue:
    """Exact CvM statistic of the lag-``j`` pairwise process."""
    v = _values(u)
    n = v.shape[0]
    _check_lag(j, n)
    x = v[j:]
    y = v[: n - j]
    m = n - j
    pair = kernels.cvm_pair_sum(x, y)
    single = float(np.sum((1.0 - x * x) * (1.0 - y * y)))
    value = pair / m - 0.5 * single + m / 9.0
    return StatisticValue("cvm", f"lag({j})", max(value, 0.0))


def cvm_marginal(u) -> StatisticValue:
    """Exact CvM statistic of the marginal process (full sample)."""
    v = _values(u)
    n = v.shape[0]
    if n < 2:
        raise DegenerateSampleError("degenerate sample")
    srt = np.sort(v)
    # sum_{t,s} (1 - max) = sum_k (2k-1) (1 - u_(k)) over sorted values
    weights = 2.0 * np.arange(1, n + 1) - 1.0
    pair = float(np.dot(weights, 1.0 - srt))
    single = float(np.sum(1.0 - v * v))
    value = pair / n - single + n / 3.0
    return StatisticValue("cvm", "marginal", max(value, 0.0))


def _corner_axis(values):
    """Sorted unique coordinate values with 1 appended (values are
    clamped strictly below 1, so 1 is never a duplicate)."""
    ax = np.unique(values)
    return np.append(ax, 1.0)


def ks_lag(u, j: int) -> StatisticValue:
    """Exact KS statistic (supremum of |process|) at lag ``j``.

    Corner enumeration over the rank grid via a prefix-sum count table;
    O((n-j)^2) time and memory.
    """
    v = _values(u)
    n = v.shape[0]
    _check_lag(j, n)
    x = v[j:]
    y = v[: n - j]
    value = _ks_corner_sup(np.stack([x, y], axis=1))
    return StatisticValue("ks", f"lag({j})", value)


def ks_marginal(u) -> StatisticValue:
    """Exact KS statistic of the marginal process (full sample)."""
    v = _values(u)
    n = v.shape[0]
    if n < 2:
        raise DegenerateSampleError("degenerate sample")
    ax = _corner_axis(v)
    counts = np.zeros(ax.shape[0], dtype=np.int64)
    np.add.at(counts, np.searchsorted(ax, v), 1)
    closed = np.cumsum(counts)
    opened = closed - counts
    scaled = ax * n
    sup = max(
        float(np.max(np.abs(closed - scaled))),
        float(np.max(np.abs(opened - scaled))),
    )
    return StatisticValue("ks", "marginal", sup / math.sqrt(n))


def _ks_corner_sup(w):
    """Supremum of the |joint process| for the rows of ``w`` (m x p).

    Evaluates every corner of the grid spanned by the per-axis unique
    values plus 1, under both count conventions: the piecewise process
    is ``count - m * prod(r)`` on each cell, so cell extremes sit at the
    all-closed lower corner and the all-open upper corner.
    """
    m, p = w.shape
    axes = [_corner_axis(w[:, i]) for i in range(p)]
    if p == 2:
        return _ks_corner_sup_pair(w, axes, m)
    shape = tuple(ax.shape[0] for ax in axes)
    cells = math.prod(shape)
    if cells > MAX_GRID_CELLS:
        raise MemoryError(
            f"corner grid of {cells} cells exceeds the supported size; "
            f"reduce the sample length or order (limit {MAX_GRID_CELLS})"
        )
    counts = np.zeros(shape, dtype=np.int64)
    idx = tuple(np.searchsorted(axes[i], w[:, i]) for i in range(p))
    np.add.at(counts, idx, 1)
    closed = counts
    for axis in range(p):
        closed = np.cumsum(closed, axis=axis)
    padded = np.pad(closed, [(1, 0)] * p)
    opened = padded[(slice(0, -1),) * p]
    prod_grid = m * functools.reduce(operator.mul, np.ix_(*axes))
    sup = max(
        float(np.max(np.abs(closed - prod_grid))),
        float(np.max(np.abs(opened - prod_grid))),
    )
    return sup / math.sqrt(m)


def _ks_corner_sup_pair(w, axes, m, block=256):
    """Pairwise (p=2) corner supremum, streamed in row blocks so the
    n <= 5000 case stays within a couple hundred MB."""
    ax, ay = axes
    if ax.shape[0] * ay.shape[0] > _MAX_PAIR_GRID_CELLS:
        raise MemoryError(
            "corner grid exceeds the supported pairwise size (n <= 5000)"
        )
    counts = np.zeros((ax.shape[0], ay.shape[0]), dtype=np.int32)
    np.add.at(
        counts,
        (np.searchsorted(ax, w[:, 0]), np.searchsorted(ay, w[:, 1])),
        1,
    )
    np.cumsum(counts, axis=0, out=counts)
    np.cumsum(counts, axis=1, out=counts)
    zero_row = np.zeros(ay.shape[0], dtype=np.int32)
    sup = 0.0
    for lo in range(0, ax.shape[0], block):
        hi = min(lo + block, ax.shape[0])
        prod = m * np.multiply.outer(ax[lo:hi], ay)
        sup = max(sup, float(np.max(np.abs(counts[lo:hi] - prod))))
        # left-limit counts: shift one row up and one column left
        upper = counts[lo - 1 : hi - 1] if lo > 0 else (
            np.vstack([zero_row[None, :], counts[lo : hi - 1]])
        )
        opened = np.empty_like(prod)
        opened[:, 0] = 0.0
        opened[:, 1:] = upper[:, :-1]
        sup = max(sup, float(np.max(np.abs(opened - prod))))
    return sup / math.sqrt(m)


def cvm_pwise(u, p: int) -> StatisticValue:
    """Exact CvM statistic of the order-``p`` joint process (p <= 4)."""
    w = _pwise_matrix(u, p)
    m = w.shape[0]
    pair = _pwise_pair_sum(w)
    single = float(np.sum(np.prod((1.0 - w * w) / 2.0, axis=1)))
    value = pair / m - 2.0 * single + m * 3.0**-p
    return StatisticValue("cvm", f"pwise({p})", max(value, 0.0))


def ks_pwise(u, p: int) -> StatisticValue:
    """Exact KS statistic of the order-``p`` joint process (p <= 4)."""
    w = _pwise_matrix(u, p)
    return StatisticValue("ks", f"pwise({p})", _ks_corner_sup(w))


def _pwise_matrix(u, p):
    v = _values(u)
    n = v.shape[0]
    if not 2 <= p <= 4:
        raise ValueError("order p must be between 2 and 4")
    if p > n:
        raise InsufficientSampleError("insufficient sample for order p")
    return _lag_matrix(v, p)


def _pwise_pair_sum(w, block=128):
    """``sum_{t,s} prod_i (1 - max(w_ti, w_si))`` accumulated blockwise."""
    m, p = w.shape
    partials = []
    for lo in range(0, m, block):
        hi = min(lo + block, m)
        acc = 1.0 - np.maximum(w[lo:hi, None, 0], w[None, :, 0])
        for i in range(1, p):
            acc *= 1.0 - np.maximum(w[lo:hi, None, i], w[None, :, i])
        partials.append(float(np.sum(acc)))
    return math.fsum(partials)


_AGGREGATE_KINDS = ("adj", "mdj", "adj0", "mdj0")


def aggregate(u, k: int, kind: str) -> StatisticValue:
    """Lag-aggregated statistics over lags 1..k.

    ``adj`` sums the lagwise CvM statistics, ``mdj`` takes the maximum
    of the lagwise KS statistics; the ``0`` variants add (resp. max in)
    the marginal statistic.
    """
    kind = kind.lower()
    if kind not in _AGGREGATE_KINDS:
        raise ValueError(f"aggregate kind must be one of {_AGGREGATE_KINDS}")
    v = _values(u)
    n = v.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if k >= n:
        raise InsufficientSampleError("insufficient sample for lag")
    useq = u if isinstance(u, UniformSequence) else uniform_sequence(v)
    if kind in ("adj", "adj0"):
        value = math.fsum(cvm_lag(useq, j).value for j in range(1, k + 1))
        if kind == "adj0":
            value += cvm_marginal(useq).value
        return StatisticValue("cvm", f"{kind}({k})", value)
    value = max(ks_lag(useq, j).value for j in range(1, k + 1))
    if kind == "mdj0":
        value = max(value, ks_marginal(useq).value)
    return StatisticValue("ks", f"{kind}({k})", value)


def limit_covariance(r, s) -> float:
    """Asymptotic covariance of the pairwise process between points
    ``r`` and ``s`` of the unit square (iid-uniform limit)."""
    r1, r2 = _check_point(r, 2)
    s1, s2 = _check_point(s, 2)
    return (
        min(r1, s1) * min(r2, s2)
        + min(r1, s2) * r2 * s1
        + min(r2, s1) * r1 * s2
        - 3.0 * r1 * r2 * s1 * s2
    )
