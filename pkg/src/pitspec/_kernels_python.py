"""Pure numpy/scipy implementations of the hot kernels.

These mirror the compiled extension (``pitspec._ext``) exactly; the
dispatcher in :mod:`pitspec.kernels` picks whichever is importable.  Keep
the two in sync: same signatures, same recursions, same conventions.

Conventions shared by both backends:

* The mean recursion starts from the unconditional mean, ``mu[0] =
  c / (1 - a1)`` (with ``a1 = 0`` this is just ``c``), and ``mu[t] =
  c + a1 * y[t-1]`` afterwards.
* The variance recursion starts from the unconditional variance,
  ``h2[0] = omega / (1 - alpha - beta)``, and ``h2[t] = omega +
  alpha * e[t-1]**2 + beta * h2[t-1]`` afterwards.
* ``dist`` codes: 0 = standard normal, 1 = unit-variance Student-t(df),
  2 = raw Student-t(df).
"""

import math

import numpy as np
from scipy.signal import lfilter
from scipy.special import gammaln

_LOG_2PI = math.log(2.0 * math.pi)

# Row-block size for the O(n^2) pair sums; bounds peak memory at
# ~_BLOCK * n floats per temporary.
_BLOCK = 256


def _t_log_norm_const(df, standardized):
    """log of the Student-t density normalization, including the
    unit-variance rescale when requested."""
    c = gammaln((df + 1.0) / 2.0) - gammaln(df / 2.0) - 0.5 * math.log(df * math.pi)
    if standardized:
        # density of s*Z with s = sqrt((df-2)/df) gains a factor 1/s
        c -= 0.5 * math.log((df - 2.0) / df)
    return c


def garch_filter(y, c, a1, omega, alpha, beta):
    """Run the conditional mean/variance recursion over the full series.

    Returns ``(mu, h2)`` as float64 arrays of the same length as ``y``.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.shape[0]
    mu = np.empty(n)
    mu[0] = c / (1.0 - a1)
    if n > 1:
        mu[1:] = c + a1 * y[:-1]
    e2 = np.square(y - mu)
    h2 = np.empty(n)
    h2[0] = omega / (1.0 - alpha - beta)
    if n > 1:
        # h2[t] = (omega + alpha*e2[t-1]) + beta*h2[t-1]: first-order IIR
        x = omega + alpha * e2[:-1]
        h2[1:], _ = lfilter([1.0], [1.0, -beta], x, zi=[beta * h2[0]])
    return mu, h2


def garch_loglik(y, c, a1, omega, alpha, beta, start, dist, df):
    """Total log-likelihood of ``y[start:]`` under the filtered model."""
    mu, h2 = garch_filter(y, c, a1, omega, alpha, beta)
    e2 = np.square(np.asarray(y, dtype=np.float64) - mu)[start:]
    h2 = h2[start:]
    m = e2.shape[0]
    log_h2 = np.log(h2)
    if dist == 0:
        terms = -0.5 * (_LOG_2PI + log_h2 + e2 / h2)
        return float(np.sum(terms))
    const = _t_log_norm_const(df, dist == 1)
    scale2 = df - 2.0 if dist == 1 else df
    terms = -0.5 * (df + 1.0) * np.log1p(e2 / (h2 * scale2)) - 0.5 * log_h2
    return float(np.sum(terms) + m * const)


def garch_simulate(eps, c, a1, omega, alpha, beta):
    """Generate a series from unit-variance innovations ``eps``.

    The returned path has the same length as ``eps``; the caller discards
    its own burn-in prefix.
    """
    eps = np.ascontiguousarray(eps, dtype=np.float64)
    n = eps.shape[0]
    h2 = np.empty(n)
    h2[0] = omega / (1.0 - alpha - beta)
    # e[t] = sqrt(h2[t]) * eps[t], so the variance recursion closes over
    # (eps, h2) alone and the mean recursion can be layered on afterwards.
    eps2 = np.square(eps)
    for t in range(1, n):
        h2[t] = omega + (alpha * eps2[t - 1] + beta) * h2[t - 1]
    e = np.sqrt(h2) * eps
    if a1 == 0.0:
        return c + e
    y = np.empty(n)
    mean0 = c / (1.0 - a1)
    y[0] = mean0 + e[0]
    # y[t] = c + a1*y[t-1] + e[t]: another first-order IIR
    y[1:], _ = lfilter([1.0], [1.0, -a1], c + e[1:], zi=[a1 * y[0]])
    return y


def cvm_pair_sum(x, y):
    """``sum_{t,s} (1 - max(x_t, x_s)) * (1 - max(y_t, y_s))`` over all
    ordered pairs, accumulated blockwise with exact final summation."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = x.shape[0]
    partials = []
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        px = 1.0 - np.maximum(x[lo:hi, None], x[None, :])
        py = 1.0 - np.maximum(y[lo:hi, None], y[None, :])
        partials.append(float(np.sum(px * py)))
    return math.fsum(partials)
