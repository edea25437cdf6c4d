# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Mirrors ``pitspec._kernels_python`` (same signatures, same recursions and
distribution codes); see that module for the conventions.  The pair sum
uses Kahan compensation, matching the fallback's blockwise exact
accumulation to ~1e-13.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport lgamma, log, log1p, pi, sqrt

cnp.import_array()

cdef double _LOG_2PI = log(2.0 * pi)


cdef double _t_log_norm_const(double df, bint standardized) nogil:
    cdef double c = lgamma((df + 1.0) / 2.0) - lgamma(df / 2.0) \
        - 0.5 * log(df * pi)
    if standardized:
        c -= 0.5 * log((df - 2.0) / df)
    return c


def garch_filter(y, double c, double a1, double omega, double alpha,
                 double beta):
    """Run the conditional mean/variance recursion over the full series.

    Returns ``(mu, h2)`` as float64 arrays of the same length as ``y``.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = \
        np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = ya.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mu = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] h2 = np.empty(n)
    cdef Py_ssize_t t
    cdef double e
    mu[0] = c / (1.0 - a1)
    h2[0] = omega / (1.0 - alpha - beta)
    for t in range(1, n):
        mu[t] = c + a1 * ya[t - 1]
        e = ya[t - 1] - mu[t - 1]
        h2[t] = (omega + alpha * (e * e)) + beta * h2[t - 1]
    return mu, h2


def garch_loglik(y, double c, double a1, double omega, double alpha,
                 double beta, Py_ssize_t start, int dist, double df):
    """Total log-likelihood of ``y[start:]`` under the filtered model."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = \
        np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = ya.shape[0]
    cdef Py_ssize_t t
    cdef double mu_prev, mu_t, h2_t, e, e2, z2, ll, const, scale2
    mu_t = c / (1.0 - a1)
    h2_t = omega / (1.0 - alpha - beta)
    ll = 0.0
    const = 0.0
    scale2 = 1.0
    if dist != 0:
        const = _t_log_norm_const(df, dist == 1)
        scale2 = df - 2.0 if dist == 1 else df
    for t in range(n):
        if t > 0:
            e = ya[t - 1] - mu_t
            mu_t = c + a1 * ya[t - 1]
            h2_t = (omega + alpha * (e * e)) + beta * h2_t
        if t < start:
            continue
        e2 = ya[t] - mu_t
        e2 = e2 * e2
        if dist == 0:
            ll += -0.5 * (_LOG_2PI + log(h2_t) + e2 / h2_t)
        else:
            ll += const - 0.5 * (df + 1.0) * log1p(e2 / (h2_t * scale2)) \
                - 0.5 * log(h2_t)
    return ll


def garch_simulate(eps, double c, double a1, double omega, double alpha,
                   double beta):
    """Generate a series from unit-variance innovations ``eps``.

    The returned path has the same length as ``eps``; the caller discards
    its own burn-in prefix.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ea = \
        np.ascontiguousarray(eps, dtype=np.float64)
    cdef Py_ssize_t n = ea.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = np.empty(n)
    cdef Py_ssize_t t
    cdef double h2_t, e_prev, e_t
    h2_t = omega / (1.0 - alpha - beta)
    e_prev = sqrt(h2_t) * ea[0]
    ya[0] = c / (1.0 - a1) + e_prev
    for t in range(1, n):
        h2_t = (omega + alpha * (e_prev * e_prev)) + beta * h2_t
        e_t = sqrt(h2_t) * ea[t]
        ya[t] = (c + e_t) + a1 * ya[t - 1]
        e_prev = e_t
    return ya


def cvm_pair_sum(x, y):
    """``sum_{t,s} (1 - max(x_t, x_s)) * (1 - max(y_t, y_s))`` over all
    ordered pairs, with Kahan-compensated accumulation."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = \
        np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = \
        np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xa.shape[0]
    cdef Py_ssize_t t, s
    cdef double total = 0.0
    cdef double comp = 0.0
    cdef double xt, yt, mx, my, term, yv, tmp
    with nogil:
        for t in range(n):
            xt = xa[t]
            yt = ya[t]
            for s in range(n):
                mx = xa[s] if xa[s] > xt else xt
                my = ya[s] if ya[s] > yt else yt
                term = (1.0 - mx) * (1.0 - my) - comp
                tmp = total + term
                comp = (tmp - total) - term
                total = tmp
    return total
