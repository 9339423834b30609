"""Overflow-stable Hermite functions, Laguerre polynomials and Bessel J0.

Raw Hermite polynomials are never formed: 2**n * n! leaves double range near
n = 150, so only the orthonormal Hermite functions

    h_n(x) = H_n(x) exp(-x**2 / 2) / sqrt(2**n n! sqrt(pi))

are exposed.  The normalized recurrence keeps the iterates O(1) inside the
oscillation region; outside it they grow, so the Gaussian seed is carried as
a separate log-scale and the running pair is renormalized whenever it gets
large.
"""

from __future__ import annotations

import math

import numpy as np

_RESCALE_AT = 1e150
_LOG_RESCALE = math.log(_RESCALE_AT)
_PI_QUARTER = math.pi ** -0.25

J0_SERIES_CUTOFF = 8.0


def _hermite_pair(n: int, x):
    """Return (h_{n-1}(x), h_n(x)) as arrays; h_{-1} is taken as 0."""
    if n < 0:
        raise ValueError(f"Hermite order must be non-negative, got {n}")
    x = np.asarray(x, dtype=float)
    log_scale = -0.5 * x * x
    prev = np.zeros_like(x)
    cur = np.full_like(x, _PI_QUARTER)
    for k in range(n):
        nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE_AT
        if big.any():
            prev = np.where(big, prev / _RESCALE_AT, prev)
            cur = np.where(big, cur / _RESCALE_AT, cur)
            log_scale = log_scale + np.where(big, _LOG_RESCALE, 0.0)
    factor = np.exp(log_scale)
    return prev * factor, cur * factor


def hermite_scaled(n: int, x):
    """Orthonormal Hermite function h_n(x).

    Finite for every n and x; far outside the turning points it underflows
    cleanly to zero.
    """
    out = _hermite_pair(n, x)[1]
    return out if out.ndim else float(out)


def hermite_scaled_pair(n: int, x):
    """(h_{n-1}(x), h_n(x)) from a single recurrence pass."""
    lo, hi = _hermite_pair(n, x)
    if lo.ndim:
        return lo, hi
    return float(lo), float(hi)


def laguerre(n: int, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError(f"Laguerre degree must be non-negative, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def _j0_series(x):
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 60):
        term = term * q / (k * k)
        total = total + term
    return total


def _j0_periodic_trapezoid(x):
    # J0(x) = (1/2pi) int_0^{2pi} cos(x sin t) dt; the N-point rule is exact up
    # to 2 * J_N(x), negligible once N exceeds |x| by a healthy margin.
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        npts = int(2 * abs(xi)) + 64
        t = 2.0 * math.pi * np.arange(npts) / npts
        out[i] = np.cos(xi * np.sin(t)).mean()
    return out


def bessel_j0(x):
    """Bessel function of the first kind of order zero."""
    x = np.asarray(x, dtype=float)
    flat = np.abs(x).ravel()
    out = np.empty_like(flat)
    small = flat < J0_SERIES_CUTOFF
    out[small] = _j0_series(flat[small])
    out[~small] = _j0_periodic_trapezoid(flat[~small])
    out = out.reshape(x.shape)
    return out if out.ndim else float(out)
