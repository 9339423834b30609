"""Composite Simpson quadrature with interval doubling.

Used as the independent oracle for normalizations and Fourier transforms,
so it deliberately knows nothing about the integrands.
"""

from __future__ import annotations

import numpy as np


class QuadratureError(ArithmeticError):
    """Raised when a quadrature fails to reach its tolerance."""


def simpson(f, a: float, b: float, rtol: float = 1e-10, atol: float = 1e-13,
            min_intervals: int = 64, max_intervals: int = 2**22):
    """Integrate a vectorized ``f`` over [a, b].

    The panel count doubles until two successive estimates agree to
    ``max(atol, rtol * |I|)``.  Complex integrands are fine.
    """
    if b == a:
        return 0.0
    nint = min_intervals
    x = np.linspace(a, b, nint + 1)
    fx = np.asarray(f(x))
    h = (b - a) / nint
    odd = fx[1:-1:2].sum()
    even = fx[2:-1:2].sum()
    ends = fx[0] + fx[-1]
    estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
    while nint < max_intervals:
        nint *= 2
        h = (b - a) / nint
        mids = np.asarray(f(a + h * np.arange(1, nint, 2)))
        even = even + odd
        odd = mids.sum()
        new = h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
        if abs(new - estimate) <= max(atol, rtol * abs(new)):
            return new
        estimate = new
    raise QuadratureError(f"simpson did not converge on [{a}, {b}] with {nint} panels")


def integrate_line(f, scale: float, center: float = 0.0, start: float = 3.0,
                   tail_tol: float = 1e-12, rtol: float = 1e-10, max_doublings: int = 8):
    """Integrate an exponentially localized ``f`` over the real line.

    Starts on [center - start*scale, center + start*scale] and doubles the
    half-width until the added tails contribute less than ``tail_tol``.
    """
    w = start * scale
    total = simpson(f, center - w, center + w, rtol=rtol)
    for _ in range(max_doublings):
        tails = (simpson(f, center - 2 * w, center - w, rtol=rtol)
                 + simpson(f, center + w, center + 2 * w, rtol=rtol))
        total = total + tails
        w *= 2
        if abs(tails) < tail_tol:
            return total
    raise QuadratureError("tails did not decay while widening the integration window")


def trapezoid_weights(x):
    x = np.asarray(x, dtype=float)
    w = np.empty_like(x)
    d = np.diff(x)
    w[0] = d[0] / 2
    w[-1] = d[-1] / 2
    w[1:-1] = (d[:-1] + d[1:]) / 2
    return w
