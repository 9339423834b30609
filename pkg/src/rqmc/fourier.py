"""Fourier transforms of the densities.

Convention: f(p) = integral rho(x) exp(-i p x / hbar) dx, so f(0) is the
density's integral.  Closed forms are checked against ``ft_numeric``, which
only ever sees rho as a black box.

The oscillator closed forms take the Laguerre argument as p^2/(2 m omega
hbar).  Written with a bare p the expression is not dimensionless and
disagrees with the quadrature already at n = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import spectra
from .core import PhysicalParams, StateSpec, System
from .densities import (DensityCurve, density_function, dirac_oscillator_coefficients,
                        natural_extent, norm_target)
from .quadrature import integrate_line, simpson, trapezoid_weights
from .specfun import bessel_j0, laguerre


class Source(str, enum.Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric-oracle"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class TransformSample:
    p: float
    value: complex
    source: Source


def ft_numeric(rho, p: float, hbar: float = 1.0, *, interval: tuple[float, float] | None = None,
               scale: float = 1.0, min_intervals: int = 64, rtol: float = 1e-11) -> complex:
    """Quadrature Fourier transform of a density.

    ``rho`` is a vectorized callable or a :class:`DensityCurve`.  Callables are
    integrated with doubling Simpson, over ``interval`` when given and over the
    whole line (window grown from 3*scale) otherwise.  Curves use the
    trapezoid rule on their own samples, so their accuracy is limited by the
    grid.
    """
    if isinstance(rho, DensityCurve):
        phase = np.exp(-1j * p * rho.grid / hbar)
        return complex(np.dot(trapezoid_weights(rho.grid), rho.values * phase))

    def integrand(x):
        return rho(x) * np.exp(-1j * p * x / hbar)

    if interval is None:
        return complex(integrate_line(integrand, scale, rtol=rtol))
    return complex(simpson(integrand, interval[0], interval[1], rtol=rtol,
                           min_intervals=min_intervals))


def state_ft_numeric(state: StateSpec, params: PhysicalParams, p: float) -> complex:
    """ft_numeric with the integration region chosen from the state."""
    rho = density_function(state, params)
    if state.system.is_oscillator:
        kap = natural_extent(state, params)
        return ft_numeric(rho, p, params.hbar, scale=kap)
    nint = max(64, 32 * state.n + int(8 * abs(p) * params.L / params.hbar))
    return ft_numeric(rho, p, params.hbar, interval=(0.0, params.L), min_intervals=nint)


def _gauss_and_laguerre_arg(p, params: PhysicalParams):
    p = np.asarray(p, dtype=float)
    mwh = params.m * params.omega * params.hbar
    return np.exp(-p * p / (4 * mwh)), p * p / (2 * mwh)


def _scalar(v):
    v = np.asarray(v)
    return v if v.ndim else float(v)


def kg_oscillator_ft(n: int, params: PhysicalParams, p, branch="particle"):
    e = spectra.kg_oscillator_energy(n, params, branch)
    g, arg = _gauss_and_laguerre_arg(p, params)
    return _scalar(abs(e) / params.rest_energy * g * laguerre(n, arg))


def dirac_oscillator_ft(n: int, params: PhysicalParams, p, branch="particle"):
    coef = dirac_oscillator_coefficients(n, params, branch)
    g, arg = _gauss_and_laguerre_arg(p, params)
    out = coef.upper * laguerre(n, arg)
    if n > 0:
        out = out + coef.lower * laguerre(n - 1, arg)
    return _scalar(g * out)


def box_ft_asymptotic(params: PhysicalParams, energy: float, p, system=System.KG_BOX, *,
                      phi: float | None = None, b_sq: float | None = None):
    """Large-n Fourier coefficient of a box density.

    kg-box: (|E|/mc^2) (i hbar / (p L)) (exp(-i L p / hbar) - 1).
    dirac-box: (1 + Phi^2) |B|^2 (i hbar / 2p) (exp(-i L p / hbar) - 1), which
    needs ``phi`` and ``b_sq``.  At p = 0 the finite limit is returned.
    """
    system = System(system)
    if system is System.KG_BOX:
        amp = abs(energy) / params.rest_energy / params.L
    elif system is System.DIRAC_BOX:
        if phi is None or b_sq is None:
            raise ValueError("dirac-box asymptotic needs phi and b_sq")
        amp = 0.5 * (1 + phi**2) * b_sq
    else:
        raise ValueError(f"{system.value} is not a box system")
    p = np.asarray(p, dtype=float)
    theta = params.L * p / params.hbar
    safe = np.where(theta == 0, 1.0, theta)
    # i (e^{-i t} - 1) / t, with limit 1 at t = 0
    shape = np.where(theta == 0, 1.0 + 0j, 1j * (np.exp(-1j * safe) - 1) / safe)
    out = amp * params.L * shape
    return out if out.ndim else complex(out)


def classical_oscillator_ft(x0: float, p, params: PhysicalParams):
    """Transform of the arcsine law on (-x0, x0): J0(x0 p / hbar)."""
    if not x0 > 0:
        raise ValueError(f"x0 must be positive, got {x0}")
    return bessel_j0(x0 * np.asarray(p, dtype=float) / params.hbar)


def oscillator_ft_asymptotic(state: StateSpec, params: PhysicalParams, p):
    """Bessel leading term of an oscillator transform.

    kg: (|E|/mc^2) J0(kappa_n p / hbar).  dirac: the two components weighted
    as in the exact density, with J0 at kappa_n and kappa_{n-1}.
    """
    s = state.system
    if s is System.KG_OSCILLATOR:
        scale = norm_target(state, params)
        return scale * classical_oscillator_ft(spectra.oscillator_kappa(state.n, params), p, params)
    if s is System.DIRAC_OSCILLATOR:
        coef = dirac_oscillator_coefficients(state.n, params, state.branch)
        out = coef.upper * classical_oscillator_ft(spectra.oscillator_kappa(state.n, params), p, params)
        if state.n > 0:
            out = out + coef.lower * classical_oscillator_ft(
                spectra.oscillator_kappa(state.n - 1, params), p, params)
        return out
    raise ValueError(f"{s.value} is not an oscillator")


def state_ft_analytic(state: StateSpec, params: PhysicalParams, p):
    if state.system is System.KG_OSCILLATOR:
        return kg_oscillator_ft(state.n, params, p, state.branch)
    if state.system is System.DIRAC_OSCILLATOR:
        return dirac_oscillator_ft(state.n, params, p, state.branch)
    raise ValueError(f"no exact closed form for {state.system.value}")


def state_ft_asymptotic(state: StateSpec, params: PhysicalParams, p):
    if state.system.is_oscillator:
        return oscillator_ft_asymptotic(state, params, p)
    entry = spectra.spectrum_entry(state, params)
    return box_ft_asymptotic(params, entry.energy, p, state.system, phi=entry.phi, b_sq=entry.b_sq)


def transform_table(state: StateSpec, params: PhysicalParams, p_values) -> list[TransformSample]:
    """Every available transform of ``state`` at each p, grouped by source."""
    p_values = [float(p) for p in p_values]
    rows = []
    if state.system.is_oscillator:
        analytic = np.atleast_1d(state_ft_analytic(state, params, p_values))
        rows += [TransformSample(p, complex(v), Source.ANALYTIC) for p, v in zip(p_values, analytic)]
    rows += [TransformSample(p, state_ft_numeric(state, params, p), Source.NUMERIC) for p in p_values]
    asym = np.atleast_1d(state_ft_asymptotic(state, params, p_values))
    rows += [TransformSample(p, complex(v), Source.ASYMPTOTIC) for p, v in zip(p_values, asym)]
    return rows


def momentum_correspondence_gap(n: int, params: PhysicalParams, q_max: float = 10.0,
                                points: int = 2001) -> float:
    """sup over 0 <= kappa_n p / hbar <= q_max of |f_n(p) mc^2/|E_n| - J0(kappa_n p / hbar)|."""
    kap = spectra.oscillator_kappa(n, params)
    q = np.linspace(0.0, q_max, points)
    p = q * params.hbar / kap
    e = spectra.kg_oscillator_energy(n, params)
    f = np.asarray(kg_oscillator_ft(n, params, p)) * params.rest_energy / abs(e)
    return float(np.max(np.abs(f - bessel_j0(q))))


__all__ = [
    "Source", "TransformSample", "ft_numeric", "state_ft_numeric", "kg_oscillator_ft",
    "dirac_oscillator_ft", "box_ft_asymptotic", "classical_oscillator_ft",
    "oscillator_ft_asymptotic", "state_ft_analytic", "state_ft_asymptotic",
    "transform_table", "momentum_correspondence_gap",
]
