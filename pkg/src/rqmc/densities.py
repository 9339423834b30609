"""Exact relativistic probability densities of the four bound-state systems.

Klein-Gordon densities carry the dilation factor |E_n|/mc^2 and integrate to
it; Dirac densities integrate to one.  Oscillator densities are evaluated
through the orthonormal Hermite functions, so

    sqrt(alpha/pi) H_n(sqrt(alpha) x)^2 exp(-alpha x^2) / (2^n n!)
        = sqrt(alpha) h_n(sqrt(alpha) x)^2

and no factorials ever appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectra
from .core import Branch, PhysicalParams, StateSpec, System, alpha
from .quadrature import integrate_line, simpson, trapezoid_weights
from .specfun import hermite_scaled, hermite_scaled_pair

DEFAULT_GRID_POINTS = 2001


@dataclass(frozen=True)
class DiracOscillatorCoefficients:
    """Component weights of the Dirac oscillator density.

    ``upper`` is |a_n|^2/|A_n|^2 = (E + mc^2)/2E and ``lower`` is
    |a'_n|^2/|A_{n-1}|^2 = (E - mc^2)/2E, with E signed by branch.  The
    absolute coefficients are kept as logarithms of |A_n|^2 because 2^n n!
    overflows long before the densities become uninteresting.
    """

    n: int
    upper: float
    lower: float
    log_a_norm_sq: float  # log |A_n|^2

    @property
    def a_sq(self) -> float:
        return self.upper * math.exp(self.log_a_norm_sq)

    @property
    def a_prime_sq(self) -> float:
        if self.n == 0:
            return 0.0
        # |A_{n-1}|^2 = 2n |A_n|^2
        return self.lower * 2 * self.n * math.exp(self.log_a_norm_sq)

    @property
    def A_sq(self) -> float:
        return math.exp(self.log_a_norm_sq)


def dirac_oscillator_coefficients(n: int, params: PhysicalParams,
                                  branch=Branch.PARTICLE) -> DiracOscillatorCoefficients:
    mc2 = params.rest_energy
    e = spectra.dirac_oscillator_energy(n, params, branch)
    excite = spectra.excitation_energy(StateSpec(System.DIRAC_OSCILLATOR, n, branch), params)
    # E +/- mc^2 without cancellation: |E| - mc^2 is the excitation energy
    big, small = (abs(e) + mc2) / (2 * abs(e)), excite / (2 * abs(e))
    upper, lower = (big, small) if e > 0 else (small, big)
    if n == 0:
        lower = 0.0
    log_a = (0.5 * math.log(alpha(params) / math.pi) - n * math.log(2.0)
             - math.lgamma(n + 1))
    return DiracOscillatorCoefficients(n, upper, lower, log_a)


def norm_target(state: StateSpec, params: PhysicalParams, energy: float | None = None) -> float:
    """Expected integral of the density: |E|/mc^2 for Klein-Gordon, 1 for Dirac."""
    if state.system.is_dirac:
        return 1.0
    if energy is None:
        energy = spectra.energy(state, params)
    return abs(energy) / params.rest_energy


def kg_oscillator_density(state: StateSpec, params: PhysicalParams, x):
    a = alpha(params)
    scale = abs(spectra.kg_oscillator_energy(state.n, params, state.branch)) / params.rest_energy
    return scale * math.sqrt(a) * hermite_scaled(state.n, math.sqrt(a) * np.asarray(x, float)) ** 2


def kg_box_density(state: StateSpec, params: PhysicalParams, x):
    x = np.asarray(x, dtype=float)
    scale = abs(spectra.kg_box_energy(state.n, params)) / params.rest_energy
    inside = (x >= 0) & (x <= params.L)
    rho = scale * 2.0 / params.L * np.sin(state.n * math.pi * x / params.L) ** 2
    out = np.where(inside, rho, 0.0)
    return out if out.ndim else float(out)


def dirac_oscillator_density(state: StateSpec, params: PhysicalParams, x):
    coef = dirac_oscillator_coefficients(state.n, params, state.branch)
    a = alpha(params)
    lo, hi = hermite_scaled_pair(state.n, math.sqrt(a) * np.asarray(x, float))
    return math.sqrt(a) * (coef.upper * hi**2 + coef.lower * lo**2)


def dirac_box_profile(x, k: float, phi: float, delta: float, b_sq: float, L: float):
    x = np.asarray(x, dtype=float)
    arg = k * x - 0.5 * delta
    rho = b_sq * (np.cos(arg) ** 2 + phi**2 * np.sin(arg) ** 2)
    out = np.where((x >= 0) & (x <= L), rho, 0.0)
    return out if out.ndim else float(out)


def dirac_box_density(state: StateSpec, params: PhysicalParams, x, k: float | None = None):
    entry = spectra.spectrum_entry(state, params, k)
    return dirac_box_profile(x, entry.k, entry.phi, entry.delta, entry.b_sq, params.L)


_DISPATCH = {
    System.KG_OSCILLATOR: kg_oscillator_density,
    System.KG_BOX: kg_box_density,
    System.DIRAC_OSCILLATOR: dirac_oscillator_density,
    System.DIRAC_BOX: dirac_box_density,
}


def density_function(state: StateSpec, params: PhysicalParams):
    """Vectorized x -> rho(x) with all state-dependent constants precomputed."""
    if state.system is System.DIRAC_BOX:
        e = spectra.spectrum_entry(state, params)
        return lambda x: dirac_box_profile(x, e.k, e.phi, e.delta, e.b_sq, params.L)
    if state.system is System.DIRAC_OSCILLATOR:
        coef = dirac_oscillator_coefficients(state.n, params, state.branch)
        ra = math.sqrt(alpha(params))

        def rho(x):
            lo, hi = hermite_scaled_pair(state.n, ra * np.asarray(x, float))
            return ra * (coef.upper * hi**2 + coef.lower * lo**2)
        return rho
    fn = _DISPATCH[state.system]
    return lambda x: fn(state, params, x)


def density(state: StateSpec, params: PhysicalParams, x):
    return density_function(state, params)(x)


def natural_extent(state: StateSpec, params: PhysicalParams) -> float:
    """Length scale of the density: kappa_n for oscillators, L for boxes."""
    if state.system.is_oscillator:
        return spectra.oscillator_kappa(state.n, params, state.system)
    return params.L


def integrate_density(state: StateSpec, params: PhysicalParams, rtol: float = 1e-10) -> float:
    """Quadrature of the density over its whole support."""
    rho = density_function(state, params)
    if state.system.is_oscillator:
        return integrate_line(rho, natural_extent(state, params), rtol=rtol)
    # at least 16 panels per oscillation so Simpson never starts aliased
    return simpson(rho, 0.0, params.L, rtol=rtol, min_intervals=max(64, 32 * state.n))


@dataclass(frozen=True, eq=False)
class DensityCurve:
    """Sampled density on an increasing grid."""

    grid: np.ndarray
    values: np.ndarray
    norm_target: float
    state: StateSpec | None = None
    energy: spectra.SpectrumEntry | None = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing with at least 2 points")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        return float(np.dot(trapezoid_weights(self.grid), self.values))

    @property
    def spacing(self) -> float:
        return float(np.max(np.diff(self.grid)))


def default_range(state: StateSpec, params: PhysicalParams) -> tuple[float, float]:
    if state.system.is_oscillator:
        # past the turning point the tail decays on the scale 1/sqrt(alpha) or faster
        half = natural_extent(state, params) + 5.0 / math.sqrt(alpha(params))
        return -half, half
    if state.system is System.DIRAC_BOX:
        # the density jumps at the walls; ending the grid there keeps the
        # trapezoid rule second order
        return 0.0, params.L
    return -0.1 * params.L, 1.1 * params.L


def density_grid(state: StateSpec, params: PhysicalParams, x_min: float | None = None,
                 x_max: float | None = None, points: int = DEFAULT_GRID_POINTS) -> DensityCurve:
    if points < 2:
        raise ValueError(f"need at least 2 grid points, got {points}")
    lo, hi = default_range(state, params)
    lo = lo if x_min is None else x_min
    hi = hi if x_max is None else x_max
    if not hi > lo:
        raise ValueError(f"empty grid range [{lo}, {hi}]")
    entry = spectra.spectrum_entry(state, params)
    grid = np.linspace(lo, hi, points)
    values = density_function(state, params)(grid)
    return DensityCurve(grid, values, norm_target(state, params, entry.energy), state, entry,
                        label=f"{state.system.value} n={state.n} {state.branch.value}")
