"""Classical limits of the relativistic densities.

The quantum densities oscillate on the scale of the local wavelength, so they
are compared with their classical counterparts only after coarse-graining
both with the same kernel.  Oscillator targets come in two flavours:

``asymptotic``
    the leading term of the large-n expansion, i.e. arcsine laws with
    amplitude kappa_n (Klein-Gordon), or the two Dirac components weighted
    as in the exact density with amplitudes kappa_n and kappa_{n-1};
``classical``
    a single arcsine law whose amplitude x0 is fixed by equating |E| with
    mc^2 + m omega^2 x0^2 / 2.  This only approaches the quantum density
    when c is large compared with omega * kappa_n.

Box targets are always the uniform law on [0, L].
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import erf
from scipy.stats import linregress

from . import spectra
from .core import Branch, PhysicalParams, StateSpec, System, natural_params
from .densities import (DensityCurve, density_function, dirac_oscillator_coefficients,
                        natural_extent, norm_target)
from .quadrature import trapezoid_weights
from .specfun import bessel_j0

REPORT_VERSION = "1"


class Kernel(str, enum.Enum):
    GAUSSIAN = "gaussian"
    BOXCAR = "boxcar"


class TargetMode(str, enum.Enum):
    ASYMPTOTIC = "asymptotic"
    CLASSICAL = "classical"


# -- classical densities -----------------------------------------------------

def classical_oscillator_density(x0: float, x):
    """Arcsine law 1/(pi sqrt(x0^2 - x^2)) on (-x0, x0), zero outside."""
    if not x0 > 0:
        raise ValueError(f"x0 must be positive, got {x0}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) == x0):
        raise ValueError("arcsine density is singular at the turning points")
    inside = np.abs(x) < x0
    out = np.zeros_like(x)
    out[inside] = 1.0 / (math.pi * np.sqrt(x0**2 - x[inside] ** 2))
    return out if out.ndim else float(out)


def classical_box_density(L: float, x):
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    x = np.asarray(x, dtype=float)
    out = np.where((x >= 0) & (x <= L), 1.0 / L, 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ClassicalDensity:
    """Arcsine law on (-size, size) or uniform law on [0, size]."""

    kind: str
    size: float

    def __post_init__(self):
        if self.kind not in ("arcsine", "uniform"):
            raise ValueError(f"unknown classical density {self.kind!r}")
        if not self.size > 0:
            raise ValueError(f"size must be positive, got {self.size}")

    def __call__(self, x):
        if self.kind == "arcsine":
            return classical_oscillator_density(self.size, x)
        return classical_box_density(self.size, x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "arcsine":
            return 0.5 + np.arcsin(np.clip(x / self.size, -1.0, 1.0)) / math.pi
        return np.clip(x / self.size, 0.0, 1.0)

    def smoothed(self, x, window: float, kernel=Kernel.GAUSSIAN):
        """Exact convolution with the coarse-graining kernel."""
        x = np.asarray(x, dtype=float)
        kernel = Kernel(kernel)
        if kernel is Kernel.BOXCAR:
            return (self.cdf(x + window / 2) - self.cdf(x - window / 2)) / window
        s = window
        if self.kind == "uniform":
            r2s = math.sqrt(2.0) * s
            return (erf((self.size - x) / r2s) + erf(x / r2s)) / (2 * self.size)
        # x0 sin(t) sweeps the support; resolve the kernel width in t
        nodes = max(96, int(40 * self.size / s))
        t, w = leggauss(nodes)
        t = t * (math.pi / 2)
        w = w * (math.pi / 2)
        out = np.empty_like(x)
        for i in range(0, x.size, 512):
            d = x[i:i + 512, None] - self.size * np.sin(t)[None, :]
            out[i:i + 512] = np.exp(-0.5 * (d / s) ** 2) @ w
        return out / (math.pi * s * math.sqrt(2 * math.pi))

    def ft(self, p, hbar: float = 1.0):
        p = np.asarray(p, dtype=float)
        if self.kind == "arcsine":
            return bessel_j0(self.size * p / hbar)
        theta = self.size * p / hbar
        safe = np.where(theta == 0, 1.0, theta)
        return np.where(theta == 0, 1.0 + 0j, 1j * (np.exp(-1j * safe) - 1) / safe)


@dataclass(frozen=True)
class ClassicalTarget:
    """Weighted sum of classical densities (weights sum to one)."""

    parts: tuple[tuple[float, ClassicalDensity], ...]

    def __call__(self, x):
        return sum(w * d(x) for w, d in self.parts)

    def smoothed(self, x, window: float, kernel=Kernel.GAUSSIAN):
        return sum(w * d.smoothed(x, window, kernel) for w, d in self.parts)

    @property
    def extent(self) -> tuple[float, float]:
        lo = min(-d.size if d.kind == "arcsine" else 0.0 for _, d in self.parts)
        hi = max(d.size for _, d in self.parts)
        return lo, hi


# -- energy fixing -------------------------------------------------------------

def _index_shift(system: System, branch: Branch) -> float:
    # Dirac levels are fixed at N = n + 1/2 (particle) or n - 1/2 (antiparticle)
    if system is System.DIRAC_OSCILLATOR:
        return 0.5 if branch is Branch.PARTICLE else -0.5
    return 0.0


def amplitude_from_state(state: StateSpec, params: PhysicalParams) -> float:
    """Classical amplitude x0 with mc^2 + m omega^2 x0^2 / 2 = |E|."""
    if not state.system.is_oscillator:
        raise ValueError(f"{state.system.value} has no oscillator amplitude")
    excite = spectra.excitation_energy(state, params, _index_shift(state.system, state.branch))
    if not excite > 0:
        raise ValueError("|E| <= mc^2: zero classical amplitude")
    return math.sqrt(2 * excite / (params.m * params.omega**2))


def quantum_number_from_amplitude(x0: float, params: PhysicalParams, system,
                                  branch=Branch.PARTICLE) -> int:
    """Nearest admissible n whose (shifted) level has classical amplitude x0."""
    if not x0 > 0:
        raise ValueError(f"x0 must be positive, got {x0}")
    system, branch = System(system), Branch(branch)
    if not system.is_oscillator:
        raise ValueError(f"{system.value} has no oscillator amplitude")
    mc2 = params.rest_energy
    excite = 0.5 * params.m * params.omega**2 * x0**2
    gap = excite * (excite + 2 * mc2)  # E^2 - m^2 c^4
    level = gap / (2 * mc2 * params.hbar * params.omega)
    if system is System.KG_OSCILLATOR:
        n_real = level - 0.5
    else:
        n_real = level - _index_shift(system, branch)
    n = int(math.floor(n_real + 0.5))
    minimum = 1 if (system is System.DIRAC_OSCILLATOR and branch is Branch.ANTIPARTICLE) else 0
    if n < minimum:
        raise ValueError(f"amplitude {x0} maps below the lowest {branch.value} level")
    return n


def classical_target(state: StateSpec, params: PhysicalParams,
                     mode=TargetMode.ASYMPTOTIC) -> ClassicalTarget:
    mode = TargetMode(mode)
    s = state.system
    if s.is_box:
        return ClassicalTarget(((1.0, ClassicalDensity("uniform", params.L)),))
    if mode is TargetMode.CLASSICAL:
        return ClassicalTarget(((1.0, ClassicalDensity("arcsine", amplitude_from_state(state, params))),))
    kap = spectra.oscillator_kappa(state.n, params, s)
    if s is System.KG_OSCILLATOR or state.n == 0:
        return ClassicalTarget(((1.0, ClassicalDensity("arcsine", kap)),))
    coef = dirac_oscillator_coefficients(state.n, params, state.branch)
    kap_lo = spectra.oscillator_kappa(state.n - 1, params, s)
    return ClassicalTarget(((coef.upper, ClassicalDensity("arcsine", kap)),
                            (coef.lower, ClassicalDensity("arcsine", kap_lo))))


# -- quantum corrections ---------------------------------------------------------

@dataclass(frozen=True)
class CorrectionSeriesHook:
    """Injectable evaluator of the dimensionless correction integrals i_j(x, x0).

    ``integral(j, x, x0)`` must return an array shaped like ``x``.  The series
    is added to the arcsine law as (1/(2 pi x0)) sum_j (-hbar^2/S^2)^j i_j.
    """

    integral: object = None
    order: int = 1

    @property
    def active(self) -> bool:
        return self.integral is not None


def corrected_oscillator_density(x0: float, x, params: PhysicalParams,
                                 hook: CorrectionSeriesHook | None = None):
    """Arcsine law plus the correction series when a hook is supplied."""
    x = np.asarray(x, dtype=float)
    out = np.asarray(classical_oscillator_density(x0, x), dtype=float)
    if hook is None or not hook.active:
        return out
    action = 4 * math.sqrt(2 * math.pi) * params.m * params.omega * x0**2
    ratio = -params.hbar**2 / action**2
    series = sum(ratio**j * np.asarray(hook.integral(j, x, x0), dtype=float)
                 for j in range(1, hook.order + 1))
    return out + series / (2 * math.pi * x0)


# -- coarse graining and distances ---------------------------------------------------

def default_window(state: StateSpec, params: PhysicalParams) -> float:
    """kappa/sqrt(n) for oscillators, four density periods for boxes."""
    if state.system.is_oscillator:
        return natural_extent(state, params) / math.sqrt(max(state.n, 1))
    if state.system is System.KG_BOX:
        return 4 * params.L / state.n
    k = spectra.dirac_box_roots(params, state.n)[-1]
    return 4 * math.pi / k


def _conv_same(a, g, m: int):
    return np.convolve(a, g, mode="full")[m:m + a.size]


def coarse_grain(curve: DensityCurve, window: float | None = None, kernel=Kernel.GAUSSIAN,
                 params: PhysicalParams | None = None) -> DensityCurve:
    """Smooth a uniformly sampled curve with a normalized kernel.

    Gaussian windows are the standard deviation, boxcar windows the full
    width.  Each sample's mass is spread with weights renormalized over the
    grid, so the operation is linear, positivity preserving and conserves the
    trapezoid integral exactly (mass near the grid ends is folded back).
    """
    kernel = Kernel(kernel)
    if window is None:
        if curve.state is None:
            raise ValueError("window is required for curves without a state")
        window = default_window(curve.state, params or natural_params())
    x = curve.grid
    steps = np.diff(x)
    h = float(steps.mean())
    if np.max(np.abs(steps - h)) > 1e-9 * (x[-1] - x[0]):
        raise ValueError("coarse_grain needs a uniform grid")
    if window < 2 * h:
        raise ValueError(f"window {window} is below two grid spacings ({2 * h})")
    n = x.size
    if kernel is Kernel.GAUSSIAN:
        m = min(n - 1, int(math.ceil(8 * window / h)))
        offs = h * np.arange(-m, m + 1)
        g = np.exp(-0.5 * (offs / window) ** 2)
    else:
        m = min(n - 1, int(math.floor(window / (2 * h) + 1e-9)))
        g = np.ones(2 * m + 1)
    w = trapezoid_weights(x)
    col = _conv_same(w, g, m)
    out = _conv_same(w * curve.values / col, g, m)
    meta = dict(curve.meta, window=window, kernel=kernel.value)
    return DensityCurve(x, out, curve.norm_target, curve.state, curve.energy,
                        label=f"{curve.label} coarse", meta=meta)


def l1_distance(a: DensityCurve, b: DensityCurve) -> float:
    """Trapezoid L1 distance between the unit-normalized curves.

    ``b`` is linearly resampled onto ``a``'s grid (zero outside its range)
    when the grids differ.
    """
    vb = b.values
    if a.grid.shape != b.grid.shape or not np.array_equal(a.grid, b.grid):
        vb = np.interp(a.grid, b.grid, b.values, left=0.0, right=0.0)
    w = trapezoid_weights(a.grid)
    ia, ib = float(w @ a.values), float(w @ vb)
    if not (ia > 0 and ib > 0):
        raise ValueError("cannot normalize a curve with non-positive integral")
    return float(w @ np.abs(a.values / ia - vb / ib))


# -- studies ------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportEntry:
    n: int
    distance: float
    residual: float
    S: float | None


@dataclass(frozen=True)
class CorrespondenceReport:
    system: str
    branch: str
    units: dict
    entries: list
    exponent: float
    exponent_stderr: float
    monotone: bool
    window_policy: dict
    version: str = REPORT_VERSION

    def to_dict(self) -> dict:
        d = asdict(self)
        d["entries"] = [asdict(e) for e in self.entries]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CorrespondenceReport":
        d = dict(d)
        d["entries"] = [ReportEntry(**e) for e in d["entries"]]
        return cls(**d)

    @property
    def distances(self) -> list[float]:
        return [e.distance for e in self.entries]


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    stderr: float
    x: list = field(default_factory=list)
    y: list = field(default_factory=list)


def _fit_loglog(x, y) -> tuple[float, float]:
    x, y = np.asarray(x, float), np.asarray(y, float)
    if x.size < 3 or np.any(y <= 0):
        return float("nan"), float("nan")
    fit = linregress(np.log(x), np.log(y))
    return float(fit.slope), float(fit.stderr)


def _worker_count(jobs: int) -> int:
    cap = os.environ.get("RQMC_THREADS")
    if cap:
        return max(1, min(jobs, int(cap)))
    return max(1, min(jobs, os.cpu_count() or 1, 8))


def _study_grid(state: StateSpec, params: PhysicalParams, window: float,
                target: ClassicalTarget, kernel: Kernel):
    margin = (6.0 if kernel is Kernel.GAUSSIAN else 1.0) * window
    if state.system.is_oscillator:
        lo_t, hi_t = target.extent
        half = max(1.25 * natural_extent(state, params), hi_t, -lo_t) + margin
        # >= 16 samples per half-wavelength of the density near the centre
        h = math.pi * params.hbar / (params.m * params.omega * natural_extent(state, params)) / 16
        lo, hi = -half, half
    else:
        # walls sit half-way between nodes: the Dirac density jumps there
        cells = 32 * max(state.n, 4)
        h = params.L / cells
        pad = int(math.ceil(margin / h))
        return h * (np.arange(-pad, cells + pad) + 0.5)
    points = int(math.ceil((hi - lo) / h)) + 1
    return np.linspace(lo, hi, points)


def correspondence_distance(state: StateSpec, params: PhysicalParams, window: float | None = None,
                            kernel=Kernel.GAUSSIAN, target=TargetMode.ASYMPTOTIC) -> float:
    """Coarse-grained L1 distance between the exact density and its classical target."""
    kernel = Kernel(kernel)
    if window is None:
        window = default_window(state, params)
    tgt = classical_target(state, params, target)
    x = _study_grid(state, params, window, tgt, kernel)
    rho = density_function(state, params)(x) / norm_target(state, params)
    quantum = coarse_grain(DensityCurve(x, rho, 1.0, state), window, kernel)
    classical = DensityCurve(x, tgt.smoothed(x, window, kernel), 1.0)
    return l1_distance(quantum, classical)


def convergence_study(system, n_list, params: PhysicalParams | None = None,
                      branch=Branch.PARTICLE, window_factor: float = 1.0,
                      kernel=Kernel.GAUSSIAN, target=TargetMode.ASYMPTOTIC) -> CorrespondenceReport:
    """Distance to the classical limit along increasing quantum numbers.

    ``window_factor`` multiplies the default window of every n.  The
    residual column is always measured against the asymptotic target, the
    distance column against ``target``.
    """
    system, branch = System(system), Branch(branch)
    kernel, target = Kernel(kernel), TargetMode(target)
    params = params or natural_params()
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing with at least 3 entries")

    def one(n):
        state = StateSpec(system, n, branch)
        window = window_factor * default_window(state, params)
        dist = correspondence_distance(state, params, window, kernel, target)
        if target is TargetMode.ASYMPTOTIC:
            resid = dist
        else:
            resid = correspondence_distance(state, params, window, kernel, TargetMode.ASYMPTOTIC)
        action = spectra.oscillator_action(n, params) if system.is_oscillator else None
        return ReportEntry(n, dist, resid, action)

    with ThreadPoolExecutor(_worker_count(len(n_list))) as pool:
        entries = list(pool.map(one, n_list))
    slope, stderr = _fit_loglog(n_list, [e.distance for e in entries])
    monotone = all(b.distance < a.distance for a, b in zip(entries, entries[1:]))
    policy = {
        "kernel": kernel.value,
        "factor": float(window_factor),
        "window": ("kappa_n/sqrt(n)" if system.is_oscillator else "4 density periods"),
        "target": target.value,
    }
    units = {"mode": "natural" if params == natural_params() else "custom",
             "m": params.m, "omega": params.omega, "L": params.L,
             "hbar": params.hbar, "c": params.c}
    return CorrespondenceReport(system.value, branch.value, units, entries, slope, stderr,
                                monotone, policy)


def residual_scaling(system, n_list, params: PhysicalParams | None = None,
                     branch=Branch.PARTICLE, kernel=Kernel.GAUSSIAN) -> ScalingFit:
    """Slope of log r_n against log S_n.

    r_n is the coarse-grained L1 distance between the exact density and the
    asymptotic arcsine target at kappa_n, i.e. what the hbar^2/S_n^2
    correction series would have to account for.
    """
    system = System(system)
    if not system.is_oscillator:
        raise ValueError("residual scaling is defined for oscillators")
    params = params or natural_params()
    report = convergence_study(system, n_list, params, branch, kernel=kernel)
    actions = [e.S for e in report.entries]
    resid = [e.residual for e in report.entries]
    slope, stderr = _fit_loglog(actions, resid)
    return ScalingFit(slope, stderr, actions, resid)


@dataclass(frozen=True)
class BranchComparison:
    particle_n: int
    antiparticle_n: int
    mutual: float
    particle_distance: float
    antiparticle_distance: float

    @property
    def equivalent(self) -> bool:
        """Mutual distance within twice either branch's distance to its target."""
        return self.mutual <= 2 * min(self.particle_distance, self.antiparticle_distance)


def branch_comparison(n: int, params: PhysicalParams | None = None, window: float | None = None,
                      kernel=Kernel.GAUSSIAN, target=TargetMode.CLASSICAL) -> BranchComparison:
    """Dirac-oscillator particle n against the antiparticle at the same classical energy.

    Particle level n and antiparticle level n + 1 share N = n + 1/2, hence
    the same classical amplitude.  Both densities are coarse-grained with one
    window on one grid.
    """
    params = params or natural_params()
    kernel = Kernel(kernel)
    part = StateSpec(System.DIRAC_OSCILLATOR, n, Branch.PARTICLE)
    anti = StateSpec(System.DIRAC_OSCILLATOR, n + 1, Branch.ANTIPARTICLE)
    if window is None:
        window = default_window(part, params)
    targets = [classical_target(s, params, target) for s in (part, anti)]
    grids = [_study_grid(s, params, window, t, kernel) for s, t in zip((part, anti), targets)]
    x = max(grids, key=lambda g: g[-1] - g[0])
    smooth = []
    dists = []
    for s, t in zip((part, anti), targets):
        rho = density_function(s, params)(x)
        q = coarse_grain(DensityCurve(x, rho, 1.0, s), window, kernel)
        smooth.append(q)
        dists.append(l1_distance(q, DensityCurve(x, t.smoothed(x, window, kernel), 1.0)))
    return BranchComparison(n, n + 1, l1_distance(*smooth), dists[0], dists[1])
