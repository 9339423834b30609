"""Energy spectra and derived spectral parameters of the four systems."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Branch, PhysicalParams, StateSpec, System

BISECTION_RTOL = 1e-12
BISECTION_MAXITER = 200


class RootFindingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SpectrumEntry:
    state: StateSpec
    energy: float
    kappa: float | None = None
    action: float | None = None
    k: float | None = None
    phi: float | None = None
    delta: float | None = None
    b_sq: float | None = None
    residual: float | None = None


def _signed(e_sq: float, branch: Branch | str) -> float:
    return Branch(branch).sign * math.sqrt(e_sq)


def kg_oscillator_energy(n: int, params: PhysicalParams, branch=Branch.PARTICLE) -> float:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    mc2 = params.rest_energy
    return _signed(mc2**2 + 2 * (n + 0.5) * mc2 * params.hbar * params.omega, branch)


def kg_box_energy(n: int, params: PhysicalParams, branch=Branch.PARTICLE) -> float:
    if n < 1:
        raise ValueError(f"kg-box requires n >= 1, got {n}")
    p = params.hbar * n * math.pi / params.L
    return _signed(params.rest_energy**2 + (params.c * p) ** 2, branch)


def dirac_oscillator_energy(n: float, params: PhysicalParams, branch=Branch.PARTICLE) -> float:
    """Moshinsky spectrum E^2 = m^2c^4 + 2 n hbar omega mc^2.

    ``n`` may be real so the shifted index N = n +/- 1/2 used in the energy
    fixing can be evaluated; it must keep E^2 non-negative.
    """
    mc2 = params.rest_energy
    e_sq = mc2**2 + 2 * n * params.hbar * params.omega * mc2
    if n < 0 and e_sq < 0:
        raise ValueError(f"E^2 < 0 for n = {n}")
    return _signed(e_sq, branch)


def excitation_energy(state: StateSpec, params: PhysicalParams, shift: float = 0.0) -> float:
    """|E| - mc^2, computed without cancellation.

    ``shift`` offsets the oscillator index (N = n + shift).
    """
    mc2 = params.rest_energy
    n = state.n + shift
    s = state.system
    if s is System.KG_OSCILLATOR:
        gap = 2 * (n + 0.5) * mc2 * params.hbar * params.omega
    elif s is System.DIRAC_OSCILLATOR:
        gap = 2 * n * params.hbar * params.omega * mc2
    elif s is System.KG_BOX:
        gap = (params.c * params.hbar * n * math.pi / params.L) ** 2
    else:
        k = dirac_box_roots(params, state.n)[-1]
        gap = (params.hbar * k * params.c) ** 2
    if gap < 0:
        return -mc2 + math.sqrt(max(mc2**2 + gap, 0.0))
    return gap / (math.sqrt(mc2**2 + gap) + mc2)


def _box_condition(k: float, params: PhysicalParams) -> float:
    # tan(kL) + hbar k/(mc) multiplied through by cos(kL): no poles in the bracket
    kl = k * params.L
    return math.sin(kl) + params.hbar * k / (params.m * params.c) * math.cos(kl)


def box_condition_residual(k: float, params: PhysicalParams) -> float:
    """|tan(kL) + hbar k/(mc)| evaluated literally."""
    return abs(math.tan(k * params.L) + params.hbar * k / (params.m * params.c))


def _bisect(f, lo: float, hi: float) -> float:
    # runs to machine precision; BISECTION_RTOL is the acceptance floor
    flo = f(lo)
    if flo == 0.0:
        return lo
    for _ in range(BISECTION_MAXITER):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    if hi - lo <= BISECTION_RTOL * hi:
        return 0.5 * (lo + hi)
    raise RootFindingError(f"bisection did not converge in [{lo}, {hi}]")


def dirac_box_roots(params: PhysicalParams, count: int) -> list[float]:
    """First ``count`` positive wavenumbers solving tan(kL) = -hbar k/(mc).

    Root j lies in ((j - 1/2) pi / L, j pi / L) where the left-hand side
    sweeps from -inf to 0 while the right-hand side stays negative.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    roots = []
    f = lambda k: _box_condition(k, params)  # noqa: E731
    for j in range(1, count + 1):
        lo = (j - 0.5) * math.pi / params.L
        hi = j * math.pi / params.L
        if (f(lo) > 0) == (f(hi) > 0):
            raise RootFindingError(f"no sign change in bracket {j}")
        roots.append(_bisect(f, lo, hi))
    return roots


def dirac_box_parameters(k: float, params: PhysicalParams):
    """(E_k, Phi_k, delta_k, |B_k|^2) for a quantized wavenumber k.

    delta_k is taken on the branch -2 arctan(Phi_k), which equals the
    principal arctan(2 Phi/(Phi^2 - 1)) for Phi < 1 and is continuous with
    delta -> 0- as Phi -> 0.  The normalization uses the exact integral of the
    density over [0, L],

        1/|B|^2 = (Phi^2 - 1)/(4k) (2kL - sin(2kL - delta) - sin(delta)) + L.
    """
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    mc2 = params.rest_energy
    pc = params.hbar * k * params.c
    energy = math.sqrt(mc2**2 + pc**2)
    phi = pc / (energy + mc2)
    if phi == 1.0:
        raise ValueError("Phi_k = 1: delta_k is singular")
    delta = -2.0 * math.atan(phi)
    kl = k * params.L
    inv_b_sq = ((phi**2 - 1) / (4 * k) * (2 * kl - math.sin(2 * kl - delta) - math.sin(delta))
                + params.L)
    return energy, phi, delta, 1.0 / inv_b_sq


def oscillator_kappa(n: float, params: PhysicalParams, system=System.KG_OSCILLATOR) -> float:
    """Turning-point parameter sqrt(2 hbar (n + 1/2) / (m omega)).

    Both oscillators use the same formula; the Dirac density needs it at n
    and at n - 1.
    """
    if not System(system).is_oscillator:
        raise ValueError(f"kappa is defined for oscillators, not {system}")
    if n < -0.5:
        raise ValueError(f"n must be >= -1/2, got {n}")
    return math.sqrt(2 * params.hbar * (n + 0.5) / (params.m * params.omega))


def oscillator_action(n: float, params: PhysicalParams) -> float:
    return 4 * math.sqrt(2 * math.pi) * params.m * params.omega * oscillator_kappa(n, params) ** 2


def energy(state: StateSpec, params: PhysicalParams) -> float:
    s = state.system
    if s is System.KG_OSCILLATOR:
        return kg_oscillator_energy(state.n, params, state.branch)
    if s is System.KG_BOX:
        return kg_box_energy(state.n, params, state.branch)
    if s is System.DIRAC_OSCILLATOR:
        return dirac_oscillator_energy(state.n, params, state.branch)
    k = dirac_box_roots(params, state.n)[-1]
    return state.branch.sign * dirac_box_parameters(k, params)[0]


def spectrum_entry(state: StateSpec, params: PhysicalParams, k: float | None = None) -> SpectrumEntry:
    """Energy plus the derived parameters appropriate to the system.

    For dirac-box a precomputed root ``k`` can be passed to avoid re-solving.
    """
    s = state.system
    if s is System.DIRAC_BOX:
        if k is None:
            k = dirac_box_roots(params, state.n)[-1]
        e, phi, delta, b_sq = dirac_box_parameters(k, params)
        return SpectrumEntry(state, state.branch.sign * e, k=k, phi=phi, delta=delta,
                             b_sq=b_sq, residual=box_condition_residual(k, params))
    e = energy(state, params)
    if s.is_oscillator:
        return SpectrumEntry(state, e, kappa=oscillator_kappa(state.n, params, s),
                             action=oscillator_action(state.n, params))
    return SpectrumEntry(state, e)


def spectrum(system, n_values, params: PhysicalParams, branch=Branch.PARTICLE) -> list[SpectrumEntry]:
    system = System(system)
    n_values = list(n_values)
    if system is System.DIRAC_BOX:
        roots = dirac_box_roots(params, max(n_values))
        return [spectrum_entry(StateSpec(system, n, branch), params, roots[n - 1]) for n in n_values]
    return [spectrum_entry(StateSpec(system, n, branch), params) for n in n_values]
