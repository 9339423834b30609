"""Physical parameters, unit conventions and state descriptors."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields


class System(str, enum.Enum):
    KG_OSCILLATOR = "kg-oscillator"
    KG_BOX = "kg-box"
    DIRAC_OSCILLATOR = "dirac-oscillator"
    DIRAC_BOX = "dirac-box"

    @property
    def is_oscillator(self) -> bool:
        return self in (System.KG_OSCILLATOR, System.DIRAC_OSCILLATOR)

    @property
    def is_box(self) -> bool:
        return not self.is_oscillator

    @property
    def is_dirac(self) -> bool:
        return self in (System.DIRAC_OSCILLATOR, System.DIRAC_BOX)

    @property
    def min_n(self) -> int:
        return 0 if self.is_oscillator else 1


class Branch(str, enum.Enum):
    PARTICLE = "particle"
    ANTIPARTICLE = "antiparticle"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PARTICLE else -1


class UnitMode(str, enum.Enum):
    NATURAL = "natural"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional context shared by every computation.

    ``omega`` only matters for the oscillators and ``L`` only for the boxes,
    but both are always present (and positive) so one object can drive any
    system.
    """

    m: float = 1.0
    omega: float = 1.0
    L: float = 1.0
    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{f.name} must be a finite positive number, got {v!r}")
            object.__setattr__(self, f.name, float(v))

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    def replace(self, **changes) -> "PhysicalParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return PhysicalParams(**values)


@dataclass(frozen=True)
class UnitSystem:
    mode: UnitMode = UnitMode.NATURAL

    def params(self, **overrides) -> PhysicalParams:
        if self.mode is UnitMode.NATURAL and overrides:
            raise ValueError("natural units fix m = omega = hbar = c = L = 1; use custom mode")
        return natural_params().replace(**overrides)


@dataclass(frozen=True)
class StateSpec:
    system: System
    n: int
    branch: Branch = Branch.PARTICLE

    def __post_init__(self):
        object.__setattr__(self, "system", System(self.system))
        object.__setattr__(self, "branch", Branch(self.branch))
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValueError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < self.system.min_n:
            raise ValueError(f"{self.system.value} requires n >= {self.system.min_n}, got {self.n}")
        # E_0 = -mc^2 would put all weight on the (non-existent) H_{-1} component
        if (self.system is System.DIRAC_OSCILLATOR and self.n == 0
                and self.branch is Branch.ANTIPARTICLE):
            raise ValueError("dirac-oscillator has no antiparticle state at n = 0")


def natural_params() -> PhysicalParams:
    return PhysicalParams(1.0, 1.0, 1.0, 1.0, 1.0)


def alpha(params: PhysicalParams) -> float:
    """Inverse squared oscillator length m*omega/hbar."""
    return params.m * params.omega / params.hbar
