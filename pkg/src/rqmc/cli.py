"""Command-line front end: spectra, densities, transforms and convergence reports.

Every float is written as ``%.12e``; identical arguments give byte-identical
output.  Exit status is 0 on success, 1 on numerical failure and 2 on a
configuration error, and nothing is written unless the run succeeds.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass

from . import __version__
from .core import Branch, PhysicalParams, StateSpec, System, UnitMode, UnitSystem
from .correspondence import Kernel, TargetMode, convergence_study
from .densities import density_grid
from .fourier import transform_table
from .spectra import spectrum

SYSTEM_ALIASES = {
    "kg-osc": System.KG_OSCILLATOR,
    "kg-box": System.KG_BOX,
    "dirac-osc": System.DIRAC_OSCILLATOR,
    "dirac-box": System.DIRAC_BOX,
}
FLOAT_FORMAT = "%.12e"
DEFAULT_N_LIST = (10, 20, 40, 80, 160)


class ConfigError(ValueError):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, str)):
        return str(v)
    return FLOAT_FORMAT % v


def dump_json(obj, indent: int = 0) -> str:
    """JSON with every float in fixed scientific notation."""
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dump_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dump_json(v, indent + 1) for v in obj) + "\n" + "  " * indent + "]"
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return FLOAT_FORMAT % obj
    return json.dumps(obj)


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


@dataclass(frozen=True)
class RunConfig:
    command: str
    system: System
    branch: Branch
    params: PhysicalParams
    units: UnitMode
    fmt: str
    output: str | None
    args: argparse.Namespace

    def units_dict(self) -> dict:
        p = self.params
        return {"mode": self.units.value, "m": p.m, "omega": p.omega, "L": p.L,
                "hbar": p.hbar, "c": p.c}


def resolve(args: argparse.Namespace) -> RunConfig:
    units = UnitMode(args.units)
    overrides = {k: getattr(args, k) for k in ("m", "omega", "c", "hbar", "L")
                 if getattr(args, k) is not None}
    try:
        params = UnitSystem(units).params(**overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    fmt_ = args.format or ("json" if args.command == "converge" else "csv")
    return RunConfig(args.command, SYSTEM_ALIASES[args.system], Branch(args.branch), params,
                     units, fmt_, args.output, args)


def _state(cfg: RunConfig, n: int) -> StateSpec:
    try:
        return StateSpec(cfg.system, n, cfg.branch)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _levels(cfg: RunConfig) -> list[int]:
    a = cfg.args
    lo = cfg.system.min_n
    if cfg.system is System.DIRAC_OSCILLATOR and cfg.branch is Branch.ANTIPARTICLE:
        lo = 1
    if a.n_list:
        levels = a.n_list
    elif a.count is not None:
        levels = list(range(lo, lo + a.count))
    elif a.n_max is not None:
        levels = list(range(lo, a.n_max + 1))
    else:
        levels = list(range(lo, lo + 5))
    if not levels:
        raise ConfigError("no levels selected")
    for n in levels:
        _state(cfg, n)
    return levels


def cmd_spectrum(cfg: RunConfig) -> str:
    entries = spectrum(cfg.system, _levels(cfg), cfg.params, cfg.branch)
    if cfg.system.is_oscillator:
        header = ["n", "E", "kappa", "S"]
        rows = [[e.state.n, e.energy, e.kappa, e.action] for e in entries]
    elif cfg.system is System.KG_BOX:
        header = ["n", "E"]
        rows = [[e.state.n, e.energy] for e in entries]
    else:
        header = ["n", "k", "E", "Phi", "delta", "Bsq", "residual"]
        rows = [[e.state.n, e.k, e.energy, e.phi, e.delta, e.b_sq, e.residual] for e in entries]
    if cfg.fmt == "csv":
        return write_csv(header, rows)
    doc = {"system": cfg.system.value, "branch": cfg.branch.value, "units": cfg.units_dict(),
           "rows": [dict(zip(header, r)) for r in rows], "version": __version__}
    return dump_json(doc) + "\n"


def cmd_density(cfg: RunConfig) -> str:
    a = cfg.args
    state = _state(cfg, a.n)
    try:
        curve = density_grid(state, cfg.params, a.x_min, a.x_max, a.grid_points)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = list(zip(curve.grid.tolist(), curve.values.tolist()))
    if cfg.fmt == "csv":
        return write_csv(["x", "rho"], rows)
    e = curve.energy
    meta = {"system": cfg.system.value, "n": state.n, "branch": cfg.branch.value,
            "units": cfg.units_dict(), "norm_target": curve.norm_target, "energy": e.energy,
            "kappa": e.kappa, "k": e.k, "version": __version__}
    doc = {"metadata": meta, "x": curve.grid.tolist(), "rho": curve.values.tolist()}
    return dump_json(doc) + "\n"


def cmd_ft(cfg: RunConfig) -> str:
    a = cfg.args
    state = _state(cfg, a.n)
    if a.p_points < 2 or not a.p_max > 0:
        raise ConfigError("need p-max > 0 and at least 2 p points")
    step = a.p_max / (a.p_points - 1)
    p_values = [i * step for i in range(a.p_points)]
    samples = transform_table(state, cfg.params, p_values)
    rows = [[s.p, s.value.real, s.value.imag, s.source.value] for s in samples]
    if cfg.fmt == "csv":
        return write_csv(["p", "re", "im", "source"], rows)
    doc = {"system": cfg.system.value, "n": state.n, "branch": cfg.branch.value,
           "units": cfg.units_dict(),
           "rows": [dict(zip(["p", "re", "im", "source"], r)) for r in rows],
           "version": __version__}
    return dump_json(doc) + "\n"


def _window_factor(policy: str) -> float:
    if policy == "default":
        return 1.0
    if policy == "double":
        return 2.0
    try:
        factor = float(policy)
    except ValueError as exc:
        raise ConfigError(f"bad window policy {policy!r}") from exc
    if not (math.isfinite(factor) and factor > 0):
        raise ConfigError(f"window factor must be positive, got {policy}")
    return factor


def cmd_converge(cfg: RunConfig) -> str:
    a = cfg.args
    n_list = a.n_list or list(DEFAULT_N_LIST)
    for n in n_list:
        _state(cfg, n)
    if len(n_list) < 3 or any(b <= x for x, b in zip(n_list, n_list[1:])):
        raise ConfigError("--n-list must be strictly increasing with at least 3 entries")
    report = convergence_study(cfg.system, n_list, cfg.params, cfg.branch,
                               _window_factor(a.window_policy), a.kernel, a.target)
    doc = report.to_dict()
    doc["units"]["mode"] = cfg.units.value
    if cfg.fmt == "csv":
        return write_csv(["n", "distance", "residual", "S"],
                         [[e["n"], e["distance"], e["residual"], e["S"]] for e in doc["entries"]])
    return dump_json(doc) + "\n"


COMMANDS = {
    "spectrum": cmd_spectrum,
    "density": cmd_density,
    "ft": cmd_ft,
    "converge": cmd_converge,
}


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rqmc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", required=True, choices=sorted(SYSTEM_ALIASES))
    common.add_argument("--branch", default="particle", choices=[b.value for b in Branch])
    common.add_argument("--units", default="natural", choices=[u.value for u in UnitMode])
    for name in ("m", "omega", "c", "hbar", "L"):
        common.add_argument(f"--{name}", type=float, default=None)
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--output", default=None, help="file to write (default: stdout)")

    p = sub.add_parser("spectrum", parents=[common], help="energy levels and derived parameters")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--n-list", type=_int_list, default=None)

    p = sub.add_parser("density", parents=[common], help="sampled probability density")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid-points", type=int, default=2001)
    p.add_argument("--x-min", type=float, default=None)
    p.add_argument("--x-max", type=float, default=None)

    p = sub.add_parser("ft", parents=[common], help="Fourier transforms side by side")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p-max", type=float, default=5.0)
    p.add_argument("--p-points", type=int, default=51)

    p = sub.add_parser("converge", parents=[common], help="correspondence convergence report")
    p.add_argument("--n-list", type=_int_list, default=None)
    p.add_argument("--window-policy", default="default",
                   help="'default', 'double', or a positive factor on the default window")
    p.add_argument("--kernel", default=Kernel.GAUSSIAN.value, choices=[k.value for k in Kernel])
    p.add_argument("--target", default=TargetMode.ASYMPTOTIC.value,
                   choices=[t.value for t in TargetMode])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on malformed arguments
    try:
        cfg = resolve(args)
        text = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"rqmc: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"rqmc: numerical failure: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        with open(cfg.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
