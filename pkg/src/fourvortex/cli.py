"""Command-line entry point: solve, verify, census, trace and render."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import asymmetric, census, collinear, dynamics, export, families
from .errors import (AmbiguityError, BoundaryEvent, CollisionError, DegenerateParameterError, DomainError,
                     FourVortexError, NoEquilibriumError, NonexistenceError)
from .model import CLASSIFY_TOL, RESIDUAL_TOL, SolutionRecord, Vorticities, classify_configuration, verify_record

log = logging.getLogger("fourvortex")

COMMANDS = ("solve", "verify", "census", "trace", "render")
FAMILIES = ("all", "trapezoid", "rhombus", "kite", "kite-lampos", "asymmetric", "collinear", "equilibrium")
TRACE_FAMILIES = ("asymmetric", "trapezoid", "rhombus")
DYNAMICS_TOL = 1e-6
DEFAULT_TRACE_GRID = "-0.99:0.99:199"


@dataclass(frozen=True)
class Tolerances:
    residual: float = RESIDUAL_TOL
    classification: float = CLASSIFY_TOL
    integrator: float = dynamics.DEFAULT_TOL
    dynamics: float = DYNAMICS_TOL

    def __post_init__(self):
        for name in ("residual", "classification", "integrator", "dynamics"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} tolerance must be positive, got {v}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    m: float | None = None
    grid: str | None = None
    family: str = "all"
    tolerances: Tolerances = field(default_factory=Tolerances)
    input_path: str | None = None
    output_path: str | None = None
    format: str | None = None
    jobs: int = 1
    trajectory_dir: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.m is not None and not -1 < self.m <= 1:
            raise DomainError(f"m={self.m} is outside (-1, 1]")
        if self.grid is not None:
            census.parse_grid(self.grid)
        if self.jobs < 1:
            raise DomainError("jobs must be at least 1")

    @property
    def output_format(self) -> str:
        if self.format:
            return self.format
        return {"solve": "json", "verify": "text", "census": "csv", "trace": "csv", "render": "svg"}[self.command]


def parse_m(text: str) -> float:
    """A float, or an exact fraction such as 2/5."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


# solve --------------------------------------------------------------------------

def _collect(fn, *args) -> list[SolutionRecord]:
    try:
        out = fn(*args)
    except NonexistenceError as exc:
        log.info("%s", exc)
        return []
    return [out] if isinstance(out, SolutionRecord) else list(out)


def _asymmetric(m: float) -> list[SolutionRecord]:
    try:
        return asymmetric.solve_asymmetric(m).records
    except BoundaryEvent as ev:
        log.warning("%s; emitting the boundary records", ev)
        return ev.records


def _collinear(m: float) -> list[SolutionRecord]:
    recs = collinear.collinear_symmetric(m)
    try:
        recs += collinear.collinear_asymmetric(m)
    except DegenerateParameterError as exc:
        log.warning("%s", exc)
    return recs


def _equilibrium(m: float) -> list[SolutionRecord]:
    try:
        return families.equilibrium_family(Vorticities.census(m))
    except NoEquilibriumError as exc:
        raise NonexistenceError(str(exc)) from exc


def solve_family(m: float, family: str = "all") -> list[SolutionRecord]:
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if not -1 < m <= 1:
        raise DomainError(f"m={m} is outside (-1, 1]")
    table = {
        "trapezoid": lambda: _collect(families.trapezoid, m),
        "rhombus": lambda: _collect(families.rhombus, m, families.PLUS)
        + (_collect(families.rhombus, m, families.MINUS) if m < 0 else []),
        "kite": lambda: [] if m == 0 else _collect(families.kite_lamneg, m, families.AXIS34)
        + _collect(families.kite_lamneg, m, families.AXIS12),
        "kite-lampos": lambda: _collect(families.kite_lampos, m),
        "asymmetric": lambda: _asymmetric(m),
        "collinear": lambda: _collinear(m),
        "equilibrium": lambda: _collect(_equilibrium, m),
    }
    if family == "all":
        return [r for name in FAMILIES[1:] if name != "equilibrium" for r in table[name]()]
    recs = table[family]()
    if not recs:
        raise NonexistenceError(f"no {family} solutions at m={m}")
    return recs


# verify -------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    index: int
    family: str
    residual: float
    dynamics_error: float | None
    horizon: float
    full_horizon: float
    growth_rate: float
    classification: str
    ok: bool


def verification_horizon(rec: SolutionRecord, tol: Tolerances) -> tuple[float, float, float]:
    """(horizon, full horizon, growth rate) for the rigid-rotation check.

    The full horizon is one period, or 10 time units for an equilibrium. It
    is shortened when linear instability would amplify integrator error
    by more than the square root of dynamics/integrator tolerance.
    """
    lam = rec.angular_velocity
    full = 10.0 if lam == 0 else dynamics.rotation_period(lam)
    rate = dynamics.rotating_frame_growth_rate(rec)
    budget = 0.5 * math.log(tol.dynamics / tol.integrator)
    if rate > 0 and budget > 0:
        return min(full, budget / rate), full, rate
    return full, full, rate


def verify_one(k: int, rec: SolutionRecord, tol: Tolerances, trajectory_dir: Path | None = None) -> Verdict:
    rep = verify_record(rec)
    residual = rep.max_abs
    try:
        cls = classify_configuration(rec.positions, rec.distances, tol.classification, gammas=rec.gammas,
                                     lambda_prime=None if rec.gammas.is_gamma_zero else rec.lambda_prime)
        same = cls.shape == rec.shape and cls.symmetry == rec.symmetry
        classification = "agrees" if same else f"differs ({cls.shape}/{cls.symmetry})"
    except AmbiguityError as exc:
        same, classification = True, f"ambiguous at {tol.classification:g}: {'/'.join(exc.candidates)}"
    except FourVortexError as exc:
        same, classification = False, f"failed: {exc}"
    T, full, rate = verification_horizon(rec, tol)
    err = None
    try:
        err = dynamics.rigid_rotation_error(rec, T, tol=tol.integrator, abort_above=100 * tol.dynamics)
        if trajectory_dir is not None:
            traj = dynamics.integrate_flow(rec.positions, rec.gammas, T, tol.integrator)
            (trajectory_dir / f"record_{k:03d}.csv").write_text(export.trajectory_csv(traj))
    except CollisionError as exc:
        log.warning("record %d: %s", k, exc)
    ok = residual <= tol.residual and err is not None and err <= tol.dynamics and same
    return Verdict(k, rec.family, residual, err, T, full, rate, classification, ok)


def verdict_line(v: Verdict) -> str:
    dyn = "collision" if v.dynamics_error is None else f"{v.dynamics_error:.3e}"
    return (f"[{'PASS' if v.ok else 'FAIL'}] record {v.index} {v.family}: residual {v.residual:.3e}, "
            f"rotation error {dyn} over T={v.horizon:.6g} (full {v.full_horizon:.6g}, "
            f"growth rate {v.growth_rate:.3g}), class {v.classification}")


# trace --------------------------------------------------------------------------

def trace_columns(family: str, grid: np.ndarray) -> dict[str, np.ndarray]:
    if family == "asymmetric":
        inner = [m for m in grid if m < 1]
        if len(inner) != len(grid):
            raise DomainError("the asymmetric trace needs m < 1")
        s23 = asymmetric.branch_trace(grid)
        return {f"s23_branch{k + 1}": s23[:, k] for k in range(4)}
    if family == "trapezoid":
        cols = {n: np.full(len(grid), np.nan) for n in ("x", "y", "diag", "lambda_prime")}
        for k, m in enumerate(grid):
            if m > 0:
                sol = families.trapezoid_solution(m)
                rec = families.trapezoid(m)
                cols["x"][k], cols["y"][k], cols["diag"][k] = sol.x, sol.y, sol.diag
                cols["lambda_prime"][k] = rec.lambda_prime
        return cols
    if family == "rhombus":
        cols = {n: np.full(len(grid), np.nan) for n in ("x_plus", "lambda_plus", "x_minus", "lambda_minus")}
        for k, m in enumerate(grid):
            p = families.rhombus_solution(m, families.PLUS)
            cols["x_plus"][k], cols["lambda_plus"][k] = p.x, p.lam
            if m < 0:
                q = families.rhombus_solution(m, families.MINUS)
                cols["x_minus"][k], cols["lambda_minus"][k] = q.x, q.lam
        return cols
    raise DomainError(f"unknown trace family {family!r}; choose from {', '.join(TRACE_FAMILIES)}")


# run ----------------------------------------------------------------------------

def _emit(text: str, path: str | None, stdout) -> None:
    if path is None:
        stdout.write(text)
    else:
        Path(path).write_text(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror or exc}") from exc


def run(config: RunConfig, stdout=None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    cmd, tol = config.command, config.tolerances
    if cmd == "solve":
        if config.m is None:
            raise DomainError("solve needs --m")
        recs = solve_family(config.m, config.family)
        bad = [r for r in recs if not r.passes(tol.residual)]
        for r in bad:
            log.warning("%s record at m=%s exceeds the residual tolerance (%.3g)", r.family, r.m, r.residuals.max_abs)
        _emit(export.records_to_json(recs, {"m": config.m, "family": config.family}), config.output_path, stdout)
        return 1 if bad else 0

    if cmd == "verify":
        if config.input_path is None:
            raise DomainError("verify needs --in")
        recs = export.records_from_json(_read(config.input_path))
        if not recs:
            raise DomainError("no records to verify")
        tdir = None
        if config.trajectory_dir:
            tdir = Path(config.trajectory_dir)
            tdir.mkdir(parents=True, exist_ok=True)
        verdicts = [verify_one(k, r, tol, tdir) for k, r in enumerate(recs)]
        lines = [verdict_line(v) for v in verdicts]
        failed = sum(not v.ok for v in verdicts)
        lines.append(f"{len(verdicts) - failed}/{len(verdicts)} records verified")
        _emit("\n".join(lines) + "\n", config.output_path, stdout)
        return 1 if failed else 0

    if cmd == "census":
        if (config.m is None) == (config.grid is None):
            raise DomainError("census needs exactly one of --m or --grid")
        if config.m is not None:
            rows = [census.full_census(config.m, tol=tol.residual)]
        else:
            rows, events = census.sweep(census.parse_grid(config.grid), jobs=config.jobs)
            for e in events:
                log.info("count %d -> %d between m=%.6g and m=%.6g (%s)", e.total_left, e.total_right,
                         e.m_left, e.m_right, e.matched)
        if config.output_format == "json":
            out = export._dump([{"m": r.m, "counts": r.counts, "total": r.total,
                                 "expected": r.expected, "match": r.match, "flags": list(r.flags)}
                                for r in rows]) + "\n"
        else:
            out = export.census_csv(rows)
        _emit(out, config.output_path, stdout)
        return 0 if all(r.match for r in rows) else 1

    if cmd == "trace":
        grid = census.parse_grid(config.grid or DEFAULT_TRACE_GRID)
        family = "asymmetric" if config.family == "all" else config.family
        _emit(export.trace_csv(grid, trace_columns(family, grid)), config.output_path, stdout)
        return 0

    if config.input_path is None:
        raise DomainError("render needs --in")
    recs = export.records_from_json(_read(config.input_path))
    _emit(export.render_svg(recs), config.output_path, stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fourvortex",
                                description="Relative equilibria of four vortices with strengths (1, 1, m, m).")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def tolerances(sp):
        sp.add_argument("--residual-tol", type=float, default=RESIDUAL_TOL)
        sp.add_argument("--classify-tol", type=float, default=CLASSIFY_TOL)
        sp.add_argument("--integrator-tol", type=float, default=dynamics.DEFAULT_TOL)
        sp.add_argument("--dynamics-tol", type=float, default=DYNAMICS_TOL)
        sp.add_argument("--out", help="output file (default: stdout)")

    s = sub.add_parser("solve", help="emit solution records as JSON")
    s.add_argument("--m", type=parse_m, required=True)
    s.add_argument("--family", default="all", choices=FAMILIES)
    tolerances(s)

    v = sub.add_parser("verify", help="recheck stored records: residuals, class and direct integration")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--trajectories", help="directory for per-record trajectory CSV files")
    tolerances(v)

    c = sub.add_parser("census", help="solution counts per class as CSV")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--m", type=parse_m)
    g.add_argument("--grid", help="a:b:n evenly spaced values")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--jobs", type=int, default=1)
    tolerances(c)

    t = sub.add_parser("trace", help="branch values along a grid as CSV")
    t.add_argument("--family", default="asymmetric", choices=TRACE_FAMILIES)
    t.add_argument("--grid", default=DEFAULT_TRACE_GRID)
    tolerances(t)

    r = sub.add_parser("render", help="SVG panels for stored records")
    r.add_argument("--in", dest="input", required=True)
    tolerances(r)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    tol = Tolerances(ns.residual_tol, ns.classify_tol, ns.integrator_tol, ns.dynamics_tol)
    return RunConfig(command=ns.command, m=getattr(ns, "m", None), grid=getattr(ns, "grid", None),
                     family=getattr(ns, "family", "all"), tolerances=tol, input_path=getattr(ns, "input", None),
                     output_path=ns.out, format=getattr(ns, "format", None), jobs=getattr(ns, "jobs", 1),
                     trajectory_dir=getattr(ns, "trajectories", None))


def _attach_values(argv: list[str]) -> list[str]:
    """Join '--grid -0.5:0.5:3' into '--grid=-0.5:0.5:3' so argparse does not read it as an option."""
    out, k = [], 0
    while k < len(argv):
        if argv[k] in ("--m", "--grid") and k + 1 < len(argv):
            out.append(f"{argv[k]}={argv[k + 1]}")
            k += 2
        else:
            out.append(argv[k])
            k += 1
    return out


def main(argv=None) -> int:
    ns = build_parser().parse_args(_attach_values(sys.argv[1:] if argv is None else list(argv)))
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return run(config_from_args(ns))
    except FourVortexError as exc:
        print(f"fourvortex: error: {exc}", file=sys.stderr)
        return 2
