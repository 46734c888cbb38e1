"""Complete solution counts per m and the bifurcation values that separate regimes."""
from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import asymmetric, collinear, families
from .errors import BoundaryEvent, DomainError, NonexistenceError
from .model import RESIDUAL_TOL, SolutionRecord, Vorticities
from .poly import Polynomial, isolate_real_roots

log = logging.getLogger(__name__)

BOUNDARY_RADIUS = 1e-6
DEDUPE_TOL = 1e-8


# bifurcation values -------------------------------------------------------------

M_STAR_CUBIC = Polynomial([5, 7, 3, 9])
COLLINEAR_QUINTIC = Polynomial([-25, -108, -162, -96, -16, 2])
COLLINEAR_QUADRATIC = Polynomial([25, 58, 25])
L_QUADRATIC = Polynomial([1, 4, 1])  # L = 1 + 4m + m^2 for strengths (1, 1, m, m)


def _roots_in(poly: Polynomial, lo, hi) -> list[float]:
    return [r.refined_value for r in isolate_real_roots(poly, (lo, hi))]


@dataclass(frozen=True)
class BifurcationSet:
    m_star: float
    m_eq: float
    m0: float
    m1: float
    m2: float
    fixed: tuple[float, ...] = (1.0, 0.0, -0.5)

    @property
    def values(self) -> dict[str, float]:
        return {"m=1": 1.0, "m=0": 0.0, "m=-1/2": -0.5, "m_star": self.m_star, "m_eq": self.m_eq,
                "m0": self.m0, "m1": self.m1, "m2": self.m2}

    def nearest(self, m: float) -> tuple[str, float]:
        name = min(self.values, key=lambda k: abs(self.values[k] - m))
        return name, self.values[name]


_BIFURCATIONS: BifurcationSet | None = None


def bifurcation_values() -> BifurcationSet:
    """Exact Sturm isolation on (-1, 1) followed by float refinement."""
    global _BIFURCATIONS
    if _BIFURCATIONS is None:
        (m_star,) = _roots_in(M_STAR_CUBIC, -1, 0)
        (m_eq,) = _roots_in(L_QUADRATIC, -1, 0)
        m0, m1 = sorted(_roots_in(COLLINEAR_QUINTIC, -1, 0))
        m2 = max(_roots_in(COLLINEAR_QUADRATIC, -1, 0))
        _BIFURCATIONS = BifurcationSet(m_star, m_eq, m0, m1, m2)
    return _BIFURCATIONS


# expected counts -------------------------------------------------------------------

TABLE = {
    "m=1": {"Convex/Square": 6, "Concave/EquilateralPlusCenter": 8, "Collinear/CollinearSymmetric": 12},
    "0<m<1": {"Convex/Rhombus": 2, "Convex/IsoscelesTrapezoid": 4, "Concave/Kite34": 8,
              "Concave/Asymmetric": 8, "Collinear/CollinearSymmetric": 4, "Collinear/CollinearAsymmetric": 8},
    "-1/2<m<0": {"Convex/Rhombus": 4, "Convex/Asymmetric": 8, "Convex/Kite34": 4, "Concave/Kite12": 4,
                 "Collinear/CollinearSymmetric": 2, "Collinear/CollinearAsymmetric": 4},
    "m*<m<-1/2": {"Convex/Rhombus": 4, "Convex/Asymmetric": 8, "Convex/Kite12": 4,
                  "Collinear/CollinearSymmetric": 2},
    "-1<m<=m* or m=-1/2": {"Convex/Rhombus": 4, "Convex/Asymmetric": 8, "Collinear/CollinearSymmetric": 2},
}


def regime(m: float) -> str:
    b = bifurcation_values()
    if not -1 < m <= 1:
        raise DomainError(f"m={m} is outside (-1, 1]")
    if m == 1:
        return "m=1"
    if m > 0:
        return "0<m<1"
    if -0.5 < m < 0:
        return "-1/2<m<0"
    if b.m_star < m < -0.5:
        return "m*<m<-1/2"
    if m == -0.5 or m <= b.m_star:
        return "-1<m<=m* or m=-1/2"
    raise DomainError(f"no regime for m={m}")


def expected_counts(m: float) -> dict[str, int]:
    return dict(TABLE[regime(m)])


@dataclass
class CensusRow:
    m: float
    counts: dict[str, int]
    expected: dict[str, int] | None
    records: list[SolutionRecord] = field(default_factory=list, repr=False)
    flags: tuple[str, ...] = ()

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def match(self) -> bool:
        return self.expected is not None and self.counts == self.expected

    def subtotal(self, shape: str) -> int:
        return sum(v for k, v in self.counts.items() if k.split("/")[0] == shape)


# gathering -------------------------------------------------------------------------

def _attempt(fn, *args) -> list[SolutionRecord]:
    try:
        out = fn(*args)
    except NonexistenceError:
        return []
    return [out] if isinstance(out, SolutionRecord) else list(out)


def family_records(m: float) -> list[SolutionRecord]:
    """Every record any solver emits at m, before permutation closure."""
    recs: list[SolutionRecord] = []
    if m > 0:
        recs += _attempt(families.trapezoid, m)
    recs += _attempt(families.rhombus, m, families.PLUS)
    if m < 0:
        recs += _attempt(families.rhombus, m, families.MINUS)
    if m != 0:
        recs += _attempt(families.kite_lamneg, m, families.AXIS34)
        recs += _attempt(families.kite_lamneg, m, families.AXIS12)
    b = bifurcation_values()
    if b.m_star < m < -0.5:
        recs += _attempt(families.kite_lampos, m)
    recs += asymmetric.solve_asymmetric(m, ranks=False).records
    recs += collinear.collinear_symmetric(m)
    recs += collinear.collinear_asymmetric(m)
    return recs


def class_key(rec: SolutionRecord) -> str:
    return f"{rec.shape_kind}/{rec.symmetry}"


def _orbit(rec: SolutionRecord, perms) -> list[np.ndarray]:
    out = []
    for p in perms:
        a = rec.distances.permuted(p).array
        out.append(a / a.sum())
    return out


def count_classes(records: list[SolutionRecord], gammas: Vorticities, tol: float = RESIDUAL_TOL):
    """Close under the strength-preserving relabelings, dedupe and weight by multiplicity."""
    perms = gammas.preserving_permutations()
    seen: list[np.ndarray] = []
    counts: Counter = Counter()
    kept = []
    for rec in records:
        if not rec.passes(tol):
            log.warning("m=%s: %s record rejected by the residual gate (%.3g)",
                        rec.m, rec.family, rec.residuals.max_abs)
            continue
        kept.append(rec)
        for v in _orbit(rec, perms):
            if any(np.max(np.abs(v - w)) <= DEDUPE_TOL for w in seen):
                continue
            seen.append(v)
            counts[class_key(rec)] += rec.label_multiplicity
    return dict(sorted(counts.items())), kept


def check_boundary(m: float) -> None:
    if m in (1.0, -0.5):
        return
    b = bifurcation_values()
    name, value = b.nearest(m)
    if abs(m - value) <= BOUNDARY_RADIUS:
        raise BoundaryEvent(f"m={m} is within {BOUNDARY_RADIUS} of {name}={value:.12g}",
                            m=m, nearest=value, name=name)


def full_census(m: float, *, tol: float = RESIDUAL_TOL) -> CensusRow:
    m = float(m)
    if not -1 < m <= 1:
        raise DomainError(f"m={m} is outside (-1, 1]")
    check_boundary(m)
    gammas = Vorticities.census(m)
    counts, kept = count_classes(family_records(m), gammas, tol)
    flags = ("degenerate-center",) if m == 1 else ()
    return CensusRow(m, counts, expected_counts(m), kept, flags)


@dataclass(frozen=True)
class CountEvent:
    m_left: float
    m_right: float
    total_left: int
    total_right: int
    matched: str | None
    value: float | None


def _row_or_none(m: float) -> CensusRow | None:
    try:
        return full_census(m)
    except BoundaryEvent as ev:
        log.info("skipping %s: %s", m, ev)
        return None


def sweep(m_grid, *, jobs: int = 1) -> tuple[list[CensusRow], list[CountEvent]]:
    """Rows at every non-boundary grid point and the places where the counts change.

    With ``jobs > 1`` rows are computed in worker processes; output order
    follows the grid either way.
    """
    grid = [float(m) for m in m_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_row_or_none, grid, chunksize=max(1, len(grid) // (4 * jobs))))
    else:
        results = [_row_or_none(m) for m in grid]
    rows = [r for r in results if r is not None]
    b = bifurcation_values().values
    events = []
    for a, c in zip(rows, rows[1:]):
        if a.counts == c.counts:
            continue
        lo, hi = sorted((a.m, c.m))
        inside = [(k, v) for k, v in b.items() if lo <= v <= hi]
        name, value = min(inside, key=lambda kv: abs(kv[1] - (lo + hi) / 2)) if inside else (None, None)
        events.append(CountEvent(a.m, c.m, a.total, c.total, name, value))
    return rows, events


def parse_grid(text: str) -> np.ndarray:
    """'a:b:n' to n evenly spaced values."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise DomainError(f"bad grid {text!r}; expected a:b:n") from exc
    if n < 2:
        raise DomainError("a grid needs at least two points")
    if not (-1 < min(a, b) and max(a, b) <= 1):
        raise DomainError("grid must lie in (-1, 1]")
    return np.linspace(a, b, n)
