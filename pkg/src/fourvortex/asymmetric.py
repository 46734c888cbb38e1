"""Strictly planar asymmetric relative equilibria from the saturated system f1..f9."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import BoundaryEvent, DegenerateParameterError, DomainError
from .model import DistanceVector, PlanarConfiguration, SolutionRecord, Vorticities, embed_mp, make_record
from .poly import (Polynomial, as_rational, count_roots, descartes_bound, isolate_real_roots,
                   mobius_transform)

log = logging.getLogger(__name__)

F_TOL = 1e-10
RANK_THRESHOLD = 1e-6
WORK_DPS = 50
# positions come from a 50-digit solve, so shape and symmetry can be decided far
# below the float noise floor of distance-only reconstruction
SHAPE_TOL = 1e-12


@dataclass(frozen=True)
class TaggedRoot:
    value: float
    tag: str
    interval: tuple[float, float]


@dataclass
class AsymmetricSolveReport:
    m: float
    records: list[SolutionRecord]
    p2_roots: list[TaggedRoot]
    jacobian_ranks: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return sum(r.label_multiplicity for r in self.records)


def p_polynomials(m) -> tuple[Polynomial, Polynomial]:
    """The two quartic factors in x; only the second has positive roots on (-1, 1)."""
    m = as_rational(m)
    if m == -1:
        raise DegenerateParameterError("both quartics collapse at m = -1")
    p1 = Polynomial([(2 * m + 1) ** 2, -2 * (10 * m * m + 11 * m + 3), 2 * (16 * m * m + 21 * m + 7),
                     -4 * (5 * m * m + 8 * m + 3), 4 * (m + 1) ** 2])
    p2 = Polynomial([(m + 2) ** 2, -2 * (3 * m * m + 11 * m + 10), 2 * (7 * m * m + 21 * m + 16),
                     -4 * (3 * m * m + 8 * m + 5), 4 * (m + 1) ** 2])
    return p1, p2


def p4_polynomial(m, s12) -> Polynomial:
    """Quartic in s13 linking the s12 branches to the two factors."""
    m, a = as_rational(m), as_rational(s12)
    return Polynomial([
        -3 * m * a + 2 * a * a - 2 * m - a - 1,
        2 * (7 * m * a - 4 * a * a + 6 * m + a + 3),
        -2 * (9 * m * a - 4 * a * a + 14 * m - a + 5),
        8 * (m * a + 3 * m - a + 1),
        -8 * m,
    ])


def decomposition_quartic(s34) -> Polynomial:
    """Quartic for s24 in the triangular system, parametrized by s34."""
    t = as_rational(s34)
    return Polynomial([t * t, -4 * t * t - 2 * t, 4 * t * t + 6 * t + 4, -8 * t - 4, 4])


def f_residuals(s, m) -> np.ndarray:
    """Raw values of f1..f9; accepts complex input for complex-step differentiation."""
    s12, s13, s14, s23, s24, s34 = (s.s if isinstance(s, DistanceVector) else s)
    return np.array([
        s13 + s14 + s23 + s24 - 2 * s34 - 1,
        s12 - s34 + 1,
        s34 * m + s34 - m - 2,
        2 * s24**2 - s14 * s34 - s23 * s34 - 4 * s24 * s34 + 2 * s34**2 + 2 * s23,
        2 * s23 * s24 - 2 * s23 - 2 * s24 + s34,
        2 * s14 * s24 - s34,
        2 * s23**2 + s14 * s34 - 3 * s23 * s34 + 2 * s24 - s34,
        2 * s14 * s23 - s14 * s34 - s23 * s34 + s34,
        2 * s14**2 - 3 * s14 * s34 + s23 * s34 - 2 * s14 - 2 * s23 - 2 * s24 + 3 * s34 + 2,
    ])


def _jacobian(s: DistanceVector, m: float) -> np.ndarray:
    x0 = np.array(list(s.s) + [m], dtype=complex)
    h = 1e-30
    J = np.empty((9, 7))
    for k in range(7):
        x = x0.copy()
        x[k] += 1j * h
        J[:, k] = f_residuals(x[:6], x[6]).imag / h
    return J


def jacobian_singular_values(s: DistanceVector, m: float, *, tol: float = F_TOL) -> np.ndarray:
    """Singular values of the row-normalized 9x7 Jacobian in (s, m)."""
    res = np.max(np.abs(f_residuals(s, m))) / max(1.0, max(s.s)) ** 2  # f is quadratic
    if res > tol:
        raise DomainError(f"point is off the variety (relative max |f| = {res:.3g})")
    J = _jacobian(s, m)
    norms = np.linalg.norm(J, axis=1)
    J = J[norms > 0] / norms[norms > 0, None]
    return np.linalg.svd(J, compute_uv=False)


def jacobian_rank(s: DistanceVector, m: float, *, tol: float = F_TOL) -> int:
    sv = jacobian_singular_values(s, m, tol=tol)
    return int(np.sum(sv > RANK_THRESHOLD * sv[0]))


# root certificates for p2 -------------------------------------------------------

def p2_intervals(m) -> list[tuple[str, Fraction, Fraction | None]]:
    """J-intervals for m >= 0, K-intervals for m < 0; None marks an infinite endpoint."""
    m = as_rational(m)
    h = Fraction(1, 2)
    if m >= 0:
        return [("J1", Fraction(0), h), ("J2", h, Fraction(1)), ("J3", Fraction(1), Fraction(3, 2)),
                ("J4", Fraction(3, 2), Fraction(5))]
    b = (m + 2) / (m + 1)
    return [("K1", Fraction(0), h), ("K2", h, Fraction(1)), ("K3", Fraction(1), b), ("K4", b, None)]


def p2_certificate(m) -> dict[str, int]:
    """Sturm count of distinct p2 roots in each closed interval."""
    _, p2 = p_polynomials(m)
    return {tag: count_roots(p2, a, b) for tag, a, b in p2_intervals(m)}


def p2_mobius_certificate(m) -> dict[str, int]:
    """Descartes bound of each Moebius image; 1 certifies exactly one root in the open interval."""
    _, p2 = p_polynomials(m)
    return {tag: descartes_bound(mobius_transform(p2, a, b)) for tag, a, b in p2_intervals(m)}


def _tag(x: float, intervals) -> TaggedRoot:
    for tag, a, b in intervals:
        hi = math.inf if b is None else float(b)
        if float(a) <= x <= hi:
            return TaggedRoot(x, tag, (float(a), hi))
    raise DomainError(f"root {x} outside every certified interval")


def tagged_p2_roots(m) -> list[TaggedRoot]:
    _, p2 = p_polynomials(m)
    ivs = p2_intervals(m)
    out = []
    for r in isolate_real_roots(p2, (0, None)):
        out.extend([_tag(r.refined_value, ivs)] * r.multiplicity)
    return out


# triangular solve ----------------------------------------------------------------

def triangular_solution(m, s24: float, roots: list[float] | None = None) -> DistanceVector:
    """Back-substitute one s24 root through the invertible linear system.

    s23 is itself a root of the same quartic; when ``roots`` is given, the
    quotient for s23 (ill-conditioned near m = 0, where it tends to 0/0) is
    snapped to the nearest root.
    """
    s34 = float((as_rational(m) + 2) / (as_rational(m) + 1))
    s12 = s34 - 1
    s23 = (2 * s24 - s34) / (2 * s24 - 2)
    if roots:
        s23 = min(roots, key=lambda r: abs(r - s23))
    s14 = (2 * s24**2 - 4 * s24 * s34 + 2 * s34**2 - (s34 - 2) * s23) / s34
    s13 = 2 * s34 + 1 - s14 - s23 - s24
    return DistanceVector((s12, s13, s14, s23, s24, s34))


def _triangular_all(m: float) -> list[DistanceVector]:
    return [DistanceVector(tuple(float(v) for v in sv)) for sv in _triangular_mp(m)]


def _triangular_mp(m: float) -> list[tuple]:
    """All four solutions in extended precision; s23 taken from the root list."""
    q = decomposition_quartic((as_rational(m) + 2) / (as_rational(m) + 1))
    with mpmath.workdps(WORK_DPS):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in q.descending()]
        roots = sorted(mpmath.re(r) for r in mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * WORK_DPS))
        t34 = (as_rational(m) + 2) / (as_rational(m) + 1)
        s34 = mpmath.mpf(t34.numerator) / t34.denominator
        out = []
        for s24 in roots:
            est = (2 * s24 - s34) / (2 * s24 - 2) if s24 != 1 else mpmath.inf
            s23 = min(roots, key=lambda r: abs(r - est))
            s14 = (2 * s24**2 - 4 * s24 * s34 + 2 * s34**2 - (s34 - 2) * s23) / s34
            s13 = 2 * s34 + 1 - s14 - s23 - s24
            out.append((s34 - 1, s13, s14, s23, s24, s34))
    return out


def _zero_solutions() -> list[DistanceVector]:
    out = []
    root5 = math.sqrt(5.0)
    for v in ((3 - root5) / 2, (3 + root5) / 2):
        out.append(DistanceVector((1.0, 3.0 - v, 1.0, v, 1.0, 2.0)))
        out.append(DistanceVector((1.0, 1.0, 3.0 - v, 1.0, v, 2.0)))
    return out


_ONE_SOLUTIONS = (DistanceVector((0.5, 0.5, 0.5, 1.5, 1.5, 1.5)),
                  DistanceVector((0.5, 1.5, 1.5, 0.5, 0.5, 1.5)))


def _lambda_prime(s: DistanceVector, gam: Vorticities) -> float:
    g = gam.array
    w = sum(g[i] * g[j] * s[(i, j)] for i in range(4) for j in range(i + 1, 4))
    return -gam.L / w


def _records(svecs, m: float, flags=(), positions=None) -> list[SolutionRecord]:
    gam = Vorticities.pairs(m)
    out = []
    for k, s in enumerate(svecs):
        kw = {} if positions is None else {"positions": PlanarConfiguration(positions[k]), "tol": SHAPE_TOL}
        out.append(make_record(gam, s, _lambda_prime(s, gam), family="asymmetric", flags=flags, **kw))
    return out


def solve_asymmetric(m: float, *, ranks: bool = True) -> AsymmetricSolveReport:
    if not -1 < m <= 1:
        raise DomainError(f"m={m} is outside (-1, 1]")
    if m == 1:
        recs = _records(_ONE_SOLUTIONS, m, flags=("symmetric",))
        return AsymmetricSolveReport(m, recs, tagged_p2_roots(m),
                                     [jacobian_rank(r.distances, m) for r in recs] if ranks else [])
    if m == 0:
        recs = _records(_zero_solutions(), 0.0, flags=("boundary",))
        raise BoundaryEvent("p2 has a double root at m = 0", m=0.0, nearest=0.0, name="m=0", records=recs)
    mp = _triangular_mp(m)
    recs = _records([DistanceVector(tuple(float(v) for v in sv)) for sv in mp], m,
                    positions=[embed_mp(sv, WORK_DPS) for sv in mp])
    for r in recs:
        if r.symmetry != "Asymmetric":
            log.warning("m=%s: asymmetric record classified as %s", m, r.symmetry)
    report = AsymmetricSolveReport(m, recs, tagged_p2_roots(m))
    if ranks:
        report.jacobian_ranks = [jacobian_rank(r.distances, m) for r in recs]
    return report


def branch_trace(m_grid) -> np.ndarray:
    """Array of shape (len(m_grid), 4): s23 on each branch, sorted ascending at every m."""
    out = np.empty((len(m_grid), 4))
    for k, m in enumerate(m_grid):
        if not -1 < m < 1:
            raise DomainError(f"m={m} is outside (-1, 1)")
        if m == 0:
            svecs = _zero_solutions()
        else:
            svecs = _triangular_all(m)
        out[k] = sorted(s["s23"] for s in svecs)
    return out


def p4_residual(rec: SolutionRecord) -> float:
    """Relative value of the s13 quartic at a record's (s12, s13)."""
    s = rec.distances
    p = p4_polynomial(rec.m, s["s12"]).to_numeric()
    return abs(p(s["s13"])) / p.abs_scale(s["s13"])
