"""Symmetric planar families: trapezoids, rhombi, kites, equilibria and Γ=0."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.optimize import least_squares

from .errors import (BoundaryEvent, DegenerateParameterError, DomainError, GeometryError,
                     NoEquilibriumError, NonexistenceError, PlanarityError)
from .model import (CLASSIFY_TOL, PAIR_INDEX, PAIRS, RESIDUAL_TOL, DistanceVector, PlanarConfiguration,
                    SolutionRecord, Vorticities, embed_mp, make_record)
from .poly import Polynomial, as_rational, isolate_real_roots

log = logging.getLogger(__name__)

PLUS, MINUS = "Plus", "Minus"
AXIS12, AXIS34 = "Axis12", "Axis34"
LAMBDA_NEG, LAMBDA_POS = "LambdaNeg", "LambdaPos"

# closed-form distances are good to a few ulps, so symmetry tests can be tight
CLOSED_FORM_TOL = 1e-12


# isosceles trapezoid ---------------------------------------------------------

@dataclass(frozen=True)
class TrapezoidSolution:
    m: float
    x: float      # r34 / r12
    y: float      # r14 / r12
    diag: float   # r13 / r12
    alpha: float

    def distances(self) -> DistanceVector:
        d2, y2 = self.diag ** 2, self.y ** 2
        return DistanceVector((1.0, d2, y2, y2, d2, self.x ** 2))


def trapezoid_solution(m: float) -> TrapezoidSolution:
    if m <= 0:
        raise NonexistenceError("isosceles trapezoids exist only for m > 0")
    alpha = m * (m + 2) / (2 * m + 1)
    x = math.sqrt(alpha)
    return TrapezoidSolution(m, x, math.sqrt((m + 2 - x) / 2), math.sqrt((m + 2 + x) / 2), alpha)


def trapezoid(m: float) -> SolutionRecord:
    """Isosceles trapezoid with vortices 1, 2 on one base (r12 = 1)."""
    sol = trapezoid_solution(m)
    if sol.x <= 100 * CLASSIFY_TOL:
        raise BoundaryEvent("trapezoid collapses onto an equilateral triangle", m=m, nearest=0.0, name="m=0")
    s = sol.distances()
    # lambda' from (1/s12 + l)(1/s34 + l) = (1/s13 + l)^2
    a, d = s["s34"], s["s13"]
    lam_p = (1 / d ** 2 - 1 / a) / (1 + 1 / a - 2 / d)
    return make_record(Vorticities.pairs(m), s, lam_p, family="trapezoid", tol=CLOSED_FORM_TOL)


# rhombus -------------------------------------------------------------------

@dataclass(frozen=True)
class RhombusSolution:
    m: float
    branch: str
    x: float     # r34 / r12
    beta: float
    lam: float   # angular velocity with r12 = 1

    def distances(self) -> DistanceVector:
        side = (1 + self.x ** 2) / 4
        return DistanceVector((1.0, side, side, side, side, self.x ** 2))


def rhombus_solution(m: float, branch: str = PLUS) -> RhombusSolution:
    if branch not in (PLUS, MINUS):
        raise DomainError(f"unknown rhombus branch {branch!r}")
    if branch == PLUS and not -1 <= m <= 1:
        raise NonexistenceError("Plus rhombus requires m in [-1, 1]")
    if branch == MINUS and not -1 <= m < 0:
        raise NonexistenceError("Minus rhombus requires m in [-1, 0)")
    beta = 3 - 3 * m
    sg = 1 if branch == PLUS else -1
    x2 = 0.5 * (beta + sg * math.sqrt(beta * beta + 4 * m))
    num = 4 * (m * m + 4 * m + 1)
    den = 2 + 3 * m - 3 * m * m + sg * m * math.sqrt(9 * m * m - 14 * m + 9)
    if abs(num) <= 1e-13 and branch == MINUS:
        lam = 0.0
    elif abs(den) <= 1e-12:
        # 0/0 on the Plus branch at the equilibrium value: use L / 2I
        g = np.array([1, 1, m, m])
        L = 1 + 4 * m + m * m
        x = math.sqrt(x2)
        pos = np.array([[-0.5, 0], [0.5, 0], [0, x / 2], [0, -x / 2]])
        c = g @ pos / g.sum()
        lam = L / float(np.sum(g * np.sum((pos - c) ** 2, axis=1)))
    else:
        lam = num / den
    return RhombusSolution(m, branch, math.sqrt(x2), beta, lam)


def rhombus(m: float, branch: str = PLUS) -> SolutionRecord:
    """Rhombus with 1, 2 on one diagonal and 3, 4 on the other (r12 = 1)."""
    sol = rhombus_solution(m, branch)
    gam = Vorticities((1.0, 1.0, float(m), float(m)), float(m))
    s = sol.distances()
    if gam.is_gamma_zero:
        return make_record(gam, s, None, family=f"rhombus-{branch.lower()}")
    lam_p = -sol.lam / gam.total if sol.lam else 0.0
    return make_record(gam, s, lam_p, family=f"rhombus-{branch.lower()}", tol=CLOSED_FORM_TOL)


# kites with lambda' < 0 ------------------------------------------------------

@dataclass(frozen=True)
class KiteSolution:
    m: float
    axis: str
    regime: str
    distances: DistanceVector
    lambda_prime: float


KITE_DPS = 50
# positions come from a 50-digit solve; see asymmetric.SHAPE_TOL
KITE_SHAPE_TOL = 1e-12


def _mp_quadratic_roots(a, b, c) -> list:
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    r = mpmath.sqrt(disc)
    q = -(b + mpmath.sign(b) * r) / 2 if b != 0 else r / 2
    roots = [q / a] if q != 0 else [mpmath.mpf(0)]
    roots.append(c / q if q != 0 else -roots[0])
    return sorted(set(roots))


def t5_solutions_mp(m) -> list[tuple]:
    """Positive solutions of the kite system with 3, 4 on the axis and lambda' = -1, to KITE_DPS digits.

    ``m`` may be a Fraction so that the dual parameter 1/m stays exact.
    """
    mq = as_rational(m)
    with mpmath.workdps(KITE_DPS):
        mm = mpmath.mpf(mq.numerator) / mq.denominator
        a = 4 + 6 * mm + 2 * mm * mm
        if a == 0:
            return []
        out = []
        for s34 in _mp_quadratic_roots(a, -3 * (mm + 1) ** 2, mm * mm + 2 * mm):
            if s34 <= 0:
                continue
            s12 = (mm * mm + 2 * mm) * s34 + 1 - mm * mm
            for s14 in _mp_quadratic_roots(mpmath.mpf(2), (2 * mm + 2) * s34 - 4 - 2 * mm,
                                           (-2 - mm) * s34 + mm + 2):
                s13 = 2 + mm - (mm + 1) * s34 - s14
                vals = (s12, s13, s14, s13, s14, s34)
                if min(vals) > 0:
                    out.append(vals)
    return out


def t5_solutions(m: float) -> list[DistanceVector]:
    """Float view of :func:`t5_solutions_mp`."""
    return [DistanceVector(tuple(float(v) for v in sv)) for sv in t5_solutions_mp(m)]


_T1 = DistanceVector((1.5, 1.5, 0.5, 1.5, 0.5, 0.5))
_T2 = DistanceVector((1.5, 0.5, 1.5, 0.5, 1.5, 0.5))
_SWAP_PAIRS = (2, 3, 0, 1)
# the same relabeling acting on the pair tuple (s12, s13, s14, s23, s24, s34)
_SWAP_PAIRS_S = tuple(PAIR_INDEX[_SWAP_PAIRS[i], _SWAP_PAIRS[j]] for i, j in PAIRS)


def kite_lamneg(m: float, axis: str = AXIS34) -> list[SolutionRecord]:
    """Kites with lambda' = -1 and the given pair on the symmetry axis."""
    if axis not in (AXIS12, AXIS34):
        raise DomainError(f"unknown kite axis {axis!r}")
    if m == 0:
        raise DegenerateParameterError("kite systems degenerate at m = 0")
    in_range = (m == 1 or 0 < m < 1 or -0.5 < m < 0) if axis == AXIS34 else (m == 1 or -0.5 < m < 0)
    if not in_range:
        raise NonexistenceError(f"no {axis} kites with lambda' < 0 at m={m}")
    if m == 1:
        cands = [(s, None) for s in (_T1, _T2)]
    else:
        mp = t5_solutions_mp(m) if axis == AXIS34 else \
            [tuple(sv[p] for p in _SWAP_PAIRS_S) for sv in t5_solutions_mp(1 / as_rational(m))]
        cands = [(DistanceVector(tuple(float(v) for v in sv)), embed_mp(sv, KITE_DPS)) for sv in mp]
    gam = Vorticities.pairs(m)
    recs = []
    seen = []
    for s, pos in cands:
        if any(max(abs(a - b) for a, b in zip(s.s, t.s)) <= 1e-12 * max(s.s) for t in seen):
            continue
        seen.append(s)
        kw = {} if pos is None else {"positions": PlanarConfiguration(pos), "tol": KITE_SHAPE_TOL}
        try:
            rec = make_record(gam, s, -1.0, family=f"kite-{axis.lower()}", **kw)
        except (PlanarityError, GeometryError):
            continue
        if rec.passes(RESIDUAL_TOL):
            recs.append(rec)
    if not recs:
        raise NonexistenceError(f"no positive realizable {axis} kites at m={m}")
    return recs


def kite_solution(rec: SolutionRecord, axis: str, regime: str) -> KiteSolution:
    return KiteSolution(rec.m, axis, regime, rec.distances, rec.lambda_prime)


# kites with lambda' > 0 ------------------------------------------------------

def zeta_m(m) -> Polynomial:
    m = as_rational(m)
    return Polynomial([
        (m + 2) ** 3,
        -432 * m**5 - 336 * m**4 + 48 * m**3 - 80 * m**2 + 16 * m + 64,
        1728 * m**5 + 3136 * m**4 + 992 * m**3 - 384 * m**2 + 64 * m + 128,
        -256 * m * (9 * m**4 + 23 * m**3 + 17 * m**2 - m - 3),
        256 * m**2 * (m + 2) * (2 * m + 1) ** 2,
    ], nominal_degree=4)


def lampos_quadratic(m: float) -> tuple[float, float, float]:
    """Coefficients (a, b, c) of a lambda'^2 + b lambda' + c."""
    return (2 * m * m * (m + 1), (4 * m - 1) * (m + 1) ** 2, m * (m + 2) * (2 * m + 1))


def _lampos_lambda(s12: float, s13: float, s23: float) -> float:
    return (s13 * s23 - s12) / (s12 * (s13 + s23) - s13 * s23 * (s12 + 1))


def _polish_mp(poly: Polynomial, approx: list[float], dps: int) -> list:
    """Newton-polish simple real roots of ``poly`` to ``dps`` digits from float approximations."""
    with mpmath.workdps(dps + 10):
        cs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(poly.coefficients)]
        out = []
        for x in approx:
            x = mpmath.mpf(x)
            for _ in range(100):
                p, dp = mpmath.polyval(cs, x, derivative=True)
                step = p / dp
                x -= step
                if abs(step) <= mpmath.eps * abs(x):
                    break
            out.append(x)
    return out


def kite_lampos(m: float) -> list[SolutionRecord]:
    """Convex kites with lambda' > 0, vortices 1, 2 on the axis and r34 = 1."""
    zeta = zeta_m(m)
    # a repeated root pairs only with itself (a rhombus) or gives a concave kite; both are filtered below
    roots = isolate_real_roots(zeta, (0, None))
    zs = _polish_mp(zeta, [r.refined_value for r in roots if r.refined_value > 0], KITE_DPS)
    gam = Vorticities.pairs(m)
    a, b, c = lampos_quadratic(m)
    recs = []
    for z1, z2 in itertools.permutations(zs, 2):
        if abs(z1 - z2) <= 1e-6 * max(z1, z2):
            continue  # coincident roots: the kite has collapsed onto the rhombus at m*
        with mpmath.workdps(KITE_DPS):
            s12 = (mpmath.sqrt(z1) + mpmath.sqrt(z2)) ** 2
            s13, s23 = z1 + mpmath.mpf(0.25), z2 + mpmath.mpf(0.25)
            sv = (s12, s13, s13, s23, s23, mpmath.mpf(1))
            lam_p = float(_lampos_lambda(s12, s13, s23))
        if not lam_p > 0:
            continue
        quad = abs(a * lam_p**2 + b * lam_p + c) / max(1.0, abs(a) * lam_p**2 + abs(b) * lam_p + abs(c))
        if quad > 1e-10:
            continue
        s = DistanceVector(tuple(float(v) for v in sv))
        try:
            rec = make_record(gam, s, lam_p, family="kite-lampos",
                              positions=PlanarConfiguration(embed_mp(sv, KITE_DPS)), tol=KITE_SHAPE_TOL)
        except (PlanarityError, GeometryError):
            continue
        if rec.passes(RESIDUAL_TOL) and rec.shape == "Convex":
            recs.append(rec)
    if not recs:
        raise NonexistenceError(f"no convex kites with lambda' > 0 at m={m}")
    return recs


def lampos_boundary_root(m_star: float) -> float:
    """The double root of the kite quartic at the pitchfork value."""
    roots = isolate_real_roots(zeta_m(m_star), (0, None), merge_tol=1e-10)
    double = [r for r in roots if r.multiplicity > 1]
    if not double:
        raise DomainError("no double root at this parameter value")
    return double[0].refined_value


# equilibria ------------------------------------------------------------------

def equilibrium_positions(gammas: Vorticities, sign: int = 1) -> np.ndarray:
    g1, g2, g3, g4 = gammas.strengths
    d1, d2 = g2 + g3 + g4, g1 + g3 + g4
    if d1 == 0 or d2 == 0:
        raise DegenerateParameterError("a triple sum of strengths vanishes")
    r3 = math.sqrt(3.0)
    x1 = np.array([2 * g4 + g2, sign * r3 * g2]) / (2 * d1)
    x2 = np.array([2 * g4 + g1, -sign * r3 * g1]) / (2 * d2)
    return np.array([x1, x2, [1.0, 0.0], [0.0, 0.0]])


def equilibrium_family(gammas: Vorticities) -> list[SolutionRecord]:
    """Equilibria (lambda = 0) for strengths with L = 0; both mirror images."""
    scale = sum(g * g for g in gammas.strengths)
    if abs(gammas.L) > 1e-12 * scale:
        raise NoEquilibriumError(f"L = {gammas.L:.3e} is not zero")
    recs = []
    for sign in (1, -1):
        pos = equilibrium_positions(gammas, sign)
        s = DistanceVector.from_positions(pos)
        recs.append(make_record(gammas, s, 0.0, family="equilibrium",
                                positions=PlanarConfiguration(pos), flags=("equilibrium",)))
    return recs


# zero total circulation ------------------------------------------------------

TWO_PAIRS, THREE_EQUAL = "TwoPairs", "ThreeEqual"
GAMMA_ZERO_STRENGTHS = {TWO_PAIRS: (1.0, 1.0, -1.0, -1.0), THREE_EQUAL: (1.0, 1.0, 1.0, -3.0)}


def _gamma_zero_equations(u, g):
    s = np.concatenate([[1.0], np.exp(np.clip(u[:5], -40, 40))])
    s12, s13, s14, s23, s24, s34 = s
    S = np.zeros((4, 4))
    for (i, j), v in zip(PAIRS, s):
        S[i, j] = S[j, i] = v
    r = list(S @ g - u[5])
    r.append(s13 * s24 * (s12 + s34) - s12 * s34 * (s13 + s24))
    r.append(s14 * s23 * (s13 + s24) - s13 * s24 * (s14 + s23))
    B = np.ones((5, 5))
    B[0, 0] = 0
    B[1:, 1:] = S
    r.append(np.linalg.det(B))
    return r


def _canonical(s: DistanceVector, perms) -> tuple:
    best = None
    for p in perms:
        a = s.permuted(p).array
        key = tuple(np.round(a / a.max(), 8))
        if best is None or key < best[0]:
            best = (key, p)
    return best


def gamma_zero_family(case: str, *, starts: int = 60, seed: int = 0) -> list[SolutionRecord]:
    """Relative equilibria with zero total circulation, by multi-start Newton.

    Solutions are deduplicated under relabelings that preserve the strengths;
    each shape is returned once, in its lexicographically smallest labeling.
    """
    if case not in GAMMA_ZERO_STRENGTHS:
        raise DomainError(f"unknown case {case!r}")
    strengths = GAMMA_ZERO_STRENGTHS[case]
    gam = Vorticities(strengths, -1.0 if case == TWO_PAIRS else None)
    g = np.array(strengths)
    perms = gam.preserving_permutations()
    rng = np.random.default_rng(seed)
    found: dict[tuple, DistanceVector] = {}
    for _ in range(starts):
        u0 = np.concatenate([rng.normal(0.0, 1.2, 5), rng.normal(0.0, 2.0, 1)])
        sol = least_squares(_gamma_zero_equations, u0, args=(g,), xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=100)  # converging starts need well under 100
        if np.max(np.abs(sol.fun)) > 1e-11:
            continue
        s = np.concatenate([[1.0], np.exp(sol.x[:5])])
        if s.min() / s.max() < 1e-6:
            continue  # collision
        key, p = _canonical(DistanceVector(tuple(s)), perms)
        if key not in found:
            found[key] = DistanceVector(tuple(s)).permuted(p)
    recs = []
    for key in sorted(found):
        s = found[key]
        s = s.scaled(1.0 / s["s12"])
        try:
            rec = make_record(gam, s, None, family=f"gamma-zero-{case.lower()}")
        except (PlanarityError, GeometryError):
            continue
        if rec.shape in ("Collinear", "Degenerate"):
            continue
        if rec.passes(1e-10) and abs(rec.angular_velocity) > 1e-8:
            recs.append(rec)
    return recs
