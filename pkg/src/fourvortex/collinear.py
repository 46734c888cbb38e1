"""Collinear relative equilibria in the gauge x3 = -1, x4 = 1."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, DomainError
from .model import RESIDUAL_TOL, DistanceVector, PlanarConfiguration, SolutionRecord, Vorticities, make_record
from .poly import Polynomial, as_rational, isolate_real_roots

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CollinearSolution:
    x1: float
    x2: float
    lam: float
    c: float
    ordering: tuple[int, ...]  # vortex labels from left to right
    symmetric: bool

    def positions(self) -> np.ndarray:
        return np.array([[self.x1, 0.0], [self.x2, 0.0], [-1.0, 0.0], [1.0, 0.0]])


def zeta_quartic(m) -> Polynomial:
    """Quartic in w = x2^2 shared by both free vortices; degree drops at m in {0, -1/2, -2}."""
    m = as_rational(m)
    return Polynomial([
        (m + 2) ** 3,
        -4 * (5 * m + 4) * (25 * m**4 + 127 * m**3 + 231 * m**2 + 175 * m + 45),
        300 * m**5 + 1508 * m**4 + 2910 * m**3 + 2696 * m**2 + 1188 * m + 200,
        -4 * m * (15 * m**4 + 61 * m**3 + 91 * m**2 + 61 * m + 15),
        m**2 * (m + 2) * (1 + 2 * m) ** 2,
    ], nominal_degree=4)


def _forces(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.array([sum(g[j] / (x[j] - x[i]) for j in range(4) if j != i) for i in range(4)])


def solve_lambda_c(x1: float, x2: float, m: float):
    """lambda and c from the equations of vortices 3 and 4, plus relative residuals of 1 and 2."""
    x = np.array([x1, x2, -1.0, 1.0])
    g = np.array([1.0, 1.0, m, m])
    F = _forces(x, g)
    lam = (F[2] - F[3]) / 2
    c = (F[2] + F[3]) / (F[2] - F[3])
    res = []
    for i in (0, 1):
        scale = abs(lam * (x[i] - c)) + sum(abs(g[j] / (x[j] - x[i])) for j in range(4) if j != i)
        res.append(abs(-lam * (x[i] - c) - F[i]) / scale)
    return lam, c, res


def _solution(x1, x2, m, symmetric) -> CollinearSolution:
    lam, c, _ = solve_lambda_c(x1, x2, m)
    order = tuple(int(i) + 1 for i in np.argsort([x1, x2, -1.0, 1.0]))
    return CollinearSolution(x1, x2, lam, c, order, symmetric)


def _record(sol: CollinearSolution, m: float, family: str) -> SolutionRecord:
    gam = Vorticities.pairs(m)
    pos = sol.positions()
    s = DistanceVector.from_positions(pos)
    return make_record(gam, s, -sol.lam / gam.total, family=family, positions=PlanarConfiguration(pos))


def symmetric_abscissae(m: float) -> list[float]:
    """|x1| for the inner family, and the outer family when m > 0."""
    D = math.sqrt(25 * m * m + 46 * m + 25)
    out = [math.sqrt(2.0 / (5 * m + 5 + D))]
    if m > 0:
        out.append(math.sqrt((5 * m + 5 + D) / (2 * m)))
    return out


def collinear_symmetric(m: float) -> list[SolutionRecord]:
    """x1 = -x2 solutions, both sign choices of x1."""
    if not -1 < m <= 1:
        raise DomainError(f"m={m} is outside (-1, 1]")
    recs = []
    for a in symmetric_abscissae(m):
        for sg in (1, -1):
            recs.append(_record(_solution(sg * a, -sg * a, m, True), m, "collinear-symmetric"))
    return recs


def collinear_asymmetric(m: float, *, tol: float = RESIDUAL_TOL) -> list[SolutionRecord]:
    """Pairs of distinct positive roots of the w-quartic that pass the residual filter."""
    if not -1 < m <= 1:
        raise DomainError(f"m={m} is outside (-1, 1]")
    if m == 0:
        raise DegenerateParameterError("the w-quartic degenerates at m = 0")
    roots = isolate_real_roots(zeta_quartic(m), (0, None), merge_tol=1e-12)
    simple = [r.refined_value for r in roots if r.multiplicity == 1 and r.refined_value > 0]
    if len(simple) != len(roots):
        log.info("m=%s: repeated root of the w-quartic excluded from pairing", m)
    recs = []
    for wa, wb in itertools.permutations(simple, 2):
        for s1, s2 in itertools.product((1, -1), repeat=2):
            x1, x2 = s1 * math.sqrt(wa), s2 * math.sqrt(wb)
            _, _, res = solve_lambda_c(x1, x2, m)
            if max(res) <= tol:
                recs.append(_record(_solution(x1, x2, m, False), m, "collinear-asymmetric"))
    return recs


def strength_sign_pattern(rec: SolutionRecord) -> str:
    """Signs of the strengths read along the line from left to right."""
    x = rec.positions.positions[:, 0]
    g = np.array(rec.strengths)[np.argsort(x)]
    return "".join("+" if v > 0 else "-" for v in g)
