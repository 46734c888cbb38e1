"""Vorticities, configurations, mutual distances and the residual systems.

Squared mutual distances are always ordered (s12, s13, s14, s23, s24, s34);
vortex indices are 0-based in code and 1-based in names.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Sequence

import mpmath
import numpy as np

from .errors import (AmbiguityError, CollisionError, DomainError, GeometryError,
                     PlanarityError)

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_NAMES = ("s12", "s13", "s14", "s23", "s24", "s34")
PAIR_INDEX = {p: k for k, p in enumerate(PAIRS)} | {(j, i): k for k, (i, j) in enumerate(PAIRS)}

RESIDUAL_TOL = 1e-9
CLASSIFY_TOL = 1e-7
PLANARITY_TOL = 1e-8

SHAPES = ("Collinear", "Convex", "Concave", "Degenerate")
SYMMETRIES = ("Square", "Rhombus", "IsoscelesTrapezoid", "Kite12", "Kite34", "CollinearSymmetric",
              "CollinearAsymmetric", "Asymmetric", "EquilateralPlusCenter", "Equilibrium")

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class Vorticities:
    strengths: tuple[float, float, float, float]
    m: float | None = None

    def __post_init__(self):
        if len(self.strengths) != 4:
            raise DomainError("four strengths are required")
        if self.m is None and any(g == 0 for g in self.strengths):
            raise DomainError("vortex strengths must be nonzero")

    @classmethod
    def census(cls, m: float) -> "Vorticities":
        m = float(m)
        if not -1.0 < m <= 1.0:
            raise DomainError(f"m={m} is outside (-1, 1]")
        return cls((1.0, 1.0, m, m), m)

    @classmethod
    def pairs(cls, m: float) -> "Vorticities":
        """(1, 1, m, m) without the census range restriction."""
        return cls((1.0, 1.0, float(m), float(m)), float(m))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.strengths, dtype=float)

    @property
    def total(self) -> float:
        return float(sum(self.strengths))

    @property
    def L(self) -> float:
        g = self.strengths
        return float(sum(g[i] * g[j] for i, j in PAIRS))

    @property
    def is_gamma_zero(self) -> bool:
        return abs(self.total) <= 1e-14 * sum(abs(g) for g in self.strengths)

    def permuted(self, perm: Sequence[int]) -> "Vorticities":
        return Vorticities(tuple(self.strengths[p] for p in perm), self.m)

    def preserving_permutations(self) -> list[tuple[int, ...]]:
        return [p for p in itertools.permutations(range(4))
                if all(self.strengths[p[i]] == self.strengths[i] for i in range(4))]


@dataclass(frozen=True)
class DistanceVector:
    s: tuple[float, ...]

    def __post_init__(self):
        s = tuple(float(v) for v in self.s)
        if len(s) != 6:
            raise DomainError("six squared distances are required")
        if not all(math.isfinite(v) and v > 0 for v in s):
            raise DomainError(f"squared distances must be positive: {s}")
        object.__setattr__(self, "s", s)

    def __getitem__(self, key) -> float:
        if isinstance(key, str):
            return self.s[PAIR_NAMES.index(key)]
        if isinstance(key, tuple):
            return self.s[PAIR_INDEX[key]]
        return self.s[key]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.s)

    def matrix(self) -> np.ndarray:
        M = np.zeros((4, 4))
        for (i, j), v in zip(PAIRS, self.s):
            M[i, j] = M[j, i] = v
        return M

    def scaled(self, k: float) -> "DistanceVector":
        return DistanceVector(tuple(k * v for v in self.s))

    def permuted(self, perm: Sequence[int]) -> "DistanceVector":
        """Relabel so that new vortex i is old vortex perm[i]."""
        M = self.matrix()
        return DistanceVector(tuple(M[perm[i], perm[j]] for i, j in PAIRS))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(PAIR_NAMES, self.s))

    @classmethod
    def from_positions(cls, positions) -> "DistanceVector":
        x = np.asarray(positions, dtype=float)
        return cls(tuple(float(np.sum((x[i] - x[j]) ** 2)) for i, j in PAIRS))


@dataclass(frozen=True, eq=False)
class PlanarConfiguration:
    positions: np.ndarray
    center: np.ndarray | None = None
    angular_velocity: float | None = None

    def __post_init__(self):
        x = np.array(self.positions, dtype=float).reshape(4, 2)
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)
        if self.center is not None:
            c = np.array(self.center, dtype=float).reshape(2)
            c.setflags(write=False)
            object.__setattr__(self, "center", c)

    def distances(self) -> DistanceVector:
        return DistanceVector.from_positions(self.positions)


@dataclass(frozen=True)
class DziobekScalars:
    lambda_prime: float | None
    sigma: float | None
    areas: tuple[float, float, float, float]


@dataclass(frozen=True)
class ResidualReport:
    ac_f: tuple = ()
    ac_g: tuple = ()
    dziobek: tuple = ()
    ccfactor: tuple = ()
    cayley_menger: tuple = ()
    eqcc: tuple = ()
    gamma_zero: tuple = ()

    GROUPS = ("ac_f", "ac_g", "dziobek", "ccfactor", "cayley_menger", "eqcc", "gamma_zero")

    @property
    def max_abs(self) -> float:
        vals = [abs(v) for g in self.GROUPS for v in getattr(self, g)]
        return max(vals) if vals else 0.0

    def worst_group(self) -> str | None:
        best, name = -1.0, None
        for g in self.GROUPS:
            vals = getattr(self, g)
            if vals and max(map(abs, vals)) > best:
                best, name = max(map(abs, vals)), g
        return name

    def merged(self, other: "ResidualReport") -> "ResidualReport":
        return ResidualReport(**{g: getattr(self, g) or getattr(other, g) for g in self.GROUPS})


@dataclass(frozen=True, eq=False)
class SolutionRecord:
    m: float | None
    distances: DistanceVector
    positions: PlanarConfiguration
    scalars: DziobekScalars
    shape: str
    symmetry: str
    residuals: ResidualReport
    label_multiplicity: int
    strengths: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    family: str = ""
    flags: tuple[str, ...] = ()
    audit: tuple[str, ...] = ()

    @property
    def gammas(self) -> Vorticities:
        return Vorticities(tuple(self.strengths), self.m)

    @property
    def lambda_prime(self) -> float | None:
        return self.scalars.lambda_prime

    @property
    def angular_velocity(self) -> float:
        return self.positions.angular_velocity

    @property
    def shape_kind(self) -> str:
        return self.shape.split("(")[0]

    def passes(self, tol: float = RESIDUAL_TOL) -> bool:
        return self.residuals.max_abs <= tol


# invariants -----------------------------------------------------------------

@dataclass(frozen=True)
class Invariants:
    H: float
    I: float
    L: float
    Gamma: float
    c: np.ndarray | None
    M: np.ndarray
    lam: float | None


def _check_distinct(x: np.ndarray, tol: float = 0.0):
    for i, j in PAIRS:
        if np.sum((x[i] - x[j]) ** 2) <= tol:
            raise CollisionError(f"vortices {i + 1} and {j + 1} coincide")


def vortex_invariants(config: PlanarConfiguration, gammas: Vorticities) -> Invariants:
    x = config.positions
    _check_distinct(x)
    g = gammas.array
    Gam = gammas.total
    M = g @ x
    H = -sum(g[i] * g[j] * 0.5 * math.log(np.sum((x[i] - x[j]) ** 2)) for i, j in PAIRS)
    L = gammas.L
    if gammas.is_gamma_zero:
        c = config.center
        ref = np.zeros(2) if c is None else c
        I = 0.5 * float(np.sum(g * np.sum((x - ref) ** 2, axis=1)))
    else:
        c = M / Gam
        I = 0.5 * float(np.sum(g * np.sum((x - c) ** 2, axis=1)))
    lam = L / (2 * I) if I != 0 else None
    return Invariants(H=float(H), I=I, L=L, Gamma=Gam, c=c, M=M, lam=lam)


# distance geometry ----------------------------------------------------------

def cayley_menger(s: DistanceVector | Sequence[float]) -> float:
    sv = s if isinstance(s, DistanceVector) else DistanceVector(tuple(s))
    B = np.ones((5, 5))
    B[0, 0] = 0.0
    B[1:, 1:] = sv.matrix()
    return float(np.linalg.det(B))


def cayley_menger_relative(s: DistanceVector) -> float:
    return cayley_menger(s) / max(s.s) ** 3


def oriented_areas(config: PlanarConfiguration | np.ndarray) -> tuple[float, float, float, float]:
    x = config.positions if isinstance(config, PlanarConfiguration) else np.asarray(config, float)
    M = np.vstack([np.ones(4), x[:, 0], x[:, 1]])
    out = []
    for i in range(4):
        sub = np.delete(M, i, axis=1)
        out.append((-1) ** i * 0.5 * float(np.linalg.det(sub)))
    return tuple(out)


def reconstruct_positions(s: DistanceVector, *, gammas: Vorticities | None = None,
                          lambda_prime: float | None = None, tol: float = PLANARITY_TOL) -> PlanarConfiguration:
    """Embed six squared distances in the plane.

    Gauge: x1 at the origin, x2 on the positive horizontal axis, x3 in the
    closed upper half-plane. The side of x4 is chosen to reproduce s34.
    """
    if abs(cayley_menger_relative(s)) > tol:
        raise PlanarityError(f"Cayley-Menger determinant {cayley_menger(s):.3e} is not zero")
    scale = max(s.s)
    r12 = math.sqrt(s["s12"])

    def place(a, b):
        u = (s["s12"] + a - b) / (2 * r12)
        h2 = a - u * u
        if h2 < -tol * scale:
            raise GeometryError("triangle inequality violated")
        return u, math.sqrt(max(h2, 0.0))

    x3, y3 = place(s["s13"], s["s23"])
    x4, y4 = place(s["s14"], s["s24"])
    up = (x3 - x4) ** 2 + (y3 - y4) ** 2
    down = (x3 - x4) ** 2 + (y3 + y4) ** 2
    if abs(down - s["s34"]) < abs(up - s["s34"]):
        y4 = -y4
    pos = np.array([[0.0, 0.0], [r12, 0.0], [x3, y3], [x4, y4]])
    if abs((x3 - x4) ** 2 + (y3 - y4) ** 2 - s["s34"]) > 1e3 * tol * scale:
        raise GeometryError("distances are not realizable in the plane")
    center, lam = None, None
    if gammas is not None and not gammas.is_gamma_zero:
        center = gammas.array @ pos / gammas.total
        if lambda_prime is not None:
            lam = -gammas.total * lambda_prime
    return PlanarConfiguration(pos, center, lam)


def embed_mp(svals, dps: int = 50) -> np.ndarray:
    """Planar embedding in the reconstruction gauge, evaluated with mpmath.

    For solutions known to many digits this keeps nearly flat triangles and
    needle shapes accurate after rounding the positions to floats.
    """
    with mpmath.workdps(dps):
        s12, s13, s14, s23, s24, s34 = (mpmath.mpf(v) for v in svals)
        r12 = mpmath.sqrt(s12)

        def place(a, b):
            u = (s12 + a - b) / (2 * r12)
            return u, mpmath.sqrt(max(a - u * u, 0))

        x3, y3 = place(s13, s23)
        x4, y4 = place(s14, s24)
        if abs((x3 - x4) ** 2 + (y3 + y4) ** 2 - s34) < abs((x3 - x4) ** 2 + (y3 - y4) ** 2 - s34):
            y4 = -y4
        return np.array([[0.0, 0.0], [float(r12), 0.0], [float(x3), float(y3)], [float(x4), float(y4)]])


# residual systems -----------------------------------------------------------

def normalize_distances(s: DistanceVector, lambda_prime: float) -> tuple[DistanceVector, float]:
    """Scale so that lambda' = +-1, or s12 = 1 when lambda' vanishes."""
    if lambda_prime != 0:
        k = abs(lambda_prime)
        return s.scaled(k), math.copysign(1.0, lambda_prime)
    return s.scaled(1.0 / s["s12"]), 0.0


def _rel(value: float, scale: float) -> float:
    return value / max(1.0, scale)


def ac_residuals(s: DistanceVector, gammas: Vorticities, lambda_prime: float):
    """Albouy-Chenciner residuals: 6 symmetrized f_ij and 12 unsymmetrized g_ij."""
    S = s.matrix()
    g = gammas.array
    with np.errstate(divide="ignore"):
        R = np.where(S > 0, 1.0 / np.where(S > 0, S, 1.0) + lambda_prime, 0.0)
    G = {}
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            terms = [g[k] * R[i, k] * (S[j, k] - S[i, k] - S[i, j]) for k in range(4)]
            scale = sum(abs(g[k] * R[i, k]) * (S[j, k] + S[i, k] + S[i, j]) for k in range(4))
            G[i, j] = (sum(terms), scale)
    ac_g = tuple(_rel(*G[i, j]) for i in range(4) for j in range(4) if i != j)
    ac_f = tuple(_rel(G[i, j][0] + G[j, i][0], G[i, j][1] + G[j, i][1]) for i, j in PAIRS)
    return ac_f, ac_g


def dziobek_residuals(s: DistanceVector, lambda_prime: float) -> tuple[float, float]:
    r = {n: 1.0 / s[n] + lambda_prime for n in PAIR_NAMES}
    a = r["s12"] * r["s34"]
    b = r["s13"] * r["s24"]
    c = r["s14"] * r["s23"]
    return (_rel(a - b, abs(a) + abs(b)), _rel(b - c, abs(b) + abs(c)))


def ccfactor_residual(s: DistanceVector) -> float:
    s12, s13, s14, s23, s24, s34 = s.s
    lhs = (s13 - s12) * (s23 - s34) * (s24 - s14)
    rhs = (s12 - s14) * (s24 - s34) * (s13 - s23)
    return _rel(lhs - rhs, abs(lhs) + abs(rhs))


def distance_residuals(s: DistanceVector, gammas: Vorticities, lambda_prime: float, *,
                       planar: bool = True, normalize: bool = True) -> ResidualReport:
    """Residual groups that only need the mutual distances.

    Each equation is divided by max(1, sum of its absolute terms) after the
    distances are scaled to lambda' = +-1. ``planar=False`` skips the groups
    that only hold for strictly planar configurations.
    """
    if gammas.is_gamma_zero:
        raise DomainError("total circulation is zero; use gamma_zero_residuals")
    if normalize:
        s, lambda_prime = normalize_distances(s, lambda_prime)
    ac_f, ac_g = ac_residuals(s, gammas, lambda_prime)
    rep = ResidualReport(ac_f=ac_f, ac_g=ac_g, cayley_menger=(cayley_menger_relative(s),))
    if planar:
        rep = replace(rep, dziobek=dziobek_residuals(s, lambda_prime), ccfactor=(ccfactor_residual(s),))
    return rep


def gamma_zero_residuals(s: DistanceVector, gammas: Vorticities) -> tuple[float, ...]:
    """S_i all equal plus the three reciprocal sums equal (zero total circulation)."""
    s = s.scaled(1.0 / s["s12"])
    S = s.matrix()
    g = gammas.array
    Si = S @ g
    scale = np.abs(S) @ np.abs(g)
    out = [(Si[i] - Si[0]) / max(1.0, scale[i] + scale[0]) for i in range(1, 4)]
    a = 1 / s["s12"] + 1 / s["s34"]
    b = 1 / s["s13"] + 1 / s["s24"]
    c = 1 / s["s14"] + 1 / s["s23"]
    out += [(a - b) / max(1.0, a + b), (b - c) / max(1.0, b + c)]
    return tuple(out)


def _vortex_velocity_terms(x: np.ndarray, g: np.ndarray):
    F = np.zeros((4, 2))
    scale = np.zeros(4)
    for i in range(4):
        for j in range(4):
            if i != j:
                d = x[j] - x[i]
                r2 = d @ d
                F[i] += g[j] * d / r2
                scale[i] += abs(g[j]) / math.sqrt(r2)
    return F, scale


def eqcc_residual(config: PlanarConfiguration, gammas: Vorticities, lam: float,
                  center: np.ndarray | None = None) -> tuple[float, ...]:
    """Relative norms of lambda (x_i - c) + sum_j G_j (x_j - x_i) / r_ij^2.

    Each norm is divided by |lambda| |x_i - c| + sum_j |G_j| / r_ij.
    """
    x = config.positions
    _check_distinct(x)
    g = gammas.array
    if center is None:
        center = config.center if config.center is not None else g @ x / gammas.total
    F, scale = _vortex_velocity_terms(x, g)
    out = []
    for i in range(4):
        v = lam * (x[i] - center) + F[i]
        out.append(float(np.linalg.norm(v)) / (abs(lam) * float(np.linalg.norm(x[i] - center)) + scale[i]))
    return tuple(out)


def fit_rotation(config: PlanarConfiguration, gammas: Vorticities) -> tuple[float, np.ndarray]:
    """Least-squares (lambda, c) for the rigid-rotation condition."""
    x = config.positions
    F, _ = _vortex_velocity_terms(x, gammas.array)
    # lambda x_i - w + F_i = 0 with w = lambda c
    A = np.zeros((8, 3))
    b = np.zeros(8)
    for i in range(4):
        A[2 * i] = [x[i, 0], -1.0, 0.0]
        A[2 * i + 1] = [x[i, 1], 0.0, -1.0]
        b[2 * i: 2 * i + 2] = -F[i]
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    lam = float(sol[0])
    c = sol[1:] / lam if lam != 0 else np.zeros(2)
    return lam, c


# classification -------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    shape: str
    symmetry: str
    audit: tuple[str, ...] = ()


def _close(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b))


def triangle_sines(s: DistanceVector, A) -> list[float]:
    """Sine of the largest angle of each triangle (the one omitting vortex i).

    Scale free, so a needle-shaped but genuinely planar configuration is not
    mistaken for a degenerate one.
    """
    S = s.matrix()
    out = []
    for i in range(4):
        a, b, c = sorted(S[j, k] for j, k in itertools.combinations([v for v in range(4) if v != i], 2))
        out.append(min(1.0, 2 * abs(A[i]) / math.sqrt(a * b)))
    return out


def _shape_from_areas(A, rel, tol):
    band = [i for i, r in enumerate(rel) if tol < r <= 100 * tol]
    if all(r <= tol for r in rel):
        return "Collinear", None
    if band:
        raise AmbiguityError(f"oriented area {band[0] + 1} is near zero", ("Degenerate", "Planar"))
    if any(r <= tol for r in rel):
        return "Degenerate", None
    pos = [i for i, a in enumerate(A) if a > 0]
    if len(pos) == 2:
        return "Convex", None
    odd = pos[0] if len(pos) == 1 else next(i for i, a in enumerate(A) if a < 0)
    return f"Concave({odd + 1})", odd


def _planar_symmetry(s: DistanceVector, shape: str, interior: int | None, A, tol: float):
    S = s.matrix()
    measures: list[tuple[str, float]] = []
    if shape == "Convex":
        # diagonal pairs are the ones whose oriented areas share a sign
        a0 = 0
        opp = next(j for j in range(1, 4) if (A[j] > 0) == (A[0] > 0))
        rest = [j for j in range(1, 4) if j != opp]
        b0, b1 = rest
        d1, d2 = S[a0, opp], S[b0, b1]
        sides = [S[a0, b0], S[b0, opp], S[opp, b1], S[b1, a0]]
        side_spread = (max(sides) - min(sides)) / max(sides)
        measures.append(("Square", max(side_spread, _close(d1, d2))))
        measures.append(("Rhombus", side_spread))
        trap = min(max(_close(d1, d2), _close(sides[0], sides[2])),
                   max(_close(d1, d2), _close(sides[1], sides[3])))
        measures.append(("IsoscelesTrapezoid", trap))
    elif shape.startswith("Concave"):
        k = interior
        others = [j for j in range(4) if j != k]
        inner = [S[k, j] for j in others]
        outer = [S[a, b] for a, b in itertools.combinations(others, 2)]
        epc = max((max(inner) - min(inner)) / max(inner), (max(outer) - min(outer)) / max(outer))
        measures.append(("EquilateralPlusCenter", epc))
    for i, j in PAIRS:
        k, l = [v for v in range(4) if v not in (i, j)]
        measures.append((f"Kite{i + 1}{j + 1}", max(_close(S[i, k], S[i, l]), _close(S[j, k], S[j, l]))))
    return measures


def _collinear_symmetry(config: PlanarConfiguration, gammas: Vorticities | None, tol: float):
    x = config.positions
    d = x[np.argmax([np.linalg.norm(x[i] - x[0]) for i in range(4)])] - x[0]
    t = (x - x[0]) @ d / np.linalg.norm(d)
    span = t.max() - t.min()
    mirror = t.max() + t.min() - t
    g = gammas.strengths if gammas is not None else (1, 1, 1, 1)
    worst = 0.0
    for i in range(4):
        best = min(abs(t[j] - mirror[i]) for j in range(4) if g[j] == g[i])
        worst = max(worst, best / span)
    return worst


def classify_configuration(config: PlanarConfiguration, s: DistanceVector, tol: float = CLASSIFY_TOL, *,
                           gammas: Vorticities | None = None, lambda_prime: float | None = None) -> Classification:
    """Shape from oriented-area signs, symmetry from distance equalities.

    A class whose defining equalities hold only to within 100*tol (but not tol)
    is ambiguous and raises AmbiguityError. When strengths and lambda' are
    given, the side-length inequalities of central configurations are audited
    and violations reported in ``audit``.
    """
    A = oriented_areas(config)
    shape, interior = _shape_from_areas(A, triangle_sines(s, A), tol)
    if shape == "Collinear":
        d = _collinear_symmetry(config, gammas, tol)
        if tol < d <= 100 * tol:
            raise AmbiguityError("collinear mirror symmetry is marginal", ("CollinearSymmetric", "CollinearAsymmetric"))
        return Classification(shape, "CollinearSymmetric" if d <= tol else "CollinearAsymmetric")
    if shape == "Degenerate":
        return Classification(shape, "Asymmetric")
    measures = _planar_symmetry(s, shape, interior, A, tol)
    marginal = [name for name, d in measures if tol < d <= 100 * tol]
    if marginal:
        raise AmbiguityError(f"symmetry classes within tolerance band: {marginal}", marginal)
    matched = [name for name, d in measures if d <= tol]
    symmetry = matched[0] if matched else "Asymmetric"
    audit = _audit(s, shape, interior, A, gammas, lambda_prime) if gammas is not None and lambda_prime is not None else ()
    return Classification(shape, symmetry, audit)


def _audit(s: DistanceVector, shape: str, interior, A, gammas: Vorticities, lambda_prime: float):
    S = s.matrix()
    g = gammas.array
    out = []
    if shape == "Convex":
        opp = next(j for j in range(1, 4) if (A[j] > 0) == (A[0] > 0))
        b0, b1 = [j for j in range(1, 4) if j != opp]
        r = np.sqrt(S)
        diag = r[0, opp] + r[b0, b1]
        if not (diag > r[0, b0] + r[opp, b1] and diag > r[b0, opp] + r[b1, 0]):
            out.append("diagonal inequality violated")
    if lambda_prime >= 0:
        return tuple(out)
    thr = 1.0 / -lambda_prime
    same_sign = bool(np.all(g > 0) or np.all(g < 0))
    if shape.startswith("Concave"):
        k = interior
        others = [j for j in range(4) if j != k]
        interior_edges = [(k, j) for j in others]
        exterior_edges = list(itertools.combinations(others, 2))
        if same_sign:
            long_edges = exterior_edges
        else:
            long_edges = [e for e in exterior_edges if g[e[0]] * g[e[1]] < 0]
            long_edges += [e for e in interior_edges if g[e[0]] * g[e[1]] > 0]
        short_edges = [e for e in interior_edges + exterior_edges if e not in long_edges]
        if not all(S[e] > thr for e in long_edges) or not all(S[e] < thr for e in short_edges):
            out.append("concave side ordering violated")
    elif shape == "Convex":
        opp = next(j for j in range(1, 4) if (A[j] > 0) == (A[0] > 0))
        b0, b1 = [j for j in range(1, 4) if j != opp]
        diags = [(0, opp), (b0, b1)]
        ext = [(0, b0), (b0, opp), (opp, b1), (b1, 0)]
        if same_sign:
            ok = all(S[e] < thr for e in ext) and all(S[e] > thr for e in diags)
        elif any(g[a] * g[b] > 0 for a, b in diags):
            vals = [S[e] for e in ext + diags]
            ok = all(v < thr for v in vals) or all(v > thr for v in vals)
        else:
            short_edges = [e for e in ext if g[e[0]] * g[e[1]] < 0]
            ok = all(S[e] < thr for e in short_edges) and all(
                S[e] > thr for e in ext + diags if e not in short_edges)
        if not ok:
            out.append("convex side ordering violated")
    return tuple(out)


# records --------------------------------------------------------------------

def _sigma(s: DistanceVector, gammas: Vorticities, lambda_prime: float, A) -> float | None:
    best = None
    for i, j in PAIRS:
        prod = A[i] * A[j]
        if best is None or abs(prod) > abs(best[0]):
            best = (prod, i, j)
    prod, i, j = best
    if abs(prod) < 1e-300:
        return None
    g = gammas.array
    return float(g[i] * g[j] * (1.0 / s[(i, j)] + lambda_prime) / prod)


def make_record(gammas: Vorticities, s: DistanceVector, lambda_prime: float | None, *, family: str,
                positions: PlanarConfiguration | None = None, flags: Sequence[str] = (),
                tol: float = CLASSIFY_TOL, symmetry: str | None = None) -> SolutionRecord:
    """Assemble, verify and classify one relative equilibrium.

    ``lambda_prime`` is the value produced by the family's own derivation; the
    rigid-rotation residual then uses lambda = -Gamma lambda' on the
    reconstructed positions.
    """
    if positions is None:
        positions = reconstruct_positions(s, gammas=gammas, lambda_prime=lambda_prime)
    A = oriented_areas(positions)
    collinear = all(v <= tol for v in triangle_sines(s, A))
    flags = list(flags)
    if gammas.is_gamma_zero:
        lam, c = fit_rotation(positions, gammas)
        positions = PlanarConfiguration(positions.positions, c, lam)
        res = ResidualReport(cayley_menger=(cayley_menger_relative(s),),
                             gamma_zero=gamma_zero_residuals(s, gammas),
                             eqcc=eqcc_residual(positions, gammas, lam, c))
        sigma = None
    else:
        lam = -gammas.total * lambda_prime
        center = gammas.array @ positions.positions / gammas.total
        positions = PlanarConfiguration(positions.positions, center, lam)
        res = distance_residuals(s, gammas, lambda_prime, planar=not collinear)
        res = replace(res, eqcc=eqcc_residual(positions, gammas, lam, center))
        sigma = None if collinear else _sigma(s, gammas, lambda_prime, A)
        if lambda_prime == 0 and "equilibrium" not in flags:
            flags.append("equilibrium")
    cls = classify_configuration(positions, s, tol, gammas=gammas,
                                 lambda_prime=None if gammas.is_gamma_zero else lambda_prime)
    sym = symmetry or cls.symmetry
    return SolutionRecord(
        m=gammas.m, distances=s, positions=positions,
        scalars=DziobekScalars(lambda_prime, sigma, tuple(A)),
        shape=cls.shape, symmetry=sym, residuals=res,
        label_multiplicity=1 if cls.shape == "Collinear" else 2,
        strengths=tuple(gammas.strengths), family=family, flags=tuple(flags), audit=cls.audit)


def verify_record(record: SolutionRecord) -> ResidualReport:
    """Recompute every residual group from the stored distances and positions."""
    gammas = record.gammas
    pos = record.positions
    if gammas.is_gamma_zero:
        lam, c = fit_rotation(pos, gammas)
        return ResidualReport(cayley_menger=(cayley_menger_relative(record.distances),),
                              gamma_zero=gamma_zero_residuals(record.distances, gammas),
                              eqcc=eqcc_residual(pos, gammas, lam, c))
    stored = pos.distances()
    drift = max(abs(a - b) / max(record.distances.s) for a, b in zip(stored.s, record.distances.s))
    rep = distance_residuals(record.distances, gammas, record.lambda_prime,
                             planar=record.shape_kind != "Collinear")
    center = gammas.array @ pos.positions / gammas.total
    lam = -gammas.total * record.lambda_prime
    rep = replace(rep, eqcc=eqcc_residual(pos, gammas, lam, center))
    if drift > RESIDUAL_TOL:
        rep = replace(rep, cayley_menger=rep.cayley_menger + (drift,))
    return rep
