"""Univariate polynomials over the rationals with exact real-root machinery.

Coefficients are stored in ascending order. Floats entering an exact
polynomial are converted through their shortest decimal repr, so ``0.4``
becomes ``2/5`` rather than the nearest binary fraction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

__all__ = [
    "Polynomial",
    "QuarticReport",
    "IsolatedRoot",
    "as_rational",
    "depress_quartic",
    "resolvent_cubic",
    "classify_quartic",
    "mobius_transform",
    "isolate_real_roots",
    "sturm_sequence",
    "count_roots",
    "descartes_bound",
    "discriminant",
    "resultant",
    "squarefree_factors",
    "real_roots",
]

ALL_REAL_DISTINCT = "AllRealDistinct"
ALL_COMPLEX_DISTINCT = "AllComplexDistinct"
TWO_REAL_TWO_COMPLEX = "TwoRealTwoComplex"
REPEATED_ROOTS = "RepeatedRoots"
# only produced when a nominal quartic has lost degree
SOME_REAL_SOME_COMPLEX = "SomeRealSomeComplex"


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise DomainError(f"cannot convert {x!r} to a rational")
        return Fraction(repr(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    return Fraction(x)


def _horner(coeffs, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class Polynomial:
    """Immutable univariate polynomial.

    ``nominal_degree`` records the degree a parametric family is supposed to
    have; when the actual degree is lower the polynomial reports
    ``degree_dropped``.
    """

    __slots__ = ("coefficients", "nominal_degree", "exact", "_fcoeffs")

    def __init__(self, coefficients: Iterable = (), nominal_degree: int | None = None, exact: bool = True):
        cs = list(coefficients)
        if exact:
            cs = [as_rational(c) for c in cs]
        else:
            cs = [float(c) for c in cs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coefficients", tuple(cs))
        object.__setattr__(self, "nominal_degree", nominal_degree)
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "_fcoeffs", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def from_descending(cls, coeffs: Sequence, **kw) -> "Polynomial":
        return cls(list(coeffs)[::-1], **kw)

    @classmethod
    def monomial(cls, n: int, c=1) -> "Polynomial":
        return cls([0] * n + [c])

    # basic structure
    @property
    def degree(self) -> int:
        return max(len(self.coefficients) - 1, 0)

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading(self):
        return self.coefficients[-1] if self.coefficients else 0

    @property
    def degree_dropped(self) -> bool:
        return self.nominal_degree is not None and self.degree < self.nominal_degree

    def coeff(self, i: int):
        return self.coefficients[i] if 0 <= i < len(self.coefficients) else 0

    def descending(self) -> list:
        return list(self.coefficients[::-1])

    def float_coefficients(self) -> np.ndarray:
        fc = self._fcoeffs
        if fc is None:
            fc = np.array([float(c) for c in self.coefficients], dtype=float)
            object.__setattr__(self, "_fcoeffs", fc)
        return fc

    def to_numeric(self) -> "Polynomial":
        return Polynomial(self.coefficients, self.nominal_degree, exact=False)

    def to_exact(self) -> "Polynomial":
        return self if self.exact else Polynomial(self.coefficients, self.nominal_degree)

    # evaluation
    def __call__(self, x):
        if isinstance(x, (Fraction, int)) and self.exact:
            return _horner(self.coefficients, Fraction(x))
        if isinstance(x, np.ndarray):
            return np.polyval(self.float_coefficients()[::-1], x) if self.coefficients else np.zeros_like(x)
        if isinstance(x, complex):
            return _horner([complex(c) for c in self.coefficients], x)
        return _horner(self.float_coefficients().tolist(), float(x)) if self.coefficients else 0.0

    def abs_scale(self, x: float) -> float:
        """Sum of |a_i x^i|, the natural scale for a residual at x."""
        return float(np.sum(np.abs(self.float_coefficients()) * np.abs(float(x)) ** np.arange(len(self.coefficients))))

    def sign_at(self, x) -> int:
        v = self(x)
        return (v > 0) - (v < 0)

    def sign_at_infinity(self, negative: bool = False) -> int:
        if self.is_zero:
            return 0
        s = 1 if self.leading > 0 else -1
        return -s if negative and self.degree % 2 else s

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other], exact=self.exact)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coefficients), len(other.coefficients))
        return Polynomial([self.coeff(i) + other.coeff(i) for i in range(n)], exact=self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coefficients], self.nominal_degree, self.exact)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return Polynomial([], exact=self.exact and other.exact)
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return Polynomial(out, exact=self.exact and other.exact)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Polynomial([1], exact=self.exact)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coefficients]})"

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coefficients)][1:], exact=self.exact)

    def divmod(self, other: "Polynomial"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 1)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead if self.exact else rem[k] / float(lead)
            quot[k - dq] = c
            if c:
                for j, b in enumerate(other.coefficients):
                    rem[k - dq + j] -= c * b
        return Polynomial(quot, exact=self.exact), Polynomial(rem[:dq], exact=self.exact)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Polynomial":
        if self.is_zero:
            return self
        return Polynomial([c / self.leading for c in self.coefficients], exact=self.exact)

    def scaled_positive(self) -> "Polynomial":
        """Divide by |leading|; keeps every sign and keeps numbers small."""
        if self.is_zero:
            return self
        lc = abs(self.leading)
        return Polynomial([c / lc for c in self.coefficients], exact=self.exact)

    def compose(self, other: "Polynomial") -> "Polynomial":
        out = Polynomial([], exact=self.exact and other.exact)
        for c in reversed(self.coefficients):
            out = out * other + c
        return out

    def shift(self, a) -> "Polynomial":
        """p(x + a)."""
        return self.compose(Polynomial([a, 1], exact=self.exact))

    def reflect(self) -> "Polynomial":
        """p(-x)."""
        return Polynomial([c if i % 2 == 0 else -c for i, c in enumerate(self.coefficients)], exact=self.exact)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def squarefree_factors(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: p = c * prod f_i**i with f_i square-free and coprime."""
    p = p.to_exact()
    if p.degree == 0:
        return []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    out = []
    i = 1
    while b.degree > 0:
        d = c - b.derivative()
        f = poly_gcd(b, d)
        if f.degree > 0:
            out.append((f, i))
        b = b // f
        c = d // f
        i += 1
    return out


def squarefree_part(p: Polynomial) -> Polynomial:
    p = p.to_exact()
    g = poly_gcd(p, p.derivative())
    return (p // g).scaled_positive()


def sturm_sequence(p: Polynomial) -> list[Polynomial]:
    p = p.to_exact()
    seq = [p.scaled_positive(), p.derivative().scaled_positive()]
    while not seq[-1].is_zero and seq[-1].degree > 0:
        r = -(seq[-2] % seq[-1])
        if r.is_zero:
            break
        seq.append(r.scaled_positive())
    return [s for s in seq if not s.is_zero]


def _variations(signs: Iterable[int]) -> int:
    last = 0
    v = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            v += 1
        last = s
    return v


def _sturm_v(seq, x) -> int:
    if x is None or x == math.inf:
        return _variations(s.sign_at_infinity() for s in seq)
    if x == -math.inf:
        return _variations(s.sign_at_infinity(negative=True) for s in seq)
    return _variations(s.sign_at(x) for s in seq)


def count_roots(p: Polynomial, a=None, b=None, *, half_open: bool = False, seq=None) -> int:
    """Distinct real roots in [a, b] (or [a, b) when ``half_open``); None is infinite."""
    q = squarefree_part(p)
    seq = seq or sturm_sequence(q)
    lo = -math.inf if a is None else as_rational(a)
    hi = math.inf if b is None else as_rational(b)
    n = _sturm_v(seq, lo) - _sturm_v(seq, hi)
    if lo != -math.inf and q(lo) == 0:
        n += 1
    if half_open and hi != math.inf and q(hi) == 0:
        n -= 1
    return n


def descartes_bound(p: Polynomial) -> int:
    """Sign variations of the coefficient list: an upper bound on positive roots."""
    return _variations((c > 0) - (c < 0) for c in p.coefficients)


def cauchy_bound(p: Polynomial) -> Fraction:
    p = p.to_exact()
    lead = abs(p.leading)
    return 1 + max((abs(c) / lead for c in p.coefficients[:-1]), default=Fraction(0))


def mobius_transform(poly: Polynomial, k1, k2) -> Polynomial:
    """Numerator of poly((k2*u + k1)/(u + 1)) so that [k1, k2) maps to [0, inf).

    ``k2`` may be ``None`` or ``math.inf``, in which case x = u + k1.
    """
    k1 = as_rational(k1)
    if k2 is None or k2 == math.inf:
        return poly.to_exact().shift(k1)
    k2 = as_rational(k2)
    if k1 >= k2:
        raise DomainError("mobius_transform requires k1 < k2")
    p = poly.to_exact()
    n = p.degree
    num = Polynomial([k1, k2])
    den = Polynomial([1, 1])
    out = Polynomial([])
    for i, a in enumerate(p.coefficients):
        if a:
            out = out + (num ** i) * (den ** (n - i)) * a
    return out


def resultant(p: Polynomial, q: Polynomial) -> Fraction:
    """Determinant of the Sylvester matrix, by exact Gaussian elimination."""
    p, q = p.to_exact(), q.to_exact()
    m, n = p.degree, q.degree
    size = m + n
    if size == 0:
        return Fraction(1)
    pc, qc = p.descending(), q.descending()
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + pc + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + qc + [Fraction(0)] * (size - n - 1 - i))
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        pv = rows[col][col]
        det *= pv
        for r in range(col + 1, size):
            f = rows[r][col] / pv
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return det


def discriminant(p: Polynomial) -> Fraction:
    p = p.to_exact()
    n = p.degree
    if n < 1:
        raise DomainError("discriminant needs degree >= 1")
    if n == 1:
        return Fraction(1)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(p, p.derivative()) / p.leading


@dataclass(frozen=True)
class QuarticReport:
    p: Fraction | None
    q: Fraction | None
    r: Fraction | None
    shift: Fraction | None
    discriminant: Fraction | None = None
    resolvent: Polynomial | None = None
    classification: str | None = None
    degree: int = 4
    degree_drop: bool = False


def _quartic_coeffs(quartic: Polynomial):
    q = quartic.to_exact()
    if q.degree != 4:
        raise DomainError(f"expected a quartic, got degree {q.degree}")
    return q


def depress_quartic(quartic: Polynomial) -> QuarticReport:
    q = _quartic_coeffs(quartic)
    a = q.coeff(4)
    shift = q.coeff(3) / (4 * a)
    eta = q.shift(-shift)
    eta = Polynomial([c / a for c in eta.coefficients])
    return QuarticReport(p=eta.coeff(2), q=eta.coeff(1), r=eta.coeff(0), shift=shift)


def resolvent_cubic(p, q, r) -> Polynomial:
    p, q, r = as_rational(p), as_rational(q), as_rational(r)
    return Polynomial([q * q, p * p - 4 * r, -2 * p, 1])


def depressed_discriminant(p, q, r) -> Fraction:
    return (256 * r**3 - 128 * p**2 * r**2 + 144 * p * q**2 * r - 27 * q**4
            + 16 * p**4 * r - 4 * p**3 * q**2)


def classify_quartic(quartic: Polynomial) -> QuarticReport:
    """Root classification of a quartic from (p, q, r) and the discriminant.

    A nominal quartic whose leading coefficient vanished is classified by the
    root count of the lower-degree polynomial and flagged with ``degree_drop``.
    """
    poly = quartic.to_exact()
    if poly.degree != 4:
        if poly.nominal_degree == 4 and poly.degree >= 1:
            return _classify_dropped(poly)
        raise DomainError(f"expected a quartic, got degree {poly.degree}")
    rep = depress_quartic(poly)
    p, q, r = rep.p, rep.q, rep.r
    disc = depressed_discriminant(p, q, r)
    if disc == 0:
        cls = REPEATED_ROOTS
    elif disc < 0:
        cls = TWO_REAL_TWO_COMPLEX
    elif p < 0 and p * p - 4 * r > 0:
        cls = ALL_REAL_DISTINCT
    else:
        cls = ALL_COMPLEX_DISTINCT
    return QuarticReport(p, q, r, rep.shift, disc, resolvent_cubic(p, q, r), cls)


def _classify_dropped(poly: Polynomial) -> QuarticReport:
    disc = discriminant(poly)
    nreal = count_roots(poly)
    if disc == 0:
        cls = REPEATED_ROOTS
    elif nreal == poly.degree:
        cls = ALL_REAL_DISTINCT
    elif nreal == 0:
        cls = ALL_COMPLEX_DISTINCT
    else:
        cls = SOME_REAL_SOME_COMPLEX
    return QuarticReport(None, None, None, None, disc, None, cls, degree=poly.degree, degree_drop=True)


@dataclass(frozen=True)
class IsolatedRoot:
    bracket: tuple[Fraction, Fraction]
    refined_value: float
    multiplicity: int = 1
    clustered: bool = False  # two nearby roots merged by ``merge_tol``

    def __float__(self):
        return self.refined_value


def _refine(q: Polynomial, a: Fraction, b: Fraction) -> float:
    if a == b:
        return float(a)
    sa = q.sign_at(a)
    fa, fb = float(a), float(b)
    f = q.to_numeric()
    va, vb = f(fa), f(fb)
    if va * vb < 0:
        return brentq(f, fa, fb, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    # float evaluation lost the sign change; keep bisecting exactly
    for _ in range(200):
        mid = (a + b) / 2
        sm = q.sign_at(mid)
        if sm == 0:
            return float(mid)
        if sm == sa:
            a = mid
        else:
            b = mid
        if float(b) - float(a) <= 4 * np.finfo(float).eps * max(abs(float(a)), 1e-300):
            break
    return float((a + b) / 2)


def _interval_bounds(q: Polynomial, interval):
    if interval == "all" or interval is None:
        bnd = cauchy_bound(q)
        return -bnd, bnd
    a, b = interval
    bnd = None
    if a is None or a == -math.inf:
        bnd = cauchy_bound(q)
        a = -bnd
    if b is None or b == math.inf:
        bnd = bnd or cauchy_bound(q)
        b = bnd
    a, b = as_rational(a), as_rational(b)
    if a > b:
        raise DomainError("empty interval")
    return a, b


def isolate_real_roots(poly: Polynomial, interval="all", *, merge_tol: float | None = None) -> list[IsolatedRoot]:
    """Isolate every distinct real root in a closed interval.

    Exact Sturm bisection on the square-free part yields disjoint rational
    brackets; values are polished in floating point. Multiplicities come from
    the square-free factorisation. With ``merge_tol`` set, a pair of roots (or
    a complex pair) that sits on a critical point where ``|p|`` is below
    ``merge_tol`` relative to its term scale is reported as one double root.
    """
    p = poly.to_exact()
    if p.is_zero:
        raise DomainError("cannot isolate roots of the zero polynomial")
    if p.degree == 0:
        return []
    factors = squarefree_factors(p)
    q = squarefree_part(p)
    lo, hi = _interval_bounds(q, interval)
    # Descartes pre-filter on the Mobius image of [lo, hi]
    if lo < hi and q(hi) != 0 and descartes_bound(mobius_transform(q, lo, hi)) == 0:
        roots: list[tuple[Fraction, Fraction]] = []
    else:
        roots = _bisect(q, lo, hi)
    out = []
    for a, b in roots:
        mult = 1
        for f, i in factors:
            if f.degree == 0:
                continue
            fa, fb = f.sign_at(a), f.sign_at(b)
            if fa == 0 or fb == 0 or fa != fb:
                mult = i
                break
        out.append(IsolatedRoot((a, b), _refine(q, a, b), mult))
    if merge_tol is not None:
        out = _merge_clusters(p, out, merge_tol, lo, hi)
    return out


def _bisect(q: Polynomial, lo: Fraction, hi: Fraction):
    seq = sturm_sequence(q)
    found = []
    for x in (lo, hi) if lo != hi else (lo,):
        if q(x) == 0:
            found.append((x, x))
    if lo == hi:
        return found
    stack = [(lo, hi, _sturm_v(seq, lo), _sturm_v(seq, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if q(b) == 0:
            n -= 1  # b itself is already recorded
        if n <= 0:
            continue
        if n == 1 and q(b) != 0:
            # the single root is interior; pull ``a`` off a recorded root
            while q(a) == 0:
                mid = (a + b) / 2
                vm = _sturm_v(seq, mid)
                if q(mid) != 0 and vm - vb == 1:
                    a = mid
                else:
                    b, vb = mid, vm
            found.append((a, b))
            continue
        mid = (a + b) / 2
        vm = _sturm_v(seq, mid)
        if q(mid) == 0:
            found.append((mid, mid))
        stack.append((a, mid, va, vm))
        stack.append((mid, b, vm, vb))
    found.sort()
    return found


def _merge_clusters(p: Polynomial, roots: list[IsolatedRoot], tol: float, lo, hi) -> list[IsolatedRoot]:
    dp = p.derivative()
    if dp.degree < 1:
        return roots
    crit = isolate_real_roots(dp, (lo, hi))
    out = list(roots)
    for c in crit:
        x = c.refined_value
        scale = p.abs_scale(x)
        if scale == 0 or abs(p(x)) > tol * scale:
            continue
        delta = 1e3 * math.sqrt(tol) * max(1.0, abs(x))
        near = [r for r in out if abs(r.refined_value - x) <= delta]
        if any(r.multiplicity > 1 for r in near):
            continue
        if len(near) == 2 or not near:
            for r in near:
                out.remove(r)
            if near:
                br = (min(r.bracket[0] for r in near), max(r.bracket[1] for r in near))
            else:
                d = as_rational(delta)
                br = (as_rational(x) - d, as_rational(x) + d)
            out.append(IsolatedRoot(br, x, 2, clustered=True))
    out.sort(key=lambda r: r.refined_value)
    return out


def real_roots(poly: Polynomial, interval="all", **kw) -> list[float]:
    return [r.refined_value for r in isolate_real_roots(poly, interval, **kw)]
