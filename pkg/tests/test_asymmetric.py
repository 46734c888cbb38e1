import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from fourvortex import asymmetric as asy
from fourvortex.errors import BoundaryEvent, DegenerateParameterError, DomainError
from fourvortex.model import DistanceVector
from fourvortex.poly import Polynomial, count_roots, descartes_bound, mobius_transform

m_, x_, u_, a_ = sp.symbols("m x u alpha")
P1 = ((2 * m_ + 1) ** 2 - 2 * (10 * m_**2 + 11 * m_ + 3) * x_ + 2 * (16 * m_**2 + 21 * m_ + 7) * x_**2
      - 4 * (5 * m_**2 + 8 * m_ + 3) * x_**3 + 4 * (m_ + 1) ** 2 * x_**4)
P2 = ((m_ + 2) ** 2 - 2 * (3 * m_**2 + 11 * m_ + 10) * x_ + 2 * (7 * m_**2 + 21 * m_ + 16) * x_**2
      - 4 * (3 * m_**2 + 8 * m_ + 5) * x_**3 + 4 * (m_ + 1) ** 2 * x_**4)

# Moebius images of p2 as polynomials in u; J for m = a/(a+1) >= 0, K for m = -1/(a+1) < 0
a, u = a_, u_
IMAGES_J = {
    "J1": -(2*a + 1)*u**4 - 2*(2*a + 1)*u**3 + 2*(8*a**2 + 11*a + 4)*u**2 + 4*(12*a**2 + 17*a + 6)*u
          + 36*a**2 + 48*a + 16,
    "J2": 4*a**2*u**4 + 4*(4*a**2 + a)*u**3 + 2*(8*a**2 - a - 2)*u**2 - 6*(2*a + 1)*u - 2*a - 1,
    "J3": -(18*a + 5)*u**4 - 2*(22*a + 5)*u**3 + 2*(8*a**2 - 13*a - 2)*u**2 + 4*a*(4*a - 1)*u + 4*a**2,
    "J4": 4*(3969*a**2 + 3352*a + 704)*u**4 + 4*(1764*a**2 + 815*a + 16)*u**3
          + 2*(392*a**2 - 397*a - 218)*u**2 - 2*(134*a + 45)*u - 18*a - 5,
}
IMAGES_K = {
    "K1": (a**2 + 2*a)*u**4 + 2*(a**2 + 2*a)*u**3 - 2*(4*a**2 + 5*a + 2)*u**2 - 2*(12*a**2 + 14*a + 4)*u
          - 4*(4*a**2 + 4*a + 1),
    "K2": -4*u**4 + 4*(a - 2)*u**3 + 2*(2*a**2 + 7*a - 2)*u**2 + 6*(a**2 + 2*a)*u + (a**2 + 2*a),
    # linear coefficient is -8 a (a^2 + 5a + 2); see the decisions ledger
    "K3": 4*(4*a**4 + 12*a**3 + 9*a**2 + 2*a)*u**4 + 8*(6*a**4 + 17*a**3 + 11*a**2 + 2*a)*u**3
          + 8*(2*a**4 + 2*a**3 - 10*a**2 - 9*a - 2)*u**2 - 8*a*(a**2 + 5*a + 2)*u - 4*a**2,
    "K4": -16*a**3*u**4 - 8*(6*a**3 + 4*a**2)*u**3 - 8*(4*a**3 + 5*a**2 + 2*a)*u**2
          + 8*(2*a**3 + 5*a**2 + 2*a)*u + 4*(4*a**3 + 12*a**2 + 9*a + 2),
}
GRID = np.linspace(-0.95, 0.95, 20)


def proportional(p: Polynomial, expr) -> bool:
    want = [Fraction(int(c.p), int(c.q)) for c in sp.Poly(expr, u_).all_coeffs()[::-1]]
    got = list(p.coefficients)
    if len(got) != len(want):
        return False
    k = next(i for i, c in enumerate(want) if c)
    ratio = got[k] / want[k]
    return ratio != 0 and all(g == ratio * w for g, w in zip(got, want))


class TestSymbolicIdentities:
    def test_discriminants(self):
        d2 = 256 * (m_ + 2)**2 * (3*m_ + 5)**2 * (m_ + 1)**4 * m_**2 * (m_ - 1)**2
        d1 = 256 * (m_ - 1)**2 * (m_ + 1)**4 * (2*m_ + 1)**2 * (5*m_ + 3)**2
        assert sp.expand(sp.discriminant(P2, x_) - d2) == 0
        assert sp.expand(sp.discriminant(P1, x_) - d1) == 0

    def test_decomposition_quartic_is_p2(self):
        t = (m_ + 2) / (m_ + 1)
        q = t**2 + (-4*t**2 - 2*t)*x_ + (4*t**2 + 6*t + 4)*x_**2 + (-8*t - 4)*x_**3 + 4*x_**4
        assert sp.simplify(q / P2 - 1 / (m_ + 1)**2) == 0

    def test_duality(self):
        assert sp.expand(sp.together(m_**2 * P1.subs(m_, 1 / m_)) - P2) == 0

    @pytest.mark.parametrize("mv", [Fraction(2, 5), Fraction(-1, 5), Fraction(-3, 4)])
    def test_implementation_matches_symbolic_factors(self, mv):
        p1, p2 = asy.p_polynomials(mv)
        for poly, expr in ((p1, P1), (p2, P2)):
            want = sp.Poly(expr.subs(m_, sp.Rational(mv.numerator, mv.denominator)), x_).all_coeffs()[::-1]
            assert list(poly.coefficients) == [Fraction(int(c.p), int(c.q)) for c in want]


class TestCertificates:
    @pytest.mark.parametrize("alpha", [Fraction(1, 7), Fraction(1, 2), Fraction(3), Fraction(40)])
    def test_j_images(self, alpha):
        m = alpha / (alpha + 1)
        _, p2 = asy.p_polynomials(m)
        for tag, k1, k2 in asy.p2_intervals(m):
            img = mobius_transform(p2, k1, k2)
            assert proportional(img, IMAGES_J[tag].subs(a_, sp.Rational(alpha.numerator, alpha.denominator)))

    @pytest.mark.parametrize("alpha", [Fraction(1, 9), Fraction(1, 2), Fraction(2), Fraction(30)])
    def test_k_images(self, alpha):
        m = -1 / (alpha + 1)
        _, p2 = asy.p_polynomials(m)
        for tag, k1, k2 in asy.p2_intervals(m):
            img = mobius_transform(p2, k1, k2)
            assert proportional(img, IMAGES_K[tag].subs(a_, sp.Rational(alpha.numerator, alpha.denominator)))
            assert descartes_bound(img) == 1

    @pytest.mark.parametrize("m", [0.9, 0.4, 0.05, -0.05, -0.3, -0.59, -0.8, -0.97])
    def test_one_root_per_interval(self, m):
        assert set(asy.p2_certificate(m).values()) == {1}
        assert set(asy.p2_mobius_certificate(m).values()) == {1}
        assert sorted(r.tag for r in asy.tagged_p2_roots(m)) == sorted(t for t, _, _ in asy.p2_intervals(m))


class TestSolutions:
    @pytest.mark.parametrize("m", GRID)
    def test_four_records_of_full_rank(self, m):
        rep = asy.solve_asymmetric(float(m))
        assert len(rep.records) == 4 and rep.count == 8
        assert rep.jacobian_ranks == [6] * 4
        for r in rep.records:
            assert r.symmetry == "Asymmetric" and r.passes()
            assert np.max(np.abs(asy.f_residuals(r.distances, m))) <= 1e-10
            assert r.shape_kind == ("Convex" if m < 0 else "Concave")
            assert asy.p4_residual(r) <= 1e-9

    def test_singular_value_gap(self):
        for m in GRID:
            for r in asy.solve_asymmetric(float(m), ranks=False).records:
                sv = asy.jacobian_singular_values(r.distances, m)
                assert sv[5] / sv[6] >= 1e4

    def test_zero_is_a_boundary_event(self):
        with pytest.raises(BoundaryEvent) as exc:
            asy.solve_asymmetric(0.0)
        assert exc.value.name == "m=0" and len(exc.value.records) == 4

    def test_equal_strengths(self):
        rep = asy.solve_asymmetric(1.0)
        assert {r.symmetry for r in rep.records} == {"EquilateralPlusCenter"}

    def test_off_variety_point_rejected(self):
        r = asy.solve_asymmetric(0.4, ranks=False).records[0]
        s = r.distances.scaled(1.01)
        with pytest.raises(DomainError):
            asy.jacobian_rank(s, 0.4)

    def test_minus_one_is_degenerate(self):
        with pytest.raises(DegenerateParameterError):
            asy.p_polynomials(-1)


class TestBranchTrace:
    def test_continuous_through_zero(self):
        ms = np.linspace(-0.2, 0.2, 41)
        tr = asy.branch_trace(ms)
        assert np.all(np.isfinite(tr))
        assert np.max(np.abs(np.diff(tr, axis=0))) < 0.1

    def test_zero_values(self):
        tr = asy.branch_trace([0.0])[0]
        r5 = math.sqrt(5)
        assert tr == pytest.approx(sorted([1.0, 1.0, (3 - r5) / 2, (3 + r5) / 2]))

    def test_domain(self):
        with pytest.raises(DomainError):
            asy.branch_trace([1.0])


def same_side_of_line(x, i, j) -> bool:
    """True when the two vortices other than i and j lie on one side of the line through them."""
    d = x[j] - x[i]
    k, l = (n for n in range(4) if n not in (i, j))
    side = [d[0] * (x[n][1] - x[i][1]) - d[1] * (x[n][0] - x[i][0]) for n in (k, l)]
    return side[0] * side[1] > 0


class TestDocumentedExamples:
    @pytest.mark.parametrize("m", np.linspace(-0.95, 0.95, 12))
    def test_p1_has_no_positive_roots(self, m):
        p1, _ = asy.p_polynomials(float(m))
        assert count_roots(p1, 0, None) == 0

    def test_p2_at_zero(self):
        _, p2 = asy.p_polynomials(0)
        r5 = math.sqrt(5)
        for w in (1.0, (3 + r5) / 2, (3 - r5) / 2):
            assert p2(w) == pytest.approx(0, abs=1e-12)
        assert p2.derivative()(1.0) == pytest.approx(0, abs=1e-12)

    def test_one_third(self):
        m = Fraction(1, 3)
        assert asy.p2_certificate(m) == {"J1": 1, "J2": 1, "J3": 1, "J4": 1}
        assert [t for t, _, _ in asy.p2_intervals(m)] == ["J1", "J2", "J3", "J4"]
        rep = asy.solve_asymmetric(1 / 3)
        assert rep.jacobian_ranks == [6] * 4
        for r in rep.records:
            assert np.max(np.abs(asy.f_residuals(r.distances, 1 / 3))) <= 1e-10

    def test_random_points_are_off_the_variety(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            s = DistanceVector(tuple(rng.uniform(0.2, 3.0, 6)))
            assert np.max(np.abs(asy.f_residuals(s, float(rng.uniform(-0.9, 0.9))))) > 1e-3

    @pytest.mark.parametrize("eps", [1e-6, 1e-3, 0.25])
    def test_f2_is_linear_in_s12(self, eps):
        r = asy.solve_asymmetric(0.4, ranks=False).records[0]
        s = list(r.distances.s)
        s[0] += eps
        f = asy.f_residuals(DistanceVector(tuple(s)), 0.4)
        assert abs(f[1]) == pytest.approx(eps, rel=1e-9)

    def test_limits_near_minus_one(self):
        tr = asy.branch_trace([-0.9999])[0]
        assert np.sum(tr > 1e3) == 2
        assert np.sum(np.abs(tr - 0.5) < 1e-2) == 2

    def test_branches_are_graphs_over_m(self):
        for ms in (np.linspace(-0.95, -0.01, 60), np.linspace(0.01, 0.95, 60)):
            tr = asy.branch_trace(ms)
            assert np.all(np.diff(tr, axis=1) > 0)  # distinct at every sample, so no branch folds

    def test_certificates_on_a_fine_grid(self):
        for m in np.linspace(-0.995, 0.995, 200):
            assert set(asy.p2_certificate(float(m)).values()) == {1}

    @pytest.mark.parametrize("m", np.linspace(-0.9, 0.9, 7))
    def test_fixed_distances(self, m):
        for r in asy.solve_asymmetric(float(m), ranks=False).records:
            assert r.distances["s12"] == pytest.approx(1 / (m + 1), rel=1e-12)
            assert r.distances["s34"] == pytest.approx((m + 2) / (m + 1), rel=1e-12)

    def test_shapes_at_documented_values(self):
        assert {r.shape_kind for r in asy.solve_asymmetric(0.4, ranks=False).records} == {"Concave"}
        for r in asy.solve_asymmetric(-0.2, ranks=False).records:
            assert r.shape_kind == "Convex"
            assert same_side_of_line(r.positions.positions, 0, 1)
            assert same_side_of_line(r.positions.positions, 2, 3)

    def test_zero_boundary_records(self):
        with pytest.raises(BoundaryEvent) as exc:
            asy.solve_asymmetric(0.0)
        for r in exc.value.records:
            assert r.distances["s34"] == pytest.approx(2.0, abs=1e-12)
            # the relabelled system carries the quadratic root in s24 and has s23 = 1
            v = r.distances["s23"] if r.distances["s23"] != 1.0 else r.distances["s24"]
            assert v * v - 3 * v + 1 == pytest.approx(0, abs=1e-12)

    def test_equal_strength_distances(self):
        for r in asy.solve_asymmetric(1.0).records:
            assert set(np.round(r.distances.s, 12)) <= {0.5, 1.5}
            assert r.distances["s34"] == pytest.approx(1.5)
