import math

import numpy as np
import pytest

from fourvortex import census
from fourvortex.errors import BoundaryEvent, DomainError

B = census.bifurcation_values()


class TestBifurcationValues:
    def test_m_star_is_root_of_its_cubic(self):
        assert 9 * B.m_star**3 + 3 * B.m_star**2 + 7 * B.m_star + 5 == pytest.approx(0, abs=1e-14)
        assert -0.59515 < B.m_star < -0.59505

    def test_closed_forms(self):
        assert B.m_eq == pytest.approx(-2 + math.sqrt(3), abs=1e-14)
        assert B.m2 == pytest.approx((-29 + 6 * math.sqrt(6)) / 25, abs=1e-14)
        assert B.m0 == pytest.approx(-0.6833, abs=5e-5)
        assert B.m1 == pytest.approx(-0.6066, abs=5e-5)

    def test_nearest(self):
        assert B.nearest(-0.5949)[0] == "m_star"


class TestTable:
    @pytest.mark.parametrize("m, total", [(1.0, 26), (0.4, 34), (-0.2, 26), (-0.55, 18), (-0.7, 14), (-0.5, 14)])
    def test_totals(self, m, total):
        row = census.full_census(m)
        assert row.match, (row.counts, row.expected)
        assert row.total == total

    def test_degenerate_flag_only_at_equal_strengths(self):
        assert census.full_census(1.0).flags == ("degenerate-center",)
        assert census.full_census(0.4).flags == ()

    def test_subtotals(self):
        row = census.full_census(0.4)
        assert (row.subtotal("Convex"), row.subtotal("Concave"), row.subtotal("Collinear")) == (6, 16, 12)

    @pytest.mark.parametrize("m", [0.0, B.m_star + 5e-7, B.m_eq - 1e-7])
    def test_boundary_parameters_are_refused(self, m):
        with pytest.raises(BoundaryEvent):
            census.full_census(m)

    def test_domain(self):
        with pytest.raises(DomainError):
            census.full_census(-1.0)


def test_positive_lambda_records():
    for m in (0.4, -0.2, -0.3, -0.55, -0.58, -0.7, -0.9):
        for r in census.full_census(m).records:
            if r.lambda_prime > 0:
                if r.family == "rhombus-minus":
                    assert m < B.m_eq
                else:
                    assert r.family == "kite-lampos" and B.m_star < m < -0.5


def test_sweep_events_sit_at_bifurcations():
    rows, events = census.sweep(np.linspace(-0.99, 0.99, 100))
    assert all(r.match for r in rows)
    assert {e.matched for e in events} == {"m_star", "m=-1/2", "m=0"}


def test_parallel_sweep_matches_sequential():
    grid = np.linspace(-0.7, 0.6, 6)
    seq, ev_seq = census.sweep(grid)
    par, ev_par = census.sweep(grid, jobs=2)
    assert [(r.m, r.counts) for r in seq] == [(r.m, r.counts) for r in par]
    assert ev_seq == ev_par


class TestGrid:
    def test_parse(self):
        assert census.parse_grid("-0.5:0.5:3") == pytest.approx([-0.5, 0, 0.5])

    @pytest.mark.parametrize("text", ["1:2", "a:b:c", "0:1:1", "-1:0:5", "0:1.5:4"])
    def test_rejects(self, text):
        with pytest.raises(DomainError):
            census.parse_grid(text)
