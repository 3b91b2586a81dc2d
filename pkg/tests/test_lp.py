import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bhwstab.enumeration import count_lattice_points, list_lattice_points
from bhwstab.exceptions import MarginError
from bhwstab.geometry_core import BoxBody, LpBallBody, gauge
from bhwstab.lp import (
    betas,
    lp_bhw_comparison,
    lp_threshold_report,
    p0_exact,
    p0_paper,
    verify_lp_hull_stability,
    worst_point,
)

from oracles import box_points, lp_member, lp_points


def non_integral(rng, d, lo=1.05, hi=4.2):
    while True:
        a = rng.uniform(lo, hi, d)
        if all(abs(x - round(x)) > 1e-3 for x in a):
            return [float(x) for x in a]


class TestLogThreshold:
    def test_symmetric(self):
        assert p0_paper((1.5, 1.5)) == pytest.approx(math.log(2) / math.log(1.5), rel=1e-12)
        assert round(p0_paper((1.5, 1.5)), 5) == 1.70951

    def test_mixed(self):
        assert p0_paper((1.5, 2.5)) == pytest.approx(math.log(2) / math.log(1.25), rel=1e-12)
        assert round(p0_paper((1.5, 2.5)), 5) == 3.10628

    def test_integral(self):
        assert p0_paper((2, 2)) == math.inf

    def test_one_dimension(self):
        assert p0_paper((2.5,)) == 0


class TestExactThreshold:
    def test_symmetric_agrees(self):
        t, (lo, hi) = p0_exact((1.5, 1.5))
        assert abs(t - math.log(2) / math.log(1.5)) <= 1e-6
        assert hi - lo <= 1e-9

    def test_mixed_bracket(self):
        f = lambda p: (2 / 3) ** p + (4 / 5) ** p - 1
        assert f(2.2) > 0 > f(2.3)
        t, _ = p0_exact((1.5, 2.5))
        assert 2.2 < t < 2.3 < p0_paper((1.5, 2.5))

    def test_integral(self):
        assert p0_exact((1.0, 1.5))[0] == math.inf
        # (1, 1) against semi-axes (1.0, 1.5): the float gauge rounds to 1 at p=100
        for p in (2, 10, 100):
            assert not lp_member((1, 1), (1.0, 1.5), p)
            assert gauge(LpBallBody(p, (1.0, 1.5)), (1, 1)) >= 1
            assert (1, 1) not in list_lattice_points(LpBallBody(p, (1.5, 1.0)))

    def test_report(self):
        rep = lp_threshold_report((1.5, 2.5))
        assert rep.betas == pytest.approx((0.8, 2 / 3))
        assert rep.witness == worst_point((2.5, 1.5)) == (2, 1)
        assert rep.exact_bracket[0] <= rep.p0_exact <= rep.exact_bracket[1]

    def test_betas_skip_small(self):
        assert betas((2.5, 0.5)) == pytest.approx((0.8, 0.0))

    def test_exact_below_log_threshold_on_200(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            a = non_integral(rng, int(rng.integers(1, 5)), lo=0.3)
            if max(a) < 1:
                continue
            exact, _ = p0_exact(a)
            assert exact <= p0_paper(a) + 1e-9

    @given(st.lists(st.floats(1.01, 5.0).filter(lambda x: abs(x - round(x)) > 1e-3), min_size=2, max_size=4))
    def test_root_is_root(self, alphas):
        t, _ = p0_exact(alphas)
        b = [x for x in betas(alphas) if x > 0]
        assert abs(sum(x**t for x in b) - 1) <= 1e-6


class TestHullStability:
    def test_equal_above(self):
        res = verify_lp_hull_stability((1.5, 1.5), 2)
        assert (res.equal, res.witness, res.status) == (True, None, "ok")

    def test_unequal_below(self):
        res = verify_lp_hull_stability((1.5, 1.5), 1)
        assert (res.equal, res.witness) == (False, (1, 1))

    def test_origin_only(self):
        for p in (1, 2, math.inf):
            res = verify_lp_hull_stability((0.5, 0.5), p)
            assert res.equal and res.status == "origin_only"

    def test_margin(self):
        t, _ = p0_exact((1.5, 2.5))
        with pytest.raises(MarginError):
            verify_lp_hull_stability((1.5, 2.5), t * (1 + 1e-8))

    def test_integral_status(self):
        res = verify_lp_hull_stability((1, 1), 10)
        assert res.status == "integral_alpha" and not res.equal and res.witness == (1, 1)

    def test_threshold_behaviour_on_random_alphas(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            a = non_integral(rng, int(rng.integers(2, 4)), hi=3.6)
            exact, p_log = p0_exact(a)[0], p0_paper(a)
            above = verify_lp_hull_stability(a, p_log * (1 + 1e-6) + 1e-3)
            assert above.equal
            assert count_lattice_points(LpBallBody(p_log * 1.01, a)).count == count_lattice_points(BoxBody(a)).count
            if exact * (1 - 1e-6) >= 1:
                below = verify_lp_hull_stability(a, max(1.0, exact * 0.99))
                assert not below.equal
                assert below.witness == worst_point(a)

    def test_matches_oracle_sets(self):
        a = (2.4, 1.3)
        for p in (1, 1.5, 2, 3):
            same = lp_points(a, p) == box_points(a)
            assert verify_lp_hull_stability(a, p).equal == same


class TestMonotoneInP:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_counts_nondecreasing(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.uniform(0.5, 3.5, int(rng.integers(1, 4)))
        counts = [count_lattice_points(LpBallBody(p, a)).count for p in (1, 1.5, 2, 3, 6, math.inf)]
        assert counts == sorted(counts)


class TestComparison:
    def test_l4(self):
        c = lp_bhw_comparison((1.5, 1.5), 4)
        assert c.minima_monotone and c.rhs_monotone and c.report_p.holds and c.report_box.holds

    def test_disc_vs_square(self):
        c = lp_bhw_comparison((1, 1), 2)
        assert (c.report_p.count, c.report_box.count) == (5, 9)
        assert c.report_p.holds and c.report_box.holds

    def test_infinity_is_box(self):
        c = lp_bhw_comparison((2.3, 1.2), math.inf)
        assert (c.report_p.count, c.report_p.rhs, c.report_p.lambdas) == \
            (c.report_box.count, c.report_box.rhs, c.report_box.lambdas)
