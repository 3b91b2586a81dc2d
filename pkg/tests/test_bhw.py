import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bhwstab.bhw import (
    box_closed_forms,
    check_bhw,
    floor_factors,
    phi_envelope,
    rhs_floor_product,
    scalar_floor_lemma,
)
from bhwstab.geometry_core import BoxBody, LpBallBody, sample_rotation, transform_body
from bhwstab.stability import stability_radius

from oracles import lp_points


class TestRhs:
    def test_box_21(self):
        assert rhs_floor_product((0.5, 1.0)) == 5 * 3

    def test_unit(self):
        assert rhs_floor_product((1, 1, 1)) == 27

    def test_near_integer_float(self):
        # 2/(2/3) + 1 is a few ulps away from 4 in floating point
        factors, ties = floor_factors((2 / 3, 2))
        assert factors == [4, 2] and ties == [0, 1]
        assert rhs_floor_product((2 / 3, 2)) == 8

    @pytest.mark.parametrize("bad", [(0, 1), (-1,), (), (math.inf,)])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            rhs_floor_product(bad)

    @settings(max_examples=300)
    @given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=6))
    def test_below_envelope(self, lams):
        assert rhs_floor_product(lams) <= phi_envelope(lams) * (1 + 1e-9) + 1e-9


class TestPhi:
    @pytest.mark.parametrize("lams,expected", [((1, 1), 9.0), ((0.5, 1), 15.0), ((2 / 3, 2), 8.0)])
    def test_examples(self, lams, expected):
        assert phi_envelope(lams) == pytest.approx(expected, rel=1e-12)


class TestCheck:
    def test_integer_box_is_tight(self):
        rep = check_bhw(BoxBody((1, 1)))
        assert (rep.count, rep.rhs, rep.slack, rep.holds, rep.ambiguous) == (9, 9, 0, True, 0)

    def test_box_15_05(self):
        rep = check_bhw(BoxBody((1.5, 0.5)))
        assert rep.count == 3
        assert rep.lambdas == pytest.approx((2 / 3, 2), abs=1e-12)
        assert (rep.rhs, rep.slack, rep.holds) == (8, 5, True)

    def test_disc(self):
        rep = check_bhw(LpBallBody(2, (1, 1)))
        assert rep.count == len(lp_points((1, 1), 2)) == 5
        assert rep.lambdas == pytest.approx((1, 1), abs=1e-12)
        assert (rep.rhs, rep.slack, rep.holds) == (9, 4, True)

    def test_report_invariants(self):
        for body in (BoxBody((2.6, 1.2)), LpBallBody(3, (2.2, 1.7, 0.8))):
            rep = check_bhw(body)
            assert rep.rhs <= rep.phi + 1e-9
            assert rep.slack == rep.rhs - rep.count
            assert rep.holds == (rep.count <= rep.rhs)

    @pytest.mark.parametrize("p", [1, 1.5, 2, 3, 4, 8, math.inf])
    def test_holds_on_lp_balls(self, p):
        rng = np.random.default_rng(int(1000 * (p if p != math.inf else 99)))
        for _ in range(15):
            d = int(rng.integers(1, 5))
            rep = check_bhw(LpBallBody(p, rng.uniform(0.3, 3.0, d)))
            assert rep.count <= rep.rhs

    def test_holds_on_rotated_boxes_inside_radius(self):
        rng = np.random.default_rng(5)
        for k in range(20):
            d = int(rng.integers(2, 4))
            box = BoxBody(rng.uniform(0.5, 2.5, d))
            eps = 0.9 * stability_radius(box).radius
            rep = check_bhw(transform_body(sample_rotation(d, eps, k), box))
            assert rep.count <= rep.rhs


class TestClosedForms:
    def test_box_21(self):
        assert box_closed_forms(BoxBody((2, 1))) == ((0.5, 1.0), 15, 15)

    def test_box_15_05(self):
        lams, g, r = box_closed_forms(BoxBody((1.5, 0.5)))
        assert lams == pytest.approx((2 / 3, 2)) and (g, r) == (3, 8)

    def test_1d(self):
        lams, g, r = box_closed_forms(BoxBody((2.5,)))
        assert lams == pytest.approx((0.4,)) and (g, r) == (5, 6)

    def test_generic_pipeline_agrees(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            box = BoxBody(rng.uniform(0.3, 4.2, int(rng.integers(1, 5))))
            lams, g, r = box_closed_forms(box)
            rep = check_bhw(box)
            assert (rep.count, rep.rhs) == (g, r)
            assert max(abs(a - b) for a, b in zip(rep.lambdas, lams)) <= 1e-12


class TestFloorLemma:
    @pytest.mark.parametrize("x,expected", [(1.5, (3, 4, True, False)), (2.0, (5, 5, True, True)),
                                            (0.4, (1, 1, True, True))])
    def test_examples(self, x, expected):
        r = scalar_floor_lemma(x)
        assert (r.lhs, r.rhs, r.holds, r.equality) == expected

    @given(st.floats(0, 1e6))
    def test_always_holds(self, x):
        r = scalar_floor_lemma(x)
        assert r.holds
        assert r.equality == (x - math.floor(x) < 0.5)

    @pytest.mark.parametrize("x", [-0.1, math.nan, math.inf])
    def test_rejects(self, x):
        with pytest.raises(ValueError):
            scalar_floor_lemma(x)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_equality_characterisation_grid(self, d):
        fracs = [k / 10 for k in range(10)]
        for fs in itertools.product(fracs, repeat=d):
            box = BoxBody([1 + f for f in fs])
            _, g, r = box_closed_forms(box)
            assert g <= r
            assert (g == r) == all(f < 0.5 for f in fs)
