"""When does the L_p ball keep all lattice points of the box with the same semi-axes?

Every lattice point of the box satisfies |z_i| <= floor(alpha_i), so the
point with all coordinates at floor(alpha_i) maximises sum |z_i/alpha_i|^p.
With beta_i = floor(alpha_i)/alpha_i the exact threshold solves
sum beta_i^p = 1; the closed form ln d / -ln(max beta) comes from the cruder
bound d * max(beta)^p <= 1 and is never smaller.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .bhw import BhwReport, check_bhw
from .enumeration import DEFAULT_BUDGET, LatticePoint, lattice_set_equal
from .exceptions import MarginError
from .geometry_core import DEFAULT_TAU, BoxBody, LpBallBody, _as_alphas

BISECT_TOL = 1e-9
MARGIN_REL = 1e-6


@dataclass(frozen=True)
class LpThresholdReport:
    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    p0_paper: float
    p0_exact: float
    exact_bracket: tuple[float, float]
    witness: LatticePoint


@dataclass(frozen=True)
class HullCheck:
    equal: bool
    witness: Optional[LatticePoint]
    p: float
    p0_exact: float
    status: str


@dataclass(frozen=True)
class LpComparison:
    report_p: BhwReport
    report_box: BhwReport
    minima_monotone: bool
    rhs_monotone: bool


def _eligible(alphas: Sequence[float]) -> tuple[float, ...]:
    alphas = _as_alphas(alphas)
    if not any(math.floor(a) >= 1 for a in alphas):
        raise ValueError("need at least one semi-axis >= 1")
    return alphas


def _has_integral(alphas: Sequence[float]) -> bool:
    return any(a.is_integer() for a in alphas)


def betas(alphas: Sequence[float]) -> tuple[float, ...]:
    return tuple(math.floor(a) / a for a in _as_alphas(alphas))


def worst_point(alphas: Sequence[float]) -> LatticePoint:
    return tuple(math.floor(a) for a in _as_alphas(alphas))


def p0_paper(alphas: Sequence[float]) -> float:
    """ln d / min over non-integral alpha_i (floor >= 1) of ln(alpha_i / floor(alpha_i))."""
    alphas = _eligible(alphas)
    logs = [math.log(a / math.floor(a)) for a in alphas if math.floor(a) >= 1 and not a.is_integer()]
    if not logs:
        return math.inf
    return math.log(len(alphas)) / min(logs)


def p0_exact(alphas: Sequence[float]) -> tuple[float, tuple[float, float]]:
    """Root of p -> sum beta_i^p - 1, located by bisection to width 1e-9.

    Returns ``(inf, (inf, inf))`` when some alpha_i >= 1 is integral and d >= 2:
    that coordinate contributes 1 for every p, so the worst point never enters.
    """
    alphas = _eligible(alphas)
    if len(alphas) >= 2 and _has_integral(alphas):
        return math.inf, (math.inf, math.inf)
    bs = [b for b in (math.floor(a) / a for a in alphas) if b > 0]

    def f(p: float) -> float:
        return sum(b**p for b in bs) - 1.0

    if len(bs) == 1:
        # a single positive beta < 1: the sum is below 1 for every p > 0
        return 0.0, (0.0, 0.0)
    lo, hi = 1.0, 128.0
    if f(lo) <= 0:
        lo = 0.0
    while f(hi) > 0:
        lo, hi = hi, 2 * hi
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), (lo, hi)


def lp_threshold_report(alphas: Sequence[float]) -> LpThresholdReport:
    alphas = _eligible(alphas)
    exact, bracket = p0_exact(alphas)
    return LpThresholdReport(
        alphas=alphas,
        betas=betas(alphas),
        p0_paper=p0_paper(alphas),
        p0_exact=exact,
        exact_bracket=bracket,
        witness=worst_point(alphas),
    )


def verify_lp_hull_stability(alphas: Sequence[float], p: float, tau: float = DEFAULT_TAU,
                             budget: int = DEFAULT_BUDGET) -> HullCheck:
    """Compare the lattice sets of the L_p ball and the box with the same semi-axes.

    Equal lattice sets are equivalent to equal integer hulls here because the
    L_p ball sits inside the box.
    """
    alphas = _as_alphas(alphas)
    lp_body, box = LpBallBody(p, alphas), BoxBody(alphas)
    status = "ok"
    threshold = math.nan
    if any(math.floor(a) >= 1 for a in alphas):
        threshold, _ = p0_exact(alphas)
        if math.isinf(threshold):
            status = "integral_alpha"
        elif threshold > 0 and abs(p - threshold) <= MARGIN_REL * threshold:
            raise MarginError(f"p={p!r} is within {MARGIN_REL:g} relative of the threshold {threshold!r}")
    else:
        status = "origin_only"
    # the worst point is the lexicographic maximum of the box's lattice set, so
    # whenever it is missing from the ball it is the witness returned here
    equal, witness = lattice_set_equal(lp_body, box, tau, budget)
    return HullCheck(equal=equal, witness=witness, p=float(p), p0_exact=threshold, status=status)


def lp_bhw_comparison(alphas: Sequence[float], p: float, tau: float = DEFAULT_TAU,
                      budget: int = DEFAULT_BUDGET) -> LpComparison:
    alphas = _as_alphas(alphas)
    rp = check_bhw(LpBallBody(p, alphas), tau, budget)
    rb = check_bhw(BoxBody(alphas), tau, budget)
    return LpComparison(
        report_p=rp,
        report_box=rb,
        minima_monotone=all(a >= b - 1e-9 for a, b in zip(rp.lambdas, rb.lambdas)),
        rhs_monotone=rp.rhs <= rb.rhs,
    )
