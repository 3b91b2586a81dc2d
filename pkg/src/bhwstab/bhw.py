"""Both sides of the Betke-Henk-Wills inequality G(K) <= prod floor(2/lambda_i + 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .enumeration import DEFAULT_BUDGET, count_lattice_points
from .geometry_core import DEFAULT_TAU, BoxBody, ConvexBody
from .minima import successive_minima

# distance to an integer below which a float floor is treated as a near-tie
FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class BhwReport:
    count: int
    lambdas: tuple[float, ...]
    rhs: int
    phi: float
    slack: int
    holds: bool
    ambiguous: int
    near_ties: tuple[int, ...] = ()


def _check_lambdas(lambdas: Sequence[float]) -> list[float]:
    lam = [float(v) for v in lambdas]
    if not lam:
        raise ValueError("need at least one minimum")
    for v in lam:
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"successive minima must be positive and finite, got {v!r}")
    return lam


def floor_factors(lambdas: Sequence[float]) -> tuple[list[int], list[int]]:
    """floor(2/lambda_i + 1) per index, plus the indices that were near-ties.

    A value within FLOOR_GUARD of an integer n is snapped to n: floats such as
    2/(2/3) + 1 land a few ulps either side of the true integer.
    """
    factors, ties = [], []
    for i, lam in enumerate(_check_lambdas(lambdas)):
        v = 2.0 / lam + 1.0
        n = round(v)
        if abs(v - n) <= FLOOR_GUARD:
            ties.append(i)
            factors.append(int(n))
        else:
            factors.append(math.floor(v))
    return factors, ties


def rhs_floor_product(lambdas: Sequence[float]) -> int:
    factors, _ = floor_factors(lambdas)
    return math.prod(factors)


def phi_envelope(lambdas: Sequence[float]) -> float:
    """The un-floored product prod(2/lambda_i + 1)."""
    return math.prod(2.0 / v + 1.0 for v in _check_lambdas(lambdas))


def box_closed_forms(box: BoxBody) -> tuple[tuple[float, ...], int, int]:
    """(lambdas, G, R) of an axis-aligned box by formula.

    lambda_i = 1/alpha_i, G = prod(2 floor(alpha_i) + 1), R = prod floor(2 alpha_i + 1).
    """
    lambdas = tuple(1.0 / a for a in box.alphas)
    count = math.prod(2 * math.floor(a) + 1 for a in box.alphas)
    rhs = math.prod(math.floor(2 * a + 1) for a in box.alphas)
    return lambdas, count, rhs


def check_bhw(body: ConvexBody, tau: float = DEFAULT_TAU, budget: int = DEFAULT_BUDGET,
              workers: Optional[int] = None) -> BhwReport:
    count = count_lattice_points(body, tau, budget, workers)
    minima = successive_minima(body, budget)
    factors, ties = floor_factors(minima.lambdas)
    if ties and isinstance(body, BoxBody):
        # lambdas of a box are 1/alpha_i in the stored (descending) order
        for i in ties:
            factors[i] = math.floor(2 * body.alphas[i] + 1)
    rhs = math.prod(factors)
    return BhwReport(
        count=count.count,
        lambdas=minima.lambdas,
        rhs=rhs,
        phi=phi_envelope(minima.lambdas),
        slack=rhs - count.count,
        holds=count.count <= rhs,
        ambiguous=count.ambiguous,
        near_ties=tuple(ties),
    )


@dataclass(frozen=True)
class FloorLemma:
    lhs: int
    rhs: int
    holds: bool
    equality: bool


def scalar_floor_lemma(x: float) -> FloorLemma:
    """2 floor(x) + 1 <= floor(2x + 1), with equality exactly when frac(x) < 1/2."""
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"x must be finite and nonnegative, got {x!r}")
    lhs = 2 * math.floor(x) + 1
    rhs = math.floor(2 * x + 1)
    return FloorLemma(lhs=lhs, rhs=rhs, holds=lhs <= rhs, equality=lhs == rhs)
