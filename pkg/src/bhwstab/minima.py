"""Successive minima against Z^d with integer witnesses."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

import numpy as np

from .enumeration import DEFAULT_BUDGET, LatticePoint, check_budget, grid_points, integer_bounds
from .exceptions import BudgetExceededError, PerturbationTooLargeError
from .geometry_core import (
    ConvexBody,
    circumradius_bound,
    gauge,
    inradius_bound,
    operator_norm,
    support_bounding_box,
    transform_body,
)

# relative slack on the enumeration level so float noise cannot drop a tied point
_LEVEL_SLACK = 1e-9


@dataclass(frozen=True)
class MinimaResult:
    lambdas: tuple[float, ...]
    witnesses: tuple[LatticePoint, ...]
    certificate_radius: float
    certificate_level: float


@dataclass(frozen=True)
class IndexBound:
    lam_body: float
    lam_transformed: float
    lower: float
    upper: float
    verdict: bool
    first_order_lower: float
    first_order_upper: float
    first_order_verdict: bool
    distortion_lower: float
    distortion_upper: float
    distortion_verdict: bool


@dataclass(frozen=True)
class LipschitzReport:
    eps: float
    eps_prime: float
    distortion: float
    per_index: tuple[IndexBound, ...]

    @property
    def holds(self) -> bool:
        return all(b.verdict for b in self.per_index)


def integer_rank(vectors: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination on Python ints."""
    rows = [[int(v) for v in vec] for vec in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("vectors have different dimensions")
    rank, prev = 0, 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col]
            rows[r] = [(p * rows[r][c] - f * rows[rank][c]) // prev for c in range(ncols)]
        prev = p
        rank += 1
        if rank == len(rows):
            break
    return rank


def _integer_complement(basis: list[LatticePoint], d: int) -> np.ndarray:
    """Integer rows spanning the orthogonal complement of span(basis).

    z lies in span(basis) exactly when every row of the result is orthogonal to z.
    """
    if not basis:
        return np.eye(d, dtype=np.int64)
    # reduced row echelon form over Q
    m = [[Fraction(v) for v in row] for row in basis]
    pivots, r = [], 0
    for c in range(d):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [v / lead for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(d) if c not in pivots]
    rows = []
    for fc in free:
        vec = [Fraction(0)] * d
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        scale = lcm(*(v.denominator for v in vec))
        rows.append([int(v * scale) for v in vec])
    out = np.array(rows, dtype=object)
    if max(abs(v) for row in rows for v in row) < 2**31:
        out = out.astype(np.int64)
    return out


def successive_minima(body: ConvexBody, budget: int = DEFAULT_BUDGET,
                      min_level: Optional[float] = None) -> MinimaResult:
    """Successive minima lambda_1 <= ... <= lambda_d of the body against Z^d.

    The standard basis vectors are independent, so lambda_d is at most the
    largest gauge among them.  Every lattice point with gauge up to that level
    lies in the integer box level * h (h the support bounding box), which is
    enumerated completely; greedy selection in ascending gauge order with an
    exact independence test then yields the minima and their witnesses.  Ties
    are broken by the lexicographically smallest representative whose first
    nonzero coordinate is positive.
    """
    d = body.dim
    level = float(np.max(gauge(body, np.eye(d))))
    if min_level is not None:
        level = max(level, float(min_level))
    hw = np.asarray(support_bounding_box(body)) * level
    bounds = integer_bounds(hw, _LEVEL_SLACK)
    try:
        check_budget(bounds, budget)
    except BudgetExceededError as exc:
        raise BudgetExceededError(f"successive minima not certifiable within budget: {exc}") from None

    pts = grid_points(bounds)
    nz = pts != 0
    has_nz = nz.any(axis=1)
    first = np.argmax(nz, axis=1)
    canonical = has_nz & (pts[np.arange(len(pts)), first] > 0)
    pts = pts[canonical]
    g = body._gauge_rows(pts.astype(float))
    keep = g <= level * (1.0 + _LEVEL_SLACK)
    pts, g = pts[keep], g[keep]
    # np.lexsort: last key is primary
    order = np.lexsort(tuple(pts[:, j] for j in range(d - 1, -1, -1)) + (g,))
    pts, g = pts[order], g[order]

    witnesses: list[LatticePoint] = []
    lambdas: list[float] = []
    pos = 0
    while len(witnesses) < d:
        N = _integer_complement(witnesses, d)
        tail = pts[pos:]
        prod = tail.astype(N.dtype) @ N.T
        hit = np.flatnonzero(np.any(prod != 0, axis=1))
        if len(hit) == 0:
            raise BudgetExceededError("fewer than d independent lattice points found below the certified level")
        idx = pos + int(hit[0])
        w = tuple(int(v) for v in pts[idx])
        assert integer_rank(witnesses + [w]) == len(witnesses) + 1
        witnesses.append(w)
        lambdas.append(float(g[idx]))
        pos = idx + 1

    return MinimaResult(
        lambdas=tuple(lambdas),
        witnesses=tuple(witnesses),
        certificate_radius=float(min(bounds)),
        certificate_level=level,
    )


def check_lipschitz_sandwich(body: ConvexBody, T, budget: int = DEFAULT_BUDGET,
                             slack: float = 1e-9) -> LipschitzReport:
    """Compare lambda_i(T K) with the inclusion bounds derived from ||T - I||.

    ``verdict`` asserts lambda_i(K)/(1+eps) <= lambda_i(TK) <= lambda_i(K)/(1-eps');
    the first-order form (1-eps')lambda <= . <= (1+eps)lambda is recorded
    alongside.  The ``distortion`` fields use kappa = circumradius/inradius of K,
    with which lambda/(1+kappa eps) <= lambda(TK) <= (1+kappa eps')lambda
    holds for every body.
    """
    T = np.asarray(T, dtype=float)
    d = body.dim
    eye = np.eye(d)
    eps = operator_norm(T - eye)
    eps_prime = operator_norm(np.linalg.inv(T) - eye)
    if eps >= 1 or eps_prime >= 1:
        raise PerturbationTooLargeError(f"need ||T-I|| < 1 and ||T^-1-I|| < 1, got {eps:.6g} and {eps_prime:.6g}")
    kappa = circumradius_bound(body) / inradius_bound(body)
    base = successive_minima(body, budget)
    moved = successive_minima(transform_body(T, body), budget)
    per_index = []
    for lk, lt in zip(base.lambdas, moved.lambdas):
        lo, hi = lk / (1 + eps), lk / (1 - eps_prime)
        flo, fhi = (1 - eps_prime) * lk, (1 + eps) * lk
        dlo, dhi = lk / (1 + kappa * eps), (1 + kappa * eps_prime) * lk
        per_index.append(IndexBound(
            lam_body=lk, lam_transformed=lt,
            lower=lo, upper=hi, verdict=lo - slack <= lt <= hi + slack,
            first_order_lower=flo, first_order_upper=fhi, first_order_verdict=flo - slack <= lt <= fhi + slack,
            distortion_lower=dlo, distortion_upper=dhi, distortion_verdict=dlo - slack <= lt <= dhi + slack,
        ))
    return LipschitzReport(eps=eps, eps_prime=eps_prime, distortion=kappa, per_index=tuple(per_index))
