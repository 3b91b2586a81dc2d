"""Brute-force lattice point enumeration over Z^d."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import AmbiguityError, BudgetExceededError
from .geometry_core import (
    DEFAULT_TAU,
    BoxBody,
    ConvexBody,
    classify_values,
    resolve_ambiguous,
    support_bounding_box,
)

DEFAULT_BUDGET = 10**8
# rows evaluated per vectorised batch inside a slab
_BATCH = 1 << 18

LatticePoint = tuple[int, ...]


@dataclass(frozen=True)
class CountReport:
    count: int
    ambiguous: int
    tau: float


def integer_bounds(half_widths, tau: float = DEFAULT_TAU) -> tuple[int, ...]:
    """Integer half-widths covering (1 + tau) times the given box."""
    return tuple(int(math.floor(h * (1.0 + tau) + 1e-12)) for h in half_widths)


def candidate_count(bounds) -> int:
    return math.prod(2 * b + 1 for b in bounds)


def check_budget(bounds, budget: int) -> None:
    n = candidate_count(bounds)
    if n > budget:
        raise BudgetExceededError(f"{n} candidate points exceed the budget of {budget}")


def grid_points(bounds, first_axis: Optional[tuple[int, int]] = None) -> np.ndarray:
    """All integer points with |z_i| <= bounds[i], in lexicographic order.

    ``first_axis`` restricts the first coordinate to an inclusive range.
    """
    ranges = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    if first_axis is not None:
        ranges[0] = np.arange(first_axis[0], first_axis[1] + 1, dtype=np.int64)
    mesh = np.meshgrid(*ranges, indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, len(bounds))


def _slabs(b0: int, shards: int) -> list[tuple[int, int]]:
    values = np.arange(-b0, b0 + 1)
    parts = np.array_split(values, max(1, min(shards, len(values))))
    return [(int(p[0]), int(p[-1])) for p in parts if len(p)]


def _classify_slab(body: ConvexBody, bounds, slab, tau: float):
    pts = grid_points(bounds, slab)
    codes = np.empty(len(pts), dtype=np.int8)
    for start in range(0, len(pts), _BATCH):
        chunk = pts[start:start + _BATCH]
        codes[start:start + _BATCH] = classify_values(body._gauge_rows(chunk.astype(float)), tau)
    return pts, resolve_ambiguous(body, pts, codes)


def _map_slabs(fn, slabs, workers: Optional[int]):
    if workers is None or workers <= 1 or len(slabs) == 1:
        return [fn(s) for s in slabs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, slabs))


def classify_lattice_points(body: ConvexBody, tau: float = DEFAULT_TAU, budget: int = DEFAULT_BUDGET,
                            workers: Optional[int] = None, shards: Optional[int] = None):
    """Members of the body in lexicographic order, with membership codes (0 inside, 1 ambiguous)."""
    bounds = integer_bounds(support_bounding_box(body), tau)
    check_budget(bounds, budget)
    slabs = _slabs(bounds[0], shards if shards is not None else (workers or 1))

    def work(slab):
        pts, codes = _classify_slab(body, bounds, slab, tau)
        keep = codes <= 1
        return pts[keep], codes[keep]

    parts = _map_slabs(work, slabs, workers)
    pts = np.concatenate([p for p, _ in parts])
    codes = np.concatenate([c for _, c in parts])
    return pts, codes


def count_lattice_points(body: ConvexBody, tau: float = DEFAULT_TAU, budget: int = DEFAULT_BUDGET,
                         workers: Optional[int] = None, shards: Optional[int] = None) -> CountReport:
    """G(K, Z^d) under the closed-body convention.

    Boundary-ambiguous points count as members and are tallied separately.
    Sharding splits the first axis into slabs; counts merge by summation so
    the report does not depend on ``workers`` or ``shards``.
    """
    bounds = integer_bounds(support_bounding_box(body), tau)
    check_budget(bounds, budget)
    slabs = _slabs(bounds[0], shards if shards is not None else (workers or 1))

    def work(slab):
        _, codes = _classify_slab(body, bounds, slab, tau)
        return int(np.count_nonzero(codes <= 1)), int(np.count_nonzero(codes == 1))

    parts = _map_slabs(work, slabs, workers)
    return CountReport(count=sum(c for c, _ in parts), ambiguous=sum(a for _, a in parts), tau=tau)


def list_lattice_points(body: ConvexBody, tau: float = DEFAULT_TAU, budget: int = DEFAULT_BUDGET,
                        workers: Optional[int] = None) -> list[LatticePoint]:
    pts, _ = classify_lattice_points(body, tau, budget, workers)
    return [tuple(int(v) for v in row) for row in pts]


def verify_cover(body: ConvexBody, tau: float = DEFAULT_TAU, budget: int = DEFAULT_BUDGET) -> bool:
    """True when no lattice point just outside the reported bounding box is a member.

    Scans the shell of the bounding box enlarged by one in every axis.
    """
    bounds = integer_bounds(support_bounding_box(body), tau)
    big = tuple(b + 1 for b in bounds)
    check_budget(big, budget)
    pts = grid_points(big)
    shell = np.any(np.abs(pts) > np.asarray(bounds), axis=1)
    shell_pts = pts[shell]
    codes = resolve_ambiguous(body, shell_pts, classify_values(body._gauge_rows(shell_pts.astype(float)), tau))
    return not np.any(codes <= 1)


def boundary_gap_box(box: BoxBody, budget: int = DEFAULT_BUDGET) -> float:
    """Euclidean distance from the box to the nearest lattice point outside it.

    Computed by brute force over the bounding box enlarged by 2 and checked
    against min_i(floor(alpha_i) + 1 - alpha_i).
    """
    if not isinstance(box, BoxBody):
        raise TypeError("the boundary gap is defined for BoxBody only")
    alphas = np.asarray(box.alphas)
    bounds = tuple(int(math.floor(a)) + 2 for a in box.alphas)
    check_budget(bounds, budget)
    pts = np.abs(grid_points(bounds)).astype(float)
    excess = np.maximum(pts - alphas, 0.0)
    outside = np.any(pts > alphas, axis=1)
    brute = float(np.sqrt(np.min(np.sum(excess[outside] ** 2, axis=1))))
    closed = min(math.floor(a) + 1 - a for a in box.alphas)
    if abs(brute - closed) > 1e-12:
        raise AssertionError(f"boundary gap mismatch: brute force {brute!r} vs closed form {closed!r}")
    return brute


def lattice_set_equal(a: ConvexBody, b: ConvexBody, tau: float = DEFAULT_TAU,
                      budget: int = DEFAULT_BUDGET) -> tuple[bool, Optional[LatticePoint]]:
    """Compare K_a and K_b by their lattice point sets.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is the
    lexicographically greatest point of the symmetric difference.  Raises
    AmbiguityError if a point of the difference is a boundary-ambiguous member.
    """
    if a.dim != b.dim:
        raise ValueError("bodies have different dimensions")
    pa, ca = classify_lattice_points(a, tau, budget)
    pb, cb = classify_lattice_points(b, tau, budget)
    ma = {tuple(int(v) for v in p): int(c) for p, c in zip(pa, ca)}
    mb = {tuple(int(v) for v in p): int(c) for p, c in zip(pb, cb)}
    diff = set(ma).symmetric_difference(mb)
    if not diff:
        return True, None
    ambiguous = sorted(z for z in diff if ma.get(z, mb.get(z)) == 1)
    if ambiguous:
        raise AmbiguityError(f"boundary-ambiguous point(s) in the symmetric difference, e.g. {ambiguous[0]}")
    return False, max(diff)
