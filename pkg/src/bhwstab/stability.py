"""Rotation experiments around axis-aligned boxes.

Three audits live here: the explicit radius Delta / (sqrt(d) (alpha_1 + Delta))
under which no exterior lattice point may enter the rotated box, strictness
of the BHW inequality for small rotations of integer boxes, and the claimed
discrete drop of at least 2^d - 1 lattice points.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bhw import floor_factors
from .enumeration import DEFAULT_BUDGET, boundary_gap_box, classify_lattice_points, count_lattice_points
from .geometry_core import (
    DEFAULT_TAU,
    BoxBody,
    cayley,
    operator_norm,
    random_skew,
    sample_rotation,
    transform_body,
)
from .minima import successive_minima

# epsilon within this relative distance of the radius is not asserted on
MARGIN_REL = 1e-6


@dataclass(frozen=True)
class StabilityRadiusReport:
    delta: float
    alpha1: float
    dim: int
    radius: float


@dataclass(frozen=True)
class RotationSweepRecord:
    grid_index: int
    sample_index: int
    eps_target: float
    epsilon: float
    seed: int
    count_rotated: int
    count_base: int
    rhs_rotated: int
    strict: bool
    drop: int
    drop_claim_holds: bool
    entered: int
    ambiguous: int
    near_ties: int
    below_radius: bool
    margin: bool


@dataclass(frozen=True)
class RadiusAudit:
    samples: int
    violations: int
    max_entered: int
    margin_excluded: int
    ambiguous_samples: int
    radius: float


def child_seed(seed: int, grid_index: int, sample_index: int) -> int:
    """Seed for one (grid point, sample) cell.

    The 64-bit output of numpy's SeedSequence keyed on the triple, so every
    cell is reproducible on its own and independent of evaluation order.
    """
    ss = np.random.SeedSequence([int(seed), int(grid_index), int(sample_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def stability_radius(box: BoxBody) -> StabilityRadiusReport:
    delta = boundary_gap_box(box)
    a1 = box.alphas[0]
    radius = delta / (math.sqrt(box.dim) * (a1 + delta))
    return StabilityRadiusReport(delta=delta, alpha1=a1, dim=box.dim, radius=radius)


def _rotated_record(box: BoxBody, R: np.ndarray, count_base: int, radius: float, tau: float,
                    budget: int) -> dict:
    d = box.dim
    eps = operator_norm(R - np.eye(d))
    body = box if eps == 0.0 else transform_body(R, box)
    pts, codes = classify_lattice_points(body, tau, budget)
    count = len(pts)
    entered = int(np.count_nonzero(~box._exact_members(pts)))
    minima = successive_minima(body, budget)
    factors, ties = floor_factors(minima.lambdas)
    rhs = math.prod(factors)
    drop = count_base - count
    return dict(
        epsilon=eps,
        count_rotated=count,
        count_base=count_base,
        rhs_rotated=rhs,
        strict=count < rhs,
        drop=drop,
        drop_claim_holds=drop >= 2**d - 1,
        entered=entered,
        ambiguous=int(np.count_nonzero(codes == 1)),
        near_ties=len(ties),
        below_radius=eps < radius,
        margin=abs(eps - radius) <= MARGIN_REL * radius,
    )


def _run_cells(fn, cells, workers: Optional[int]):
    if workers is None or workers <= 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))


def rotation_sweep(box: BoxBody, eps_grid: Sequence[float], samples_per_eps: int, seed: int,
                   tau: float = DEFAULT_TAU, budget: int = DEFAULT_BUDGET,
                   workers: Optional[int] = None) -> list[RotationSweepRecord]:
    """One record per (eps, sample): G and R of a seeded rotation of ``box``.

    Records come back sorted by (grid_index, sample_index) whatever ``workers`` is.
    """
    if samples_per_eps < 1:
        raise ValueError("samples_per_eps must be positive")
    for e in eps_grid:
        if not 0 <= e < 2:
            raise ValueError(f"eps values must lie in [0, 2), got {e!r}")
    count_base = count_lattice_points(box, tau, budget).count
    radius = stability_radius(box).radius
    cells = [(i, j) for i in range(len(eps_grid)) for j in range(samples_per_eps)]

    def work(cell):
        i, j = cell
        s = child_seed(seed, i, j)
        R = sample_rotation(box.dim, float(eps_grid[i]), s)
        fields = _rotated_record(box, R, count_base, radius, tau, budget)
        return RotationSweepRecord(grid_index=i, sample_index=j, eps_target=float(eps_grid[i]), seed=s, **fields)

    records = _run_cells(work, cells, workers)
    return sorted(records, key=lambda r: (r.grid_index, r.sample_index))


def audit_radius_guarantee(box: BoxBody, samples: int, seed: int, tau: float = DEFAULT_TAU,
                           budget: int = DEFAULT_BUDGET, workers: Optional[int] = None) -> RadiusAudit:
    """Sample rotations with ||R - I|| uniform in (0, radius) and count failures.

    A sample fails if an exterior lattice point entered, if the count grew, or
    if the BHW inequality broke.  Samples whose realised epsilon is not below
    the radius by the margin are excluded from the tally.
    """
    report = stability_radius(box)
    radius = report.radius
    if samples <= 0:
        return RadiusAudit(samples=0, violations=0, max_entered=0, margin_excluded=0, ambiguous_samples=0,
                           radius=radius)
    count_base = count_lattice_points(box, tau, budget).count

    def work(j):
        rng = np.random.default_rng(child_seed(seed, 0, j))
        eps = float(rng.uniform(0.0, radius))
        R = sample_rotation(box.dim, eps, child_seed(seed, 1, j))
        return _rotated_record(box, R, count_base, radius, tau, budget)

    recs = _run_cells(work, range(samples), workers)
    violations = excluded = 0
    for r in recs:
        if r["margin"] or not r["below_radius"]:
            excluded += 1
            continue
        if r["entered"] > 0 or r["count_rotated"] > count_base or r["count_rotated"] > r["rhs_rotated"]:
            violations += 1
    return RadiusAudit(
        samples=samples,
        violations=violations,
        max_entered=max(r["entered"] for r in recs),
        margin_excluded=excluded,
        ambiguous_samples=sum(1 for r in recs if r["ambiguous"]),
        radius=radius,
    )


def drop_along_direction(box: BoxBody, direction: np.ndarray, eps_max: float, n_steps: int,
                         tau: float = DEFAULT_TAU, budget: int = DEFAULT_BUDGET) -> list[tuple[float, int]]:
    """(epsilon, drop) along the one-parameter family cayley(t s A), t in [0, 1].

    ``direction`` is rescaled to unit operator norm; s is chosen so that the
    endpoint has ||R - I|| = eps_max.
    """
    A = np.asarray(direction, dtype=float)
    A = A / operator_norm(A)
    # ||cayley(s A) - I|| = 2 s / sqrt(1 + s^2) for unit-norm skew A
    s = eps_max / math.sqrt(4.0 - eps_max**2)
    base = count_lattice_points(box, tau, budget).count
    out = []
    for t in np.linspace(0.0, 1.0, n_steps + 1):
        R = cayley(t * s * A)
        eps = operator_norm(R - np.eye(box.dim))
        body = box if t == 0 else transform_body(R, box)
        out.append((eps, base - count_lattice_points(body, tau, budget).count))
    return out


def drop_monotonicity_findings(box: BoxBody, n_directions: int, eps_max: float, n_steps: int, seed: int,
                               tau: float = DEFAULT_TAU) -> list[dict]:
    """Places where the drop decreases as epsilon grows along a fixed direction."""
    findings = []
    for k in range(n_directions):
        A = random_skew(box.dim, np.random.default_rng(child_seed(seed, 2, k)))
        prof = drop_along_direction(box, A, eps_max, n_steps, tau)
        for (e0, d0), (e1, d1) in zip(prof, prof[1:]):
            if d1 < d0:
                findings.append({"direction": k, "eps_from": e0, "eps_to": e1, "drop_from": d0, "drop_to": d1})
    return findings
