"""Gauge-represented o-symmetric convex bodies and the linear algebra around them.

Every body is an immutable value exposing its Minkowski functional.  Three
kinds exist: axis-aligned boxes, weighted L_p balls and linear images of
either.  Lattice questions are always asked against Z^d; a general lattice
A Z^d is handled by pulling the body back through A^{-1}.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .exceptions import SingularTransformError

DEFAULT_TAU = 1e-9
DET_TOL = 1e-12


def _as_alphas(alphas) -> tuple[float, ...]:
    vals = tuple(float(a) for a in alphas)
    if len(vals) == 0:
        raise ValueError("a body needs at least one semi-axis")
    for a in vals:
        if not math.isfinite(a) or a <= 0:
            raise ValueError(f"semi-axes must be finite and positive, got {a!r}")
    return tuple(sorted(vals, reverse=True))


@dataclass(frozen=True)
class BoxBody:
    """Axis-aligned box prod [-alpha_i, alpha_i], semi-axes kept descending."""

    alphas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphas", _as_alphas(self.alphas))

    @property
    def dim(self) -> int:
        return len(self.alphas)

    def _gauge_rows(self, X: np.ndarray) -> np.ndarray:
        return np.max(np.abs(X) / np.asarray(self.alphas), axis=1)

    def _half_widths(self) -> np.ndarray:
        return np.asarray(self.alphas)

    def _circumradius(self) -> float:
        return float(np.linalg.norm(self.alphas))

    def _inradius(self) -> float:
        return self.alphas[-1]

    def _exact_members(self, Z: np.ndarray) -> np.ndarray:
        # integer-vs-float comparisons are exact
        return np.all(np.abs(Z) <= np.asarray(self.alphas), axis=1)


@dataclass(frozen=True)
class LpBallBody:
    """Weighted L_p ball {x : sum |x_i/alpha_i|^p <= 1}; p may be math.inf."""

    p: float
    alphas: tuple[float, ...]

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1:
            raise ValueError(f"p must lie in [1, inf], got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "alphas", _as_alphas(self.alphas))

    @property
    def dim(self) -> int:
        return len(self.alphas)

    def _gauge_rows(self, X: np.ndarray) -> np.ndarray:
        ratios = np.abs(X) / np.asarray(self.alphas)
        m = np.max(ratios, axis=1)
        if math.isinf(self.p):
            return m
        # factor out the max so large p never overflows
        safe = np.where(m > 0, m, 1.0)
        s = np.sum((ratios / safe[:, None]) ** self.p, axis=1)
        return np.where(m > 0, m * s ** (1.0 / self.p), 0.0)

    def _half_widths(self) -> np.ndarray:
        return np.asarray(self.alphas)

    def _circumradius(self) -> float:
        # contained in the box with the same semi-axes
        return float(np.linalg.norm(self.alphas))

    def _inradius(self) -> float:
        if math.isinf(self.p):
            return self.alphas[-1]
        return self.alphas[-1] / self.dim ** (1.0 / self.p)

    def _exact_members(self, Z: np.ndarray) -> Optional[np.ndarray]:
        if math.isinf(self.p):
            return np.all(np.abs(Z) <= np.asarray(self.alphas), axis=1)
        if not self.p.is_integer():
            return None
        k = int(self.p)
        alphas = [Fraction(a) for a in self.alphas]
        return np.array([sum((Fraction(abs(int(z))) / a) ** k for z, a in zip(row, alphas)) <= 1 for row in Z],
                        dtype=bool)


@dataclass(frozen=True, eq=False)
class TransformedBody:
    """The image T K of an inner body K.  T^{-1} is cached at construction."""

    transform: np.ndarray
    inner: "ConvexBody"
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        T = _as_square(self.transform)
        if T.shape[0] != self.inner.dim:
            raise ValueError(f"transform is {T.shape[0]}x{T.shape[0]} but body has dimension {self.inner.dim}")
        if abs(np.linalg.det(T)) <= DET_TOL:
            raise SingularTransformError("transform is singular (|det| <= 1e-12)")
        T = T.copy()
        T.flags.writeable = False
        inv = np.linalg.inv(T)
        inv.flags.writeable = False
        object.__setattr__(self, "transform", T)
        object.__setattr__(self, "inverse", inv)

    @property
    def dim(self) -> int:
        return self.inner.dim

    def _gauge_rows(self, X: np.ndarray) -> np.ndarray:
        # column accumulation instead of BLAS so every row's result is
        # independent of batch size (sharded counts must match serial ones)
        inv = self.inverse
        Y = X[:, :1] * inv[:, 0]
        for j in range(1, X.shape[1]):
            Y = Y + X[:, j:j + 1] * inv[:, j]
        return self.inner._gauge_rows(Y)

    def _half_widths(self) -> np.ndarray:
        # T K sits inside T(bounding box of K); |(T y)_i| <= sum_j |T_ij| h_j
        return np.abs(self.transform) @ self.inner._half_widths()

    def _circumradius(self) -> float:
        return operator_norm(self.transform) * self.inner._circumradius()

    def _inradius(self) -> float:
        return self.inner._inradius() / operator_norm(self.inverse)

    def _exact_members(self, Z: np.ndarray) -> Optional[np.ndarray]:
        return None


ConvexBody = Union[BoxBody, LpBallBody, TransformedBody]


class MembershipClass(enum.Enum):
    INSIDE = "inside"
    BOUNDARY_AMBIGUOUS = "boundary_ambiguous"
    OUTSIDE = "outside"


def _as_square(M) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _as_points(body: ConvexBody, x) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != body.dim:
        raise ValueError(f"point dimension {X.shape[-1]} does not match body dimension {body.dim}")
    if not np.all(np.isfinite(X)):
        raise ValueError("points must be finite")
    return X, single


def gauge(body: ConvexBody, x):
    """Minkowski functional ||x||_K.

    ``x`` may be a single point (returns a float) or an ``(n, d)`` array
    (returns an array of n gauge values).
    """
    X, single = _as_points(body, x)
    g = body._gauge_rows(X)
    return float(g[0]) if single else g


def classify_values(values, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Vectorised membership codes: 0 inside, 1 ambiguous, 2 outside."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    v = np.asarray(values, dtype=float)
    codes = np.ones(v.shape, dtype=np.int8)
    codes[v < 1.0 - tau] = 0
    codes[v > 1.0 + tau] = 2
    return codes


_CODE_TO_CLASS = (MembershipClass.INSIDE, MembershipClass.BOUNDARY_AMBIGUOUS, MembershipClass.OUTSIDE)


def resolve_ambiguous(body: ConvexBody, Z: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Re-decide ambiguous integer points exactly when the body allows it.

    Boxes, L_inf balls and L_p balls with integer p admit exact rational
    membership tests on integer points; for those, code 1 is replaced by 0
    (member, possibly on the boundary) or 2.  Other bodies keep code 1.
    """
    amb = np.flatnonzero(codes == 1)
    if len(amb) == 0:
        return codes
    exact = body._exact_members(Z[amb])
    if exact is None:
        return codes
    out = codes.copy()
    out[amb] = np.where(exact, 0, 2)
    return out


def classify_gauge_value(value: float, tau: float = DEFAULT_TAU) -> MembershipClass:
    return _CODE_TO_CLASS[int(classify_values(value, tau))]


def classify_membership(body: ConvexBody, x, tau: float = DEFAULT_TAU) -> MembershipClass:
    return classify_gauge_value(gauge(body, x), tau)


def support_bounding_box(body: ConvexBody) -> tuple[float, ...]:
    """Per-axis half-widths h_i with |x_i| <= h_i for every x in the body.

    Exact for boxes and L_p balls.  For a linear image T K the bound
    sum_j |T_ij| h_j(K) is used, which is exact when K is a box and may be
    loose (never too small) otherwise.
    """
    return tuple(float(h) for h in body._half_widths())


def circumradius_bound(body: ConvexBody) -> float:
    """Upper bound on max ||x||_2 over the body."""
    return body._circumradius()


def inradius_bound(body: ConvexBody) -> float:
    """Lower bound on the radius of the largest Euclidean ball inside the body."""
    return body._inradius()


def operator_norm(M) -> float:
    """Spectral norm (largest singular value)."""
    A = _as_square(M)
    if not A.any():
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def cayley(A) -> np.ndarray:
    """Cayley transform (I - A)(I + A)^{-1} of a skew-symmetric matrix."""
    A = _as_square(A)
    eye = np.eye(A.shape[0])
    # solve on the transposed system: R = (I - A) (I + A)^{-1}  <=>  R^T = (I + A)^{-T} (I - A)^T
    return np.linalg.solve((eye + A).T, (eye - A).T).T


def random_skew(d: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((d, d))
    return G - G.T


def rotation_2d(theta: float, d: int = 2) -> np.ndarray:
    """Rotation by ``theta`` in the plane of the first two axes."""
    if d < 2:
        raise ValueError("a plane rotation needs d >= 2")
    R = np.eye(d)
    c, s = math.cos(theta), math.sin(theta)
    R[0, 0], R[0, 1], R[1, 0], R[1, 1] = c, -s, s, c
    return R


def sample_rotation(d: int, eps_target: float, seed: int) -> np.ndarray:
    """Seeded rotation R in SO(d) with ||R - I|| close to ``eps_target``.

    A random skew direction is drawn from ``seed`` and normalised; the
    Cayley scale that hits the target is known in closed form.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    if not (0.0 <= eps_target < 2.0):
        raise ValueError(f"eps_target must lie in [0, 2), got {eps_target!r}")
    if eps_target == 0.0:
        return np.eye(d)
    if d == 1:
        raise ValueError("SO(1) is trivial; only eps_target = 0 is reachable")
    A = random_skew(d, np.random.default_rng(seed))
    A = A / operator_norm(A)
    # the Cayley image of a unit-norm skew sA is normal with ||R - I|| = 2s / sqrt(1 + s^2)
    s = eps_target / math.sqrt(4.0 - eps_target**2)
    return cayley(s * A)


def sample_perturbation(d: int, norm: float, seed: int) -> np.ndarray:
    """I + E with E a seeded Gaussian matrix rescaled to ||E|| = ``norm``."""
    if norm < 0:
        raise ValueError("norm must be nonnegative")
    E = np.random.default_rng(seed).standard_normal((d, d))
    n = operator_norm(E)
    return np.eye(d) + (E * (norm / n) if n > 0 else 0.0)


def transform_body(T, body: ConvexBody) -> TransformedBody:
    """The image T K.  Nested images collapse into one matrix product."""
    T = _as_square(T)
    if isinstance(body, TransformedBody):
        return TransformedBody(T @ body.transform, body.inner)
    return TransformedBody(T, body)


def reduce_to_standard_lattice(body: ConvexBody, basis) -> TransformedBody:
    """Body A^{-1} K whose Z^d counts and minima equal those of K against A Z^d."""
    A = _as_square(basis)
    if abs(np.linalg.det(A)) <= DET_TOL:
        raise SingularTransformError("lattice basis is singular")
    return transform_body(np.linalg.inv(A), body)


def scale_body(body: ConvexBody, s: float) -> ConvexBody:
    """s K for s > 0, keeping the body kind where possible."""
    if not s > 0:
        raise ValueError("scale must be positive")
    if isinstance(body, BoxBody):
        return BoxBody(tuple(s * a for a in body.alphas))
    if isinstance(body, LpBallBody):
        return LpBallBody(body.p, tuple(s * a for a in body.alphas))
    return transform_body(s * np.eye(body.dim), body)


def describe_body(body: ConvexBody) -> dict:
    if isinstance(body, BoxBody):
        return {"kind": "box", "alphas": list(body.alphas)}
    if isinstance(body, LpBallBody):
        return {"kind": "lp", "p": body.p, "alphas": list(body.alphas)}
    return {"kind": "transformed", "transform": body.transform.tolist(), "inner": describe_body(body.inner)}
