"""Catalog of closed convex sets with metric projections, distances, reflections.

Points are plain 1-D float arrays.  Sets of symmetric n x n matrices operate
on length-n^2 row-major vectors; the projections re-enforce symmetry so the
matrix embedding stays consistent after every operation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch, EigenFailure, NonconvergedProjection

# dist(z, C) <= MEMBERSHIP_RTOL * (1 + ||z||) counts as membership
MEMBERSHIP_RTOL = 1e-12

# Secular-equation solve for the ellipsoid projection
_ELLIPSOID_RESIDUAL_TOL = 1e-13
_ELLIPSOID_MAX_ITER = 200

# Eigenvalues below this fraction of the spectral norm clamp to exactly 0
_PSD_CLAMP_RTOL = 1e-14


def as_point(x) -> np.ndarray:
    z = np.asarray(x, dtype=float)
    if z.ndim != 1:
        z = z.reshape(-1)
    return z


@dataclass(frozen=True)
class Halfspace:
    """{x : <normal, x> <= offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", as_point(self.normal))
        object.__setattr__(self, "offset", float(self.offset))
        if not np.any(self.normal):
            raise ValueError("halfspace normal must be nonzero")

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def _project(self, z: np.ndarray) -> np.ndarray:
        a = self.normal
        viol = float(a @ z) - self.offset
        if viol <= 0.0:
            return z.copy()
        return z - (viol / float(a @ a)) * a


@dataclass(frozen=True)
class Box:
    """{x : lo <= x <= hi} componentwise."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", as_point(self.lo))
        object.__setattr__(self, "hi", as_point(self.hi))
        if self.lo.shape != self.hi.shape or np.any(self.lo > self.hi):
            raise ValueError("box requires lo <= hi of equal length")

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def _project(self, z: np.ndarray) -> np.ndarray:
        return np.clip(z, self.lo, self.hi)


@dataclass(frozen=True)
class Ball:
    """{x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0.0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def _project(self, z: np.ndarray) -> np.ndarray:
        u = z - self.center
        r = float(np.linalg.norm(u))
        if r <= self.radius:
            return z.copy()
        return self.center + (self.radius / r) * u


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned ellipsoid {x : sum_i diag_i (x_i - center_i)^2 <= 1}."""

    center: np.ndarray
    diag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "diag", as_point(self.diag))
        if self.center.shape != self.diag.shape:
            raise ValueError("ellipsoid center and diag must share length")
        if np.any(self.diag <= 0.0) or not np.all(np.isfinite(self.diag)):
            raise ValueError("ellipsoid axis scales must be positive and finite")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def quadratic(self, z: np.ndarray) -> float:
        u = z - self.center
        return float(self.diag @ (u * u))

    def _project(self, z: np.ndarray) -> np.ndarray:
        return project_ellipsoid_multiplier(self, z)[0]


@dataclass(frozen=True)
class PsdCone:
    """Symmetric positive semidefinite matrices of a given order (n^2 vector)."""

    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("PSD cone order must be >= 1")

    @property
    def dim(self) -> int:
        return self.order * self.order

    def _project(self, z: np.ndarray) -> np.ndarray:
        return project_psd(z, self.order)


@dataclass(frozen=True)
class EntryMask:
    """Matrices agreeing with prescribed values on a symmetric index set."""

    order: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=int))
        object.__setattr__(self, "cols", np.asarray(self.cols, dtype=int))
        object.__setattr__(self, "values", as_point(self.values))
        if not (len(self.rows) == len(self.cols) == len(self.values)):
            raise ValueError("rows, cols, values must have equal length")
        pinned = {}
        for i, j, v in zip(self.rows, self.cols, self.values):
            if not (0 <= i < self.order and 0 <= j < self.order):
                raise ValueError("mask index out of range")
            pinned[(int(i), int(j))] = float(v)
        for (i, j), v in pinned.items():
            if (j, i) not in pinned or pinned[(j, i)] != v:
                raise ValueError("entry mask must be symmetric with equal values")
        object.__setattr__(
            self, "_flat", (self.rows * self.order + self.cols).astype(int)
        )

    @property
    def dim(self) -> int:
        return self.order * self.order

    def _project(self, z: np.ndarray) -> np.ndarray:
        out = z.copy()
        out[self._flat] = self.values
        return out


SetDescriptor = Union[Halfspace, Box, Ball, Ellipsoid, PsdCone, EntryMask]


def project_ellipsoid_multiplier(e: Ellipsoid, z) -> tuple[np.ndarray, float]:
    """Projection onto an ellipsoid with its Lagrange multiplier.

    The multiplier solves the scalar secular equation
    phi(lam) = sum_i d_i u_i^2 / (1 + lam d_i)^2 - 1 = 0 with u = z - center;
    phi is strictly decreasing on [0, inf), so a safeguarded Newton iteration
    with bisection fallback always converges.
    """
    z = as_point(z)
    if z.shape[0] != e.dim:
        raise DimensionMismatch(f"point dim {z.shape[0]} != set dim {e.dim}")
    d = e.diag
    u = z - e.center
    du2 = d * u * u
    if float(np.sum(du2)) <= 1.0:
        return z.copy(), 0.0

    def phi(lam: float) -> float:
        w = 1.0 + lam * d
        return float(np.sum(du2 / (w * w))) - 1.0

    lo, hi = 0.0, 1.0
    for _ in range(_ELLIPSOID_MAX_ITER):
        if phi(hi) < 0.0:
            break
        lo = hi
        hi *= 2.0
    else:
        raise NonconvergedProjection("failed to bracket ellipsoid multiplier")

    lam = lo
    for _ in range(_ELLIPSOID_MAX_ITER):
        w = 1.0 + lam * d
        r = float(np.sum(du2 / (w * w))) - 1.0
        if abs(r) <= _ELLIPSOID_RESIDUAL_TOL:
            break
        if r > 0.0:
            lo = lam
        else:
            hi = lam
        dr = -2.0 * float(np.sum(du2 * d / (w * w * w)))
        step = lam - r / dr
        lam = step if lo < step < hi else 0.5 * (lo + hi)
    else:
        raise NonconvergedProjection(
            f"ellipsoid projection residual above {_ELLIPSOID_RESIDUAL_TOL}"
        )
    x = e.center + u / (1.0 + lam * d)
    return x, lam


def project_psd(z, order: int) -> np.ndarray:
    """Frobenius-nearest PSD matrix via eigenvalue clamping."""
    z = as_point(z)
    if z.shape[0] != order * order:
        raise DimensionMismatch(f"point dim {z.shape[0]} != {order}^2")
    m = z.reshape(order, order)
    m = 0.5 * (m + m.T)
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    cut = _PSD_CLAMP_RTOL * float(np.max(np.abs(vals))) if vals.size else 0.0
    vals = np.where(vals < cut, 0.0, vals)
    out = (vecs * vals) @ vecs.T
    out = 0.5 * (out + out.T)
    return out.reshape(-1)


def project(set_: SetDescriptor, z) -> np.ndarray:
    z = as_point(z)
    if z.shape[0] != set_.dim:
        raise DimensionMismatch(
            f"point dim {z.shape[0]} != set dim {set_.dim} ({type(set_).__name__})"
        )
    out = set_._project(z)
    if not np.all(np.isfinite(out)):
        raise NonconvergedProjection("projection produced non-finite entries")
    return out


def distance(set_: SetDescriptor, z) -> float:
    z = as_point(z)
    return float(np.linalg.norm(z - project(set_, z)))


def reflect(set_: SetDescriptor, z) -> np.ndarray:
    z = as_point(z)
    return 2.0 * project(set_, z) - z


def contains(set_: SetDescriptor, z, rtol: float = MEMBERSHIP_RTOL) -> bool:
    z = as_point(z)
    return distance(set_, z) <= rtol * (1.0 + float(np.linalg.norm(z)))


@dataclass
class ProblemPair:
    """A two-set feasibility instance: find z in X ∩ Y."""

    X: SetDescriptor
    Y: SetDescriptor
    z0: np.ndarray
    s_ref: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.z0 = as_point(self.z0)
        if self.s_ref is not None:
            self.s_ref = as_point(self.s_ref)
        if self.X.dim != self.Y.dim:
            raise DimensionMismatch("X and Y must share ambient dimension")
        if self.z0.shape[0] != self.X.dim:
            raise DimensionMismatch("z0 dimension does not match the sets")

    @property
    def dim(self) -> int:
        return self.X.dim


def gap(pair: ProblemPair, z) -> float:
    """Feasibility gap max{dist(z, X), dist(z, Y)}: the stopping merit."""
    return max(distance(pair.X, z), distance(pair.Y, z))
