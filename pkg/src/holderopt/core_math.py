"""Dense vectors, feasible domains with exact Euclidean projection, Bregman divergence."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np


class DimensionMismatch(ValueError):
    """Two vectors of different dimensions met in a binary operation."""


class ConvexityError(ValueError):
    """A Bregman divergence came out negative beyond numerical tolerance."""


BREGMAN_CLAMP = 1e-12


def as_vector(values) -> np.ndarray:
    """Coerce input to a finite 1-D float64 array; scalars become length-1 vectors."""
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return arr


def check_same_dim(p: np.ndarray, q: np.ndarray) -> None:
    if p.shape[0] != q.shape[0]:
        raise DimensionMismatch(
            f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}"
        )


def norm(p) -> float:
    return float(np.linalg.norm(np.asarray(p, dtype=float)))


def inner(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    check_same_dim(p, q)
    return float(np.dot(p, q))


def axpy(a: float, p, q) -> np.ndarray:
    """Return a*p + q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    check_same_dim(p, q)
    return a * p + q


@dataclass(frozen=True, eq=False)
class Ball:
    """Euclidean ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = as_vector(self.center)
        center.flags.writeable = False
        object.__setattr__(self, "center", center)
        radius = float(self.radius)
        if not (math.isfinite(radius) and radius > 0):
            raise ValueError("ball radius must be a positive finite real")
        object.__setattr__(self, "radius", radius)

    kind = "ball"

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def project(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        check_same_dim(self.center, p)
        gap = p - self.center
        dist = float(np.linalg.norm(gap))
        if dist <= self.radius:
            return p.copy()
        # Shrink by single ulps until the result verifies inside, so that
        # projecting twice returns the same floats (exact idempotence).
        scale = self.radius / dist
        out = self.center + scale * gap
        while float(np.linalg.norm(out - self.center)) > self.radius:
            scale = math.nextafter(scale, 0.0)
            out = self.center + scale * gap
        return out

    def contains(self, p, tol: float = 1e-10) -> bool:
        return norm(np.asarray(p, dtype=float) - self.center) <= self.radius + tol

    def anchor(self) -> np.ndarray:
        """A deterministic interior point (the center)."""
        return self.center.copy()

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        direction = rng.normal(size=self.dim)
        length = float(np.linalg.norm(direction))
        if length == 0.0:
            return self.anchor()
        scale = self.radius * rng.uniform() ** (1.0 / self.dim)
        return self.center + (scale / length) * direction


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box {x : lower <= x <= upper}."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = as_vector(self.lower)
        upper = as_vector(self.upper)
        check_same_dim(lower, upper)
        if np.any(lower > upper):
            raise ValueError("box requires lower <= upper componentwise")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    kind = "box"

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def project(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        check_same_dim(self.lower, p)
        return np.clip(p, self.lower, self.upper)

    def contains(self, p, tol: float = 1e-10) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))

    def anchor(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)


@dataclass(frozen=True, eq=False)
class AllSpace:
    """The whole of R^d; projection is the identity and the diameter is infinite."""

    dim_: int

    def __post_init__(self):
        if int(self.dim_) < 1:
            raise ValueError("dimension must be a positive integer")
        object.__setattr__(self, "dim_", int(self.dim_))

    kind = "all_space"

    @property
    def dim(self) -> int:
        return self.dim_

    @property
    def diameter(self) -> float:
        return math.inf

    def project(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[0] != self.dim_:
            raise DimensionMismatch(f"dimension mismatch: {p.shape[0]} vs {self.dim_}")
        return p.copy()

    def contains(self, p, tol: float = 1e-10) -> bool:
        return np.asarray(p).shape[0] == self.dim_

    def anchor(self) -> np.ndarray:
        return np.zeros(self.dim_)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(size=self.dim_)


Domain = Union[Ball, Box, AllSpace]


def project(domain: Domain, p) -> np.ndarray:
    """Exact Euclidean projection of p onto the domain."""
    return domain.project(p)


def bregman_divergence(objective, x, y, clamp: float = BREGMAN_CLAMP) -> float:
    """Divergence value(x) - value(y) - <gradient(y), x - y>.

    Round-off negatives in (-clamp, 0) are clamped to 0; anything more negative
    raises ConvexityError (non-convex objective or broken gradient).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    check_same_dim(x, y)
    gap = float(objective.value(x)) - float(objective.value(y)) - inner(
        objective.gradient(y), x - y
    )
    if gap < 0.0:
        if gap >= -clamp:
            return 0.0
        raise ConvexityError(f"negative Bregman divergence {gap:.3e}")
    return gap
