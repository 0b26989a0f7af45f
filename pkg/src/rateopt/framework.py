"""Closed-form optimizers over feasible regions bounded by a weighted simplex.

A feasible region ``Theta`` is any set of nonnegative points that sits inside
the weighted simplex ``{x >= 0 : sum(b_i * x_i) <= K}``.  Whenever the
candidate point below lies in ``Theta`` it is the global optimum of

* the weighted geometric objective ``prod(x_i ** a_i)`` (weighted sum-rate
  after the ``x_i = 1 + snr_i`` shift), attained at
  ``theta_i = a_i K / (b_i sum(a))``;
* the max-min objective ``min_i x_i``, attained at ``x_i = K / sum(b)``.

Regions are black boxes (a membership predicate plus a declared bound), so
``Theta`` inside the simplex can only be certified by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "DimensionMismatch",
    "WeightVector",
    "CostVector",
    "SimplexBound",
    "FeasibleRegion",
    "FrameworkSolution",
    "omega_contains",
    "theta_point",
    "weighted_geometric_objective",
    "log_weighted_geometric_objective",
    "solve_weighted_product",
    "solve_max_min",
    "certify_region_bound",
    "simplex_region",
]

CERTIFY_RTOL = 1e-9


class DimensionMismatch(ValueError):
    pass


def _positive_tuple(values, name):
    vals = tuple(float(v) for v in values)
    if len(vals) == 0:
        raise ValueError(f"{name} must have at least one entry")
    for v in vals:
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} entries must be positive and finite, got {v!r}")
    return vals


@dataclass(frozen=True)
class WeightVector:
    """Objective weights ``a_i > 0``."""

    a: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", _positive_tuple(self.a, "a"))

    def __len__(self):
        return len(self.a)


@dataclass(frozen=True)
class CostVector:
    """Simplex coefficients ``b_i > 0``."""

    b: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", _positive_tuple(self.b, "b"))

    def __len__(self):
        return len(self.b)


@dataclass(frozen=True)
class SimplexBound:
    """The weighted simplex ``{x >= 0 : sum(b_i x_i) <= k}``."""

    b: CostVector
    k: float

    def __post_init__(self):
        if not isinstance(self.b, CostVector):
            object.__setattr__(self, "b", CostVector(self.b))
        k = float(self.k)
        if not (k > 0 and math.isfinite(k)):
            raise ValueError(f"budget k must be positive and finite, got {self.k!r}")
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        return len(self.b)

    def weighted_sum(self, x: Sequence[float]) -> float:
        _check_dim(x, self.n)
        return math.fsum(bi * float(xi) for bi, xi in zip(self.b.b, x))


@dataclass(frozen=True)
class FeasibleRegion:
    """Black-box region: a membership predicate and the simplex claimed to hold it."""

    contains: Callable[[Sequence[float]], bool]
    bound: SimplexBound

    @property
    def n(self) -> int:
        return self.bound.n


@dataclass(frozen=True)
class FrameworkSolution:
    """Candidate optimum returned by the closed-form solvers.

    ``feasible`` records whether the point passed the region's membership
    predicate.  Optimality is only claimed when it is True.
    """

    point: tuple[float, ...]
    objective: float
    feasible: bool
    log_objective: float | None = None


def _check_dim(x, n):
    if len(x) != n:
        raise DimensionMismatch(f"expected a point of dimension {n}, got {len(x)}")


def omega_contains(x: Sequence[float], bound: SimplexBound) -> bool:
    """Exact membership test ``sum(b_i x_i) <= K`` (no tolerance)."""
    _check_dim(x, bound.n)
    if any(float(xi) < 0 for xi in x):
        raise ValueError("points of the simplex have nonnegative coordinates")
    return bound.weighted_sum(x) <= bound.k


def theta_point(a: WeightVector, bound: SimplexBound) -> tuple[float, ...]:
    """Maximizer of ``prod(x_i ** a_i)`` over the simplex: ``a_i K / (b_i sum(a))``."""
    _check_dim(a.a, bound.n)
    total = math.fsum(a.a)
    return tuple(ai * bound.k / (bi * total) for ai, bi in zip(a.a, bound.b.b))


def log_weighted_geometric_objective(x: Sequence[float], a: WeightVector) -> float:
    _check_dim(x, len(a))
    x = [float(v) for v in x]
    if any(v <= 0 for v in x):
        raise ValueError("weighted geometric objective needs strictly positive coordinates")
    return math.fsum(ai * math.log(xi) for ai, xi in zip(a.a, x))


def weighted_geometric_objective(x: Sequence[float], a: WeightVector) -> float:
    """``prod(x_i ** a_i)`` evaluated as ``exp(sum(a_i ln x_i))``; inf on overflow."""
    log_val = log_weighted_geometric_objective(x, a)
    try:
        return math.exp(log_val)
    except OverflowError:
        return math.inf


def solve_weighted_product(region: FeasibleRegion, a: WeightVector) -> FrameworkSolution:
    """Closed-form maximizer of ``prod(x_i ** a_i)`` over ``region``.

    The point is always the simplex optimum; it is the region optimum only when
    the returned ``feasible`` flag is set.
    """
    _check_dim(a.a, region.n)
    point = theta_point(a, region.bound)
    if any(p <= 0 for p in point):
        raise RuntimeError(f"theta point has a nonpositive coordinate: {point}")
    log_obj = log_weighted_geometric_objective(point, a)
    try:
        obj = math.exp(log_obj)
    except OverflowError:
        obj = math.inf
    return FrameworkSolution(point, obj, bool(region.contains(point)), log_obj)


def solve_max_min(region: FeasibleRegion) -> FrameworkSolution:
    """Closed-form maximizer of ``min_i x_i``: every coordinate equals ``K / sum(b)``."""
    level = region.bound.k / math.fsum(region.bound.b.b)
    point = (level,) * region.n
    return FrameworkSolution(point, level, bool(region.contains(point)))


def certify_region_bound(
    region: FeasibleRegion,
    sampler: Iterable[Sequence[float]],
    trials: int | None = None,
    check_membership: bool = True,
) -> bool:
    """Sampled check that the region lies inside its declared simplex.

    Draws up to ``trials`` points from ``sampler`` (all of them when ``trials``
    is None).  Points rejected by ``region.contains`` are skipped unless
    ``check_membership`` is False, in which case the sampler is trusted.
    Returns False as soon as an in-region point exceeds ``K (1 + 1e-9)``.
    """
    limit = region.bound.k * (1.0 + CERTIFY_RTOL)
    for count, x in enumerate(sampler):
        if trials is not None and count >= trials:
            break
        if check_membership and not region.contains(x):
            continue
        if region.bound.weighted_sum(x) > limit:
            return False
    return True


def simplex_region(bound: SimplexBound) -> FeasibleRegion:
    """The simplex itself as a feasible region."""
    return FeasibleRegion(lambda x: omega_contains(x, bound), bound)


def uniform_simplex_sampler(bound: SimplexBound, rng: np.random.Generator):
    """Endless stream of points uniformly distributed on the simplex (volume measure)."""
    b = np.asarray(bound.b.b)
    n = bound.n
    while True:
        # Dirichlet(1, ..., 1) over n + 1 parts gives a uniform point in the unit simplex
        w = rng.dirichlet(np.ones(n + 1))[:n]
        yield tuple(w * bound.k / b)
