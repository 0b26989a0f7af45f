"""Two-way relay network with an MRC multi-antenna relay.

Users U1 and U2 (single antenna) exchange messages through a relay with
``nr`` antennas.  With transmit powers ``p1, p2, pr`` the end-user SNRs after
self-interference cancellation are::

    g2 = p1 pr |h1|^2 |h2|^2 / (s2 ((p2 + pr)|h2|^2 + p1 |h1|^2 + s2))
    g1 = p2 pr |h1|^2 |h2|^2 / (s2 ((p1 + pr)|h1|^2 + p2 |h2|^2 + s2))

Under ``p1 + p2 + pr <= pt`` every achievable pair satisfies
``g1 + g2 <= K`` with ``K = g1r g2r / (sqrt(g1r + 1) + sqrt(g2r + 1))^2``
and ``gir = pt |hi|^2 / s2``, so the SNR region sits inside a simplex and
the closed forms in :mod:`rateopt.framework` apply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .framework import CostVector, FeasibleRegion, SimplexBound

__all__ = [
    "PRELOG",
    "WeightTooSkewed",
    "Unachievable",
    "ChannelState",
    "PowerAllocation",
    "SnrPair",
    "EffectiveGains",
    "snr_arrays",
    "snr_pair",
    "effective_gains",
    "snr_sum_budget",
    "common_rate_alpha",
    "common_rate_powers",
    "literal_common_rate_powers",
    "weighted_optimal_snrs",
    "recover_powers",
    "weighted_sum_rate",
    "common_rate",
    "relay_feasible_region",
]

# Rate prelog used by the weighted sum-rate and common-rate expressions.  The
# protocol spans three slots; the 1/2 here is configurable per call.
PRELOG = 0.5

DEFAULT_RECOVER_TOL = 1e-8
DEFAULT_REGION_TOL = 1e-6


class WeightTooSkewed(ValueError):
    """The weighted optimum has a negative SNR component (outside the orthant)."""


class Unachievable(ValueError):
    """No power split reaches the requested SNR pair within tolerance."""


@dataclass(frozen=True, eq=False)
class ChannelState:
    h1: np.ndarray
    h2: np.ndarray
    sigma2: float

    def __post_init__(self):
        h1 = np.atleast_1d(np.asarray(self.h1, dtype=complex))
        h2 = np.atleast_1d(np.asarray(self.h2, dtype=complex))
        if h1.ndim != 1 or h1.shape != h2.shape:
            raise ValueError("h1 and h2 must be vectors of the same length")
        if not np.any(h1) or not np.any(h2):
            raise ValueError("channel vectors must be nonzero")
        if not self.sigma2 > 0:
            raise ValueError("noise variance sigma2 must be positive")
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @classmethod
    def from_gains(cls, norm1_sq: float, norm2_sq: float, sigma2: float = 1.0, nr: int = 1):
        """Deterministic channel with prescribed squared norms, spread evenly over ``nr`` antennas."""
        if nr < 1:
            raise ValueError("nr must be at least 1")
        h1 = np.full(nr, math.sqrt(norm1_sq / nr), dtype=complex)
        h2 = np.full(nr, math.sqrt(norm2_sq / nr), dtype=complex)
        return cls(h1, h2, sigma2)

    @property
    def nr(self) -> int:
        return self.h1.size

    @property
    def norm1_sq(self) -> float:
        return float(np.vdot(self.h1, self.h1).real)

    @property
    def norm2_sq(self) -> float:
        return float(np.vdot(self.h2, self.h2).real)


@dataclass(frozen=True)
class PowerAllocation:
    p1: float
    p2: float
    pr: float
    pt: float

    def __post_init__(self):
        if not self.pt > 0:
            raise ValueError("total power pt must be positive")
        if min(self.p1, self.p2, self.pr) < 0:
            raise ValueError("powers must be nonnegative")
        if self.p1 + self.p2 + self.pr > self.pt * (1 + 1e-12):
            raise ValueError(
                f"powers {self.p1}, {self.p2}, {self.pr} exceed the budget {self.pt}"
            )

    @classmethod
    def from_alpha_beta(cls, alpha: float, beta: float, pt: float):
        """``p1 = a b pt``, ``p2 = (1 - a) b pt``, ``pr = (1 - b) pt``."""
        if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
            raise ValueError("alpha and beta must lie in [0, 1]")
        return cls(alpha * beta * pt, (1.0 - alpha) * beta * pt, (1.0 - beta) * pt, pt)

    @property
    def alpha_beta(self) -> tuple[float, float]:
        users = self.p1 + self.p2
        beta = users / self.pt
        alpha = self.p1 / users if users > 0 else 0.5
        return alpha, beta

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p1, self.p2, self.pr)


@dataclass(frozen=True)
class SnrPair:
    gamma1: float
    gamma2: float

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("SNRs must be nonnegative")

    def as_tuple(self) -> tuple[float, float]:
        return (self.gamma1, self.gamma2)


@dataclass(frozen=True)
class EffectiveGains:
    gamma1r: float
    gamma2r: float

    def __post_init__(self):
        if not (self.gamma1r > 0 and self.gamma2r > 0):
            raise ValueError("effective gains must be positive")


def snr_arrays(p1, p2, pr, norm1_sq, norm2_sq, sigma2):
    """Vectorised end-user SNRs; returns ``(gamma1, gamma2)`` broadcast over the inputs."""
    prod = norm1_sq * norm2_sq
    g2 = (p1 * pr / sigma2) * prod / ((p2 + pr) * norm2_sq + p1 * norm1_sq + sigma2)
    g1 = (p2 * pr / sigma2) * prod / ((p1 + pr) * norm1_sq + p2 * norm2_sq + sigma2)
    return g1, g2


def snr_pair(p: PowerAllocation, ch: ChannelState) -> SnrPair:
    g1, g2 = snr_arrays(p.p1, p.p2, p.pr, ch.norm1_sq, ch.norm2_sq, ch.sigma2)
    return SnrPair(float(g1), float(g2))


def effective_gains(ch: ChannelState, pt: float) -> EffectiveGains:
    if not pt > 0:
        raise ValueError("pt must be positive")
    return EffectiveGains(pt * ch.norm1_sq / ch.sigma2, pt * ch.norm2_sq / ch.sigma2)


def snr_sum_budget(g: EffectiveGains) -> float:
    """Largest achievable ``gamma1 + gamma2`` under the total power budget."""
    root_sum = math.sqrt(g.gamma1r + 1.0) + math.sqrt(g.gamma2r + 1.0)
    return g.gamma1r * g.gamma2r / root_sum**2


def common_rate_alpha(g: EffectiveGains) -> float:
    # sqrt(g2r+1) / (sqrt(g1r+1) + sqrt(g2r+1)); same value as the textbook
    # (-g2r - 1 + sqrt((g2r+1)(g1r+1))) / (g1r - g2r) without the 0/0 at g1r == g2r
    s1 = math.sqrt(g.gamma1r + 1.0)
    s2 = math.sqrt(g.gamma2r + 1.0)
    return s2 / (s1 + s2)


def common_rate_powers(ch: ChannelState, pt: float) -> PowerAllocation:
    """Max-min powers: half the budget at the relay, users split by the stable alpha."""
    alpha = common_rate_alpha(effective_gains(ch, pt))
    return PowerAllocation.from_alpha_beta(alpha, 0.5, pt)


def literal_common_rate_powers(ch: ChannelState, pt: float) -> tuple[float, float, float]:
    """Max-min powers in their original closed form; singular when ``g1r == g2r``."""
    g = effective_gains(ch, pt)
    g1r, g2r = g.gamma1r, g.gamma2r
    root = math.sqrt((g2r + 1.0) * (g1r + 1.0))
    den = 2.0 * (g1r - g2r)
    return (pt * (-g2r - 1.0 + root) / den, pt * (g1r + 1.0 - root) / den, pt / 2.0)


def weighted_optimal_snrs(a1: float, a2: float, g: EffectiveGains) -> SnrPair:
    """Weighted sum-rate optimal SNRs.

    Raises
    ------
    WeightTooSkewed
        If ``min(a1, a2) (1 + K) < max(a1, a2)``, i.e. the optimum of the
        shifted problem would need a negative SNR.
    """
    if not (a1 > 0 and a2 > 0):
        raise ValueError("weights must be positive")
    k = snr_sum_budget(g)
    total = a1 + a2
    gamma1 = (a1 - a2) / total + a1 / total * k
    gamma2 = (a2 - a1) / total + a2 / total * k
    if gamma1 < 0 or gamma2 < 0:
        raise WeightTooSkewed(
            f"weights ({a1}, {a2}) are too skewed for budget K={k:.6g}: "
            f"optimum would be ({gamma1:.6g}, {gamma2:.6g})"
        )
    return SnrPair(gamma1, gamma2)


def weighted_sum_rate(s: SnrPair, a1: float, a2: float, prelog: float = PRELOG) -> float:
    """``prelog * (a1 log2(1 + g1) + a2 log2(1 + g2))`` in bits per channel use."""
    return prelog * (a1 * math.log2(1.0 + s.gamma1) + a2 * math.log2(1.0 + s.gamma2))


def common_rate(s: SnrPair, prelog: float = PRELOG) -> float:
    return prelog * math.log2(1.0 + min(s.gamma1, s.gamma2))


# -- power recovery ---------------------------------------------------------

_FD_STEP = 1e-7
_MAX_NEWTON_ITER = 200
_MAX_HALVINGS = 40
_SEED_GRID = 33
_N_SEEDS = 6


def _residual(z, target, n1, n2, s2, pt):
    a, b = z
    g1, g2 = snr_arrays(a * b * pt, (1 - a) * b * pt, (1 - b) * pt, n1, n2, s2)
    return np.array([g1 - target[0], g2 - target[1]])


def _jacobian(z, target, n1, n2, s2, pt):
    jac = np.empty((2, 2))
    for j in range(2):
        lo = z.copy()
        hi = z.copy()
        lo[j] = max(z[j] - _FD_STEP, 0.0)
        hi[j] = min(z[j] + _FD_STEP, 1.0)
        jac[:, j] = (_residual(hi, target, n1, n2, s2, pt) - _residual(lo, target, n1, n2, s2, pt)) / (
            hi[j] - lo[j]
        )
    return jac


def _newton_box(z0, target, n1, n2, s2, pt, tol):
    """Damped Newton on the unit square.

    The step is the minimum-norm least-squares solution of ``J d = -r`` (the
    Jacobian is rank deficient on the boundary ``g1 + g2 = K``), projected
    back into the box and halved until the residual norm decreases.
    Returns the best iterate and its residual.
    """
    z = np.clip(np.asarray(z0, dtype=float), 0.0, 1.0)
    r = _residual(z, target, n1, n2, s2, pt)
    norm = np.linalg.norm(r)
    for _ in range(_MAX_NEWTON_ITER):
        if np.max(np.abs(r)) <= tol:
            break
        jac = _jacobian(z, target, n1, n2, s2, pt)
        step = np.linalg.lstsq(jac, -r, rcond=1e-12)[0]
        t = 1.0
        for _ in range(_MAX_HALVINGS):
            trial = np.clip(z + t * step, 0.0, 1.0)
            r_trial = _residual(trial, target, n1, n2, s2, pt)
            n_trial = np.linalg.norm(r_trial)
            if n_trial < norm:
                break
            t *= 0.5
        else:
            break  # stalled: no descent along the Newton direction
        if norm - n_trial <= 1e-15 * max(norm, 1.0):
            z, r, norm = trial, r_trial, n_trial
            break
        z, r, norm = trial, r_trial, n_trial
    return z, r


def recover_powers(
    target: SnrPair,
    ch: ChannelState,
    pt: float,
    tol: float = DEFAULT_RECOVER_TOL,
) -> PowerAllocation:
    """Find powers on ``p1 + p2 + pr = pt`` whose SNR pair matches ``target``.

    Newton iteration on ``(alpha, beta)`` starting from (0.5, 0.5); if that
    stalls above ``tol`` the best points of a 33 x 33 grid seed further runs.

    Raises
    ------
    Unachievable
        If no run brings every SNR component within ``tol`` of the target.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    tgt = np.array(target.as_tuple(), dtype=float)
    n1, n2, s2 = ch.norm1_sq, ch.norm2_sq, ch.sigma2
    # iterate well past ``tol`` so a loose tolerance still returns a converged split
    inner_tol = min(tol, 1e-12 * max(1.0, float(tgt.max())))

    z, r = _newton_box((0.5, 0.5), tgt, n1, n2, s2, pt, inner_tol)
    best_z, best_err = z, float(np.max(np.abs(r)))
    if best_err > tol:
        grid = np.linspace(0.0, 1.0, _SEED_GRID)
        aa, bb = np.meshgrid(grid, grid)
        g1, g2 = snr_arrays(aa * bb * pt, (1 - aa) * bb * pt, (1 - bb) * pt, n1, n2, s2)
        err = np.hypot(g1 - tgt[0], g2 - tgt[1]).ravel()
        for idx in np.argsort(err, kind="stable")[:_N_SEEDS]:
            z, r = _newton_box((aa.flat[idx], bb.flat[idx]), tgt, n1, n2, s2, pt, inner_tol)
            e = float(np.max(np.abs(r)))
            if e < best_err:
                best_z, best_err = z, e
            if best_err <= tol:
                break
    if best_err > tol:
        raise Unachievable(
            f"target SNRs {target.as_tuple()} not reachable within {tol:g} "
            f"(closest residual {best_err:.3g})"
        )
    return PowerAllocation.from_alpha_beta(float(best_z[0]), float(best_z[1]), pt)


def relay_feasible_region(
    ch: ChannelState,
    pt: float,
    tol: float = DEFAULT_REGION_TOL,
    shifted: bool = False,
) -> FeasibleRegion:
    """The achievable SNR region as a :class:`FeasibleRegion`.

    Membership means :func:`recover_powers` succeeds within ``tol``.  With
    ``shifted=True`` points are ``(1 + g1, 1 + g2)`` and the declared budget
    becomes ``2 + K``.
    """
    k = snr_sum_budget(effective_gains(ch, pt))
    offset = 1.0 if shifted else 0.0

    def contains(x) -> bool:
        g1, g2 = float(x[0]) - offset, float(x[1]) - offset
        if g1 < -tol or g2 < -tol:
            return False
        try:
            recover_powers(SnrPair(max(g1, 0.0), max(g2, 0.0)), ch, pt, tol)
        except Unachievable:
            return False
        return True

    return FeasibleRegion(contains, SimplexBound(CostVector((1.0, 1.0)), k + 2 * offset))
