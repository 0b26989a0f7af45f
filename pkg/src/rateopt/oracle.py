"""Independent checks for the relay closed forms.

* exhaustive grid search over the ``(alpha, beta)`` power parametrisation;
* uniform power allocation baseline;
* seeded Rayleigh channel draws and Monte Carlo rate sweeps;
* a symbol-level simulation of the relay chain (receive, MRC forward,
  self-interference cancellation) that measures SNRs empirically;
* finite-difference and grid checks of the sum-SNR budget.

Randomness
----------
All draws come from ``numpy.random.Generator(PCG64)``.  ``draw_channel``
seeds it with a 64-bit integer; the complex Gaussian entries are
``sqrt(var / 2) * (N + jN)`` with ``N`` from numpy's ziggurat normal sampler.
Per-trial seeds in a sweep are derived as::

    SeedSequence([master_seed, budget_index, trial_index]).generate_state(1, uint64)[0]

so every trial is reproducible on its own and results do not depend on how
trials are scheduled across threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .relay import (
    PRELOG,
    ChannelState,
    PowerAllocation,
    SnrPair,
    WeightTooSkewed,
    common_rate,
    common_rate_alpha,
    common_rate_powers,
    effective_gains,
    snr_arrays,
    snr_pair,
    snr_sum_budget,
    weighted_optimal_snrs,
    weighted_sum_rate,
)

__all__ = [
    "POLICIES",
    "GridSearchResult",
    "FadingModel",
    "SweepResult",
    "grid_axis",
    "grid_search",
    "upa_allocation",
    "trial_seed",
    "draw_channel",
    "signal_snr_estimate",
    "stationarity_check",
    "sum_budget_via_grid",
    "monte_carlo_sweep",
    "resolve_threads",
]

POLICIES = ("closed-form", "grid-search", "upa")
THREADS_ENV = "RATEOPT_THREADS"


@dataclass(frozen=True)
class GridSearchResult:
    best_alpha: float
    best_beta: float
    best_powers: PowerAllocation
    best_snrs: SnrPair
    objective: float
    step: float


@dataclass(frozen=True)
class FadingModel:
    nr: int
    var1: float
    var2: float
    noise_var: float = 1.0

    def __post_init__(self):
        if self.nr < 1:
            raise ValueError("nr must be at least 1")
        if not (self.var1 > 0 and self.var2 > 0 and self.noise_var > 0):
            raise ValueError("all variances must be positive")


@dataclass
class SweepResult:
    pt_grid: list[float]
    mean_rates: dict[str, list[float]]
    stderrs: dict[str, list[float]]
    trials: int
    seed: int
    weights: tuple[float, float] | None = None
    # trials per budget where the weighted closed form left the SNR orthant
    skewed: list[int] = field(default_factory=list)


def grid_axis(step: float) -> np.ndarray:
    """``{0, step, 2 step, ..., 1}``; ``1 / step`` must be (close to) an integer."""
    if not 0 < step <= 1:
        raise ValueError("step must lie in (0, 1]")
    n = round(1.0 / step)
    if abs(n * step - 1.0) > 1e-9:
        raise ValueError(f"step {step} does not divide [0, 1] evenly")
    return np.linspace(0.0, 1.0, n + 1)


def _grid_snrs(ch: ChannelState, pt: float, step: float):
    axis = grid_axis(step)
    # rows index beta, columns alpha, so a row-major argmax prefers small (beta, alpha)
    alpha, beta = np.meshgrid(axis, axis)
    g1, g2 = snr_arrays(
        alpha * beta * pt, (1 - alpha) * beta * pt, (1 - beta) * pt,
        ch.norm1_sq, ch.norm2_sq, ch.sigma2,
    )
    return alpha, beta, g1, g2


def grid_search(
    ch: ChannelState,
    pt: float,
    step: float = 0.001,
    weights: tuple[float, float] | None = None,
    prelog: float = PRELOG,
) -> GridSearchResult:
    """Exhaustive search of the ``(alpha, beta)`` grid.

    Maximizes ``min(g1, g2)`` when ``weights`` is None, otherwise the weighted
    sum-rate with those weights.  Ties go to the smallest ``beta``, then
    ``alpha``.
    """
    alpha, beta, g1, g2 = _grid_snrs(ch, pt, step)
    if weights is None:
        score = np.minimum(g1, g2)
    else:
        a1, a2 = weights
        score = prelog * (a1 * np.log2(1 + g1) + a2 * np.log2(1 + g2))
    idx = int(np.argmax(score))
    a, b = float(alpha.flat[idx]), float(beta.flat[idx])
    powers = PowerAllocation.from_alpha_beta(a, b, pt)
    return GridSearchResult(a, b, powers, SnrPair(float(g1.flat[idx]), float(g2.flat[idx])),
                            float(score.flat[idx]), step)


def sum_budget_via_grid(ch: ChannelState, pt: float, step: float = 0.001) -> float:
    """Largest ``g1 + g2`` over the ``(alpha, beta)`` grid."""
    _, _, g1, g2 = _grid_snrs(ch, pt, step)
    return float(np.max(g1 + g2))


def upa_allocation(pt: float) -> PowerAllocation:
    """Uniform split of the budget between both users and the relay."""
    third = pt / 3.0
    return PowerAllocation(third, third, pt - 2.0 * third, pt)


def trial_seed(master_seed: int, budget_index: int, trial_index: int) -> int:
    ss = np.random.SeedSequence([master_seed, budget_index, trial_index])
    return int(ss.generate_state(1, np.uint64)[0])


def _complex_gaussian(rng: np.random.Generator, var: float, size) -> np.ndarray:
    scale = math.sqrt(var / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def draw_channel(model: FadingModel, seed: int) -> ChannelState:
    """Rayleigh channel: i.i.d. CN(0, var) entries, fully determined by ``seed``."""
    rng = np.random.default_rng(seed)
    h1 = _complex_gaussian(rng, model.var1, model.nr)
    h2 = _complex_gaussian(rng, model.var2, model.nr)
    return ChannelState(h1, h2, model.noise_var)


def signal_snr_estimate(
    p: PowerAllocation,
    ch: ChannelState,
    symbols: int = 100_000,
    seed: int = 0,
    chunk: int = 10_000,
) -> SnrPair:
    """Empirical end-user SNRs from a symbol-level simulation.

    Each symbol period the users send unit-energy QPSK symbols, the relay
    receives ``y_r = sqrt(p1) h1 x1 + sqrt(p2) h2 x2 + n_r``, applies the
    rank-one MRC matrix towards each user with gain
    ``k = sqrt(pr / (p1 |h1|^2 + p2 |h2|^2 + s2))`` and the user adds its own
    noise.  Each user removes its own relayed symbol using the known channel.
    The chain is linear, so the signal and noise parts of the cleaned output
    are pushed through it separately; the SNR is the ratio of their empirical
    powers.
    """
    if symbols < 1:
        raise ValueError("symbols must be positive")
    h1, h2, s2 = ch.h1, ch.h2, ch.sigma2
    n1 = np.linalg.norm(h1)
    n2 = np.linalg.norm(h2)
    k = math.sqrt(p.pr / (p.p1 * n1**2 + p.p2 * n2**2 + s2))
    # forward matrices conj(hj) hi^H / (|hi| |hj|); delivery to user j is hj^T (.)
    w1 = np.outer(h1.conj(), h2.conj()) / (n1 * n2)
    w2 = np.outer(h2.conj(), h1.conj()) / (n1 * n2)
    to_u1 = k * (h1 @ w1)  # row vector applied to the relay receive signal
    to_u2 = k * (h2 @ w2)

    rng = np.random.default_rng(seed)
    qpsk = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / math.sqrt(2.0)
    sig1 = noise1 = sig2 = noise2 = 0.0
    done = 0
    while done < symbols:
        m = min(chunk, symbols - done)
        x1 = qpsk[rng.integers(0, 4, m)]
        x2 = qpsk[rng.integers(0, 4, m)]
        n_r = _complex_gaussian(rng, s2, (ch.nr, m))
        n_u1 = _complex_gaussian(rng, s2, m)
        n_u2 = _complex_gaussian(rng, s2, m)

        part1 = math.sqrt(p.p1) * np.outer(h1, x1)
        part2 = math.sqrt(p.p2) * np.outer(h2, x2)
        y_r = part1 + part2 + n_r
        y1 = to_u1 @ y_r + n_u1
        y2 = to_u2 @ y_r + n_u2
        # self-interference: each user regenerates its own relayed symbol
        y1_hat = y1 - to_u1 @ part1
        y2_hat = y2 - to_u2 @ part2

        s1 = to_u1 @ part2
        s2_part = to_u2 @ part1
        sig1 += float(np.sum(np.abs(s1) ** 2))
        noise1 += float(np.sum(np.abs(y1_hat - s1) ** 2))
        sig2 += float(np.sum(np.abs(s2_part) ** 2))
        noise2 += float(np.sum(np.abs(y2_hat - s2_part) ** 2))
        done += m
    return SnrPair(sig1 / noise1, sig2 / noise2)


def _sum_snr(alpha: float, beta: float, ch: ChannelState, pt: float) -> float:
    g1, g2 = snr_arrays(alpha * beta * pt, (1 - alpha) * beta * pt, (1 - beta) * pt,
                        ch.norm1_sq, ch.norm2_sq, ch.sigma2)
    return float(g1 + g2)


def stationarity_check(ch: ChannelState, pt: float, h: float = 1e-6) -> tuple[float, float]:
    """Central differences of ``g1 + g2`` in ``alpha`` and ``beta`` at the max-min point."""
    alpha = common_rate_alpha(effective_gains(ch, pt))
    beta = 0.5
    d_alpha = (_sum_snr(alpha + h, beta, ch, pt) - _sum_snr(alpha - h, beta, ch, pt)) / (2 * h)
    d_beta = (_sum_snr(alpha, beta + h, ch, pt) - _sum_snr(alpha, beta - h, ch, pt)) / (2 * h)
    return d_alpha, d_beta


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``RATEOPT_THREADS``, 0 meaning all cores."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "0") or 0)
    if threads < 0:
        raise ValueError("thread count must be nonnegative")
    return threads or (os.cpu_count() or 1)


def _trial_rates(model, pt, seed, policies, weights, step, prelog):
    ch = draw_channel(model, seed)
    rates = {}
    skewed = False
    if weights is None:
        if "closed-form" in policies:
            rates["closed-form"] = common_rate(snr_pair(common_rate_powers(ch, pt), ch), prelog)
        if "grid-search" in policies:
            res = grid_search(ch, pt, step)
            rates["grid-search"] = common_rate(res.best_snrs, prelog)
        if "upa" in policies:
            rates["upa"] = common_rate(snr_pair(upa_allocation(pt), ch), prelog)
    else:
        a1, a2 = weights
        if "closed-form" in policies:
            try:
                snrs = weighted_optimal_snrs(a1, a2, effective_gains(ch, pt))
            except WeightTooSkewed:
                # budget too small for the interior optimum: the heavier user takes all of K
                skewed = True
                k = snr_sum_budget(effective_gains(ch, pt))
                snrs = SnrPair(k, 0.0) if a1 >= a2 else SnrPair(0.0, k)
            rates["closed-form"] = weighted_sum_rate(snrs, a1, a2, prelog)
        if "grid-search" in policies:
            rates["grid-search"] = grid_search(ch, pt, step, weights, prelog).objective
        if "upa" in policies:
            rates["upa"] = weighted_sum_rate(snr_pair(upa_allocation(pt), ch), a1, a2, prelog)
    return rates, skewed


def monte_carlo_sweep(
    model: FadingModel,
    pt_grid: Sequence[float],
    trials: int,
    policies: Sequence[str] = POLICIES,
    master_seed: int = 0,
    weights: tuple[float, float] | None = None,
    step: float = 0.01,
    prelog: float = PRELOG,
    threads: int | None = None,
) -> SweepResult:
    """Mean rate and standard error per budget and policy over fresh channel draws.

    ``weights=None`` sweeps the common rate, otherwise the weighted sum-rate.
    Trials run on a thread pool; each trial's channel depends only on
    ``(master_seed, budget index, trial index)`` and the per-budget sums use
    ``math.fsum`` over results kept in trial order, so the output is identical
    for any worker count.
    """
    pt_grid = [float(p) for p in pt_grid]
    if not pt_grid:
        raise ValueError("pt_grid must not be empty")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    policies = tuple(policies)
    unknown = set(policies) - set(POLICIES)
    if unknown or not policies:
        raise ValueError(f"policies must be a nonempty subset of {POLICIES}, got {policies}")

    jobs = [(bi, ti) for bi in range(len(pt_grid)) for ti in range(trials)]

    def run(job):
        bi, ti = job
        return _trial_rates(model, pt_grid[bi], trial_seed(master_seed, bi, ti),
                            policies, weights, step, prelog)

    workers = resolve_threads(threads)
    if workers == 1:
        outcomes = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, jobs, chunksize=max(1, len(jobs) // (8 * workers))))

    means = {name: [] for name in policies}
    errs = {name: [] for name in policies}
    skewed = []
    for bi in range(len(pt_grid)):
        block = outcomes[bi * trials:(bi + 1) * trials]
        skewed.append(sum(1 for _, sk in block if sk))
        for name in policies:
            values = [rates[name] for rates, _ in block]
            mean = math.fsum(values) / trials
            if trials > 1:
                var = math.fsum((v - mean) ** 2 for v in values) / (trials - 1)
                err = math.sqrt(var / trials)
            else:
                err = 0.0
            means[name].append(mean)
            errs[name].append(err)
    return SweepResult(pt_grid, means, errs, trials, master_seed, weights, skewed)
