"""Acceptance gate: one test per criterion, each at its fixed tolerance.

Run ``pytest tests/test_acceptance.py`` (add ``-s`` to see sub-check lines);
the per-criterion PASS/FAIL lines are printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from rateopt.cli import cmd_sweep
from rateopt.config import ScenarioConfig
from rateopt.framework import (
    CostVector,
    SimplexBound,
    WeightVector,
    log_weighted_geometric_objective,
    simplex_region,
    solve_max_min,
    solve_weighted_product,
    theta_point,
)
from rateopt.oracle import (
    FadingModel,
    draw_channel,
    grid_search,
    monte_carlo_sweep,
    signal_snr_estimate,
    stationarity_check,
    sum_budget_via_grid,
)
from rateopt.relay import (
    ChannelState,
    PowerAllocation,
    SnrPair,
    effective_gains,
    recover_powers,
    snr_pair,
    snr_sum_budget,
    weighted_optimal_snrs,
    weighted_sum_rate,
)

from conftest import WORKED_POWERS

FIG_VAR1, FIG_VAR2, FIG_NOISE = 0.25, 1.0, 1.0
WEIGHTS = (2.0, 1.0)


def worked_channel():
    return ChannelState.from_gains(24.0, 96.0, 1.0, nr=100)


def random_scenarios(count=100, seed=2024):
    """Fading channels alternating nr in {16, 100}; budgets uniform in [5, 30] dB."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        model = FadingModel((16, 100)[i % 2], FIG_VAR1, FIG_VAR2, FIG_NOISE)
        out.append((draw_channel(model, 1000 + i), 10 ** (rng.uniform(5.0, 30.0) / 10)))
    return out


def test_criterion_1_worked_example(record_criterion):
    start = time.perf_counter()
    ch = worked_channel()
    snrs = weighted_optimal_snrs(2, 1, effective_gains(ch, 1.0))
    powers = recover_powers(snrs, ch, 1.0)
    elapsed = time.perf_counter() - start
    snr_ok = snrs.as_tuple() == pytest.approx((7.30, 3.15), abs=0.01)
    pow_err = max(abs(a - b) for a, b in zip(powers.as_tuple(), WORKED_POWERS))
    ok = snr_ok and pow_err <= 0.001 and elapsed < 1.0
    record_criterion(
        "1 worked example",
        ok,
        f"snrs=({snrs.gamma1:.4f}, {snrs.gamma2:.4f}) powers=({powers.p1:.4f}, {powers.p2:.4f}, "
        f"{powers.pr:.4f}) max|dP|={pow_err:.2e} t={elapsed:.3f}s",
    )
    assert ok


def _agreement(ch, pt, step, weights):
    """Objective gap and power distance (fraction of pt) between closed form and grid."""
    g = effective_gains(ch, pt)
    if weights is None:
        k = snr_sum_budget(g)
        target = SnrPair(k / 2, k / 2)
        closed_obj = k / 2
    else:
        target = weighted_optimal_snrs(*weights, g)
        closed_obj = weighted_sum_rate(target, *weights)
    recovered = recover_powers(target, ch, pt)
    grid = grid_search(ch, pt, step, weights)
    gap = grid.objective - closed_obj
    dist = max(abs(a - b) for a, b in zip(recovered.as_tuple(), grid.best_powers.as_tuple())) / pt
    return gap, dist


def test_criterion_2_grid_search_agreement(record_criterion):
    step = 0.001
    start = time.perf_counter()
    cases = [(worked_channel(), 1.0)] + random_scenarios()
    parts = {}
    for label, weights in (("common-rate", None), ("weighted", WEIGHTS)):
        gaps, dists = zip(*(_agreement(ch, pt, step, weights) for ch, pt in cases))
        obj_ok = max(gaps) <= 0.01
        n_far = sum(d > 2 * step for d in dists)
        parts[label] = (obj_ok, n_far, max(gaps), max(dists))
        print(f"  {label}: max(grid - closed)={max(gaps):.2e} (<= 0.01: {obj_ok}); "
              f"power distance > 2*step in {n_far}/{len(cases)} cases, max {max(dists):.2e}")
    elapsed = time.perf_counter() - start
    ok = all(p[0] and p[1] == 0 for p in parts.values()) and elapsed < 120
    detail = "; ".join(
        f"{k}: objective {'ok' if v[0] else 'FAIL'}, powers off-grid-tolerance {v[1]}/{len(cases)}"
        for k, v in parts.items()
    )
    record_criterion("2 grid-search agreement", ok, f"{detail}; t={elapsed:.1f}s")
    assert ok, detail


def test_criterion_3_sum_budget(record_criterion):
    rng = np.random.default_rng(77)
    worst_gap, worst_stat, ok = 0.0, 0.0, True
    for i in range(50):
        model = FadingModel((16, 100)[i % 2], FIG_VAR1, FIG_VAR2, FIG_NOISE)
        ch = draw_channel(model, 5000 + i)
        pt = 10 ** (rng.uniform(0.0, 30.0) / 10)
        k = snr_sum_budget(effective_gains(ch, pt))
        grid_k = sum_budget_via_grid(ch, pt, 0.001)
        da, db = stationarity_check(ch, pt)
        worst_gap = max(worst_gap, k - grid_k)
        worst_stat = max(worst_stat, abs(da) / k, abs(db) / k)
        ok &= (k - 0.01 <= grid_k <= k) and abs(da) <= 1e-4 * k and abs(db) <= 1e-4 * k
    record_criterion("3 sum-SNR budget", ok,
                     f"max K - grid={worst_gap:.2e}, max |grad|/K={worst_stat:.2e}")
    assert ok


def test_criterion_4_optimality_properties(record_criterion):
    rng = np.random.default_rng(4)
    n_inst = 10_000
    dominance_ok = amgm_ok = minbound_ok = True
    for _ in range(n_inst):
        n = int(rng.integers(1, 7))
        a = WeightVector(rng.uniform(0.01, 10.0, n))
        bnd = SimplexBound(CostVector(rng.uniform(0.01, 10.0, n)), float(rng.uniform(0.01, 100.0)))
        w = rng.dirichlet(np.ones(n + 1))[:n]
        x = np.maximum(w * bnd.k / np.array(bnd.b.b), 1e-300)
        region = simplex_region(bnd)

        theta = theta_point(a, bnd)
        ratios = [bi * t / ai for ai, bi, t in zip(a.a, bnd.b.b, theta)]
        amgm_ok &= (max(ratios) - min(ratios) <= 1e-9 * max(ratios)
                    and abs(bnd.weighted_sum(theta) - bnd.k) <= 1e-9 * bnd.k)
        best = solve_weighted_product(region, a).log_objective
        dominance_ok &= log_weighted_geometric_objective(x, a) <= best + math.log1p(1e-9)
        minbound_ok &= min(x) <= solve_max_min(region).objective + 1e-12

    equal_weight_ok = True
    for gmax in [0.5, 1.0, 3.0, 7.3, 41.0, 1234.5]:
        shifted = simplex_region(SimplexBound(CostVector((1, 1)), 2 + 2 * gmax))
        wp = solve_weighted_product(shifted, WeightVector((1, 1)))
        # common rate in unshifted SNR variables: the same region reads g1 + g2 <= 2 gmax
        mm = solve_max_min(simplex_region(SimplexBound(CostVector((1, 1)), 2 * gmax)))
        mm_shift = solve_max_min(shifted)
        equal_weight_ok &= wp.point == (1 + gmax, 1 + gmax) and mm.point == (gmax, gmax)
        equal_weight_ok &= mm_shift.point == (1 + gmax, 1 + gmax)

    ok = dominance_ok and amgm_ok and minbound_ok and equal_weight_ok
    record_criterion("4 optimality properties", ok,
                     f"{n_inst} instances: dominance={dominance_ok} amgm={amgm_ok} min-bound={minbound_ok}; "
                     f"equal-weight={equal_weight_ok}")
    assert ok


def test_criterion_5_signal_level(record_criterion):
    ch = worked_channel()
    p = PowerAllocation(*WORKED_POWERS, 1.0)
    start = time.perf_counter()
    est = signal_snr_estimate(p, ch, 100_000, seed=2024)
    elapsed = time.perf_counter() - start
    ref = snr_pair(p, ch)
    rel = [abs(e / r - 1) for e, r in zip(est.as_tuple(), ref.as_tuple())]
    ok = max(rel) <= 0.02 and elapsed < 30
    record_criterion("5 signal-level validation", ok,
                     f"empirical=({est.gamma1:.4f}, {est.gamma2:.4f}) formula=({ref.gamma1:.4f}, "
                     f"{ref.gamma2:.4f}) max rel err={max(rel):.2e} t={elapsed:.1f}s")
    assert ok


PT_DB = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]


def test_criterion_6_sweep_trends(record_criterion):
    start = time.perf_counter()
    pt = [10 ** (d / 10) for d in PT_DB]
    failures = []
    for label, weights in (("common-rate", None), ("weighted", WEIGHTS)):
        res = {
            nr: monte_carlo_sweep(FadingModel(nr, FIG_VAR1, FIG_VAR2, FIG_NOISE), pt, 2000,
                                  master_seed=606, weights=weights, step=0.01)
            for nr in (16, 100)
        }
        for nr, r in res.items():
            for pol, means in r.mean_rates.items():
                if not all(b > a for a, b in zip(means, means[1:])):
                    failures.append(f"{label} nr={nr} {pol} not increasing")
            cf, up, gs = (r.mean_rates[k] for k in ("closed-form", "upa", "grid-search"))
            se_cf, se_gs = r.stderrs["closed-form"], r.stderrs["grid-search"]
            for i in range(len(pt)):
                if cf[i] < up[i]:
                    failures.append(f"{label} nr={nr} closed-form < UPA at {PT_DB[i]} dB")
                if abs(cf[i] - gs[i]) > 2 * math.hypot(se_cf[i], se_gs[i]):
                    failures.append(f"{label} nr={nr} closed-form vs grid at {PT_DB[i]} dB")
        for pol in res[16].mean_rates:
            for i in range(len(pt)):
                gap = res[100].mean_rates[pol][i] - res[16].mean_rates[pol][i]
                se = math.hypot(res[100].stderrs[pol][i], res[16].stderrs[pol][i])
                if gap <= 3 * se:
                    failures.append(f"{label} {pol} nr=100 not above nr=16 at {PT_DB[i]} dB")
        print(f"  {label}: closed-form nr=16 {np.round(res[16].mean_rates['closed-form'], 3)}, "
              f"nr=100 {np.round(res[100].mean_rates['closed-form'], 3)}; "
              f"skewed trials {res[16].skewed}/{res[100].skewed}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 600
    record_criterion("6 sweep-level trends", ok,
                     f"{len(failures)} violations, t={elapsed:.1f}s" + (f": {failures[:3]}" if failures else ""))
    assert ok, failures


def test_criterion_7_determinism(record_criterion, monkeypatch):
    ok = True
    for mode in ("common-rate", "weighted-sum"):
        cfg = ScenarioConfig(mode=mode, nr=16, var1=FIG_VAR1, var2=FIG_VAR2, trials=150, step=0.01,
                             seed=99, pt_db_grid=[0.0, 10.0, 20.0]).validate()
        bodies = {cmd_sweep(cfg, threads=t) for t in (1, 2, 4, 8)}
        monkeypatch.setenv("RATEOPT_THREADS", "3")
        bodies.add(cmd_sweep(cfg))
        ok &= len(bodies) == 1
    record_criterion("7 determinism", ok, "sweep CSV identical for 1/2/3/4/8 threads in both modes")
    assert ok
