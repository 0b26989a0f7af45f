#!/usr/bin/env python3
"""Reproduce the two-user worked example: a = (2, 1), gamma1r = 24, gamma2r = 96, Pt = 1."""

from rateopt.oracle import grid_search, signal_snr_estimate
from rateopt.relay import (
    ChannelState,
    common_rate,
    common_rate_powers,
    effective_gains,
    recover_powers,
    snr_pair,
    snr_sum_budget,
    weighted_optimal_snrs,
    weighted_sum_rate,
)


def main():
    ch = ChannelState.from_gains(24.0, 96.0, 1.0, nr=100)
    pt = 1.0
    g = effective_gains(ch, pt)
    k = snr_sum_budget(g)
    print(f"sum-SNR budget K = {k:.6f}")

    print("\ncommon rate")
    p = common_rate_powers(ch, pt)
    s = snr_pair(p, ch)
    grid = grid_search(ch, pt, 0.001)
    print(f"  closed form  P = ({p.p1:.5f}, {p.p2:.5f}, {p.pr:.5f})  snr = ({s.gamma1:.4f}, {s.gamma2:.4f})"
          f"  rate = {common_rate(s):.4f}")
    q = grid.best_powers
    print(f"  grid 0.001   P = ({q.p1:.5f}, {q.p2:.5f}, {q.pr:.5f})  min snr = {grid.objective:.4f}")

    print("\nweighted sum-rate, a = (2, 1)")
    s = weighted_optimal_snrs(2, 1, g)
    p = recover_powers(s, ch, pt)
    grid = grid_search(ch, pt, 0.001, weights=(2, 1))
    print(f"  closed form  snr = ({s.gamma1:.4f}, {s.gamma2:.4f})  rate = {weighted_sum_rate(s, 2, 1):.5f}")
    print(f"  recovered    P = ({p.p1:.4f}, {p.p2:.4f}, {p.pr:.4f})   [reference: 0.1996, 0.2362, 0.5642]")
    q = grid.best_powers
    print(f"  grid 0.001   P = ({q.p1:.4f}, {q.p2:.4f}, {q.pr:.4f})  rate = {grid.objective:.5f}")
    est = signal_snr_estimate(p, ch, 100_000, seed=1)
    print(f"  symbol-level simulation snr = ({est.gamma1:.4f}, {est.gamma2:.4f})")


if __name__ == "__main__":
    main()
