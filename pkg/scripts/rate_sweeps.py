#!/usr/bin/env python3
"""Monte Carlo rate-vs-budget sweeps for the common-rate and weighted sum-rate modes.

Writes one CSV per (mode, nr) into --out-dir and prints a compact table.  Channel
draws are random, so the meaningful checks are the trends:
nr = 100 above nr = 16, closed form matching grid search, both
above uniform allocation.
"""

import argparse
import csv
import io
from pathlib import Path

from rateopt.cli import cmd_sweep
from rateopt.config import ScenarioConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--step", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--pt-db", type=float, nargs="+", default=[0, 5, 10, 15, 20, 25, 30])
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for mode in ("common-rate", "weighted-sum"):
        for nr in (16, 100):
            cfg = ScenarioConfig(mode=mode, a1=2.0, a2=1.0, nr=nr, var1=0.25, var2=1.0, sigma2=1.0,
                                 trials=args.trials, step=args.step, seed=args.seed,
                                 pt_db_grid=list(args.pt_db)).validate()
            text = cmd_sweep(cfg)
            path = out_dir / f"{mode}_nr{nr}.csv"
            path.write_text(text)
            print(f"\n{mode}, nr={nr}  ->  {path}")
            rows = list(csv.DictReader(io.StringIO(text)))
            for db in dict.fromkeys(r["pt_db"] for r in rows):
                cells = "  ".join(
                    f"{r['policy']:>11} {float(r['mean_rate']):7.4f} +- {float(r['stderr']):.4f}"
                    for r in rows if r["pt_db"] == db
                )
                print(f"  {db:>4} dB  {cells}")


if __name__ == "__main__":
    main()
