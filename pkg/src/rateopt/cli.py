"""Command-line front end: ``rateopt solve | verify | sweep``.

Exit statuses: 0 success, 2 configuration error, 3 weights too skewed,
4 target SNRs unachievable, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field

from .config import ConfigError, ScenarioConfig
from .framework import solve_max_min, solve_weighted_product, WeightVector
from .oracle import grid_search, monte_carlo_sweep
from .relay import (
    Unachievable,
    WeightTooSkewed,
    common_rate,
    common_rate_powers,
    effective_gains,
    recover_powers,
    relay_feasible_region,
    snr_pair,
    snr_sum_budget,
    weighted_optimal_snrs,
    weighted_sum_rate,
    SnrPair,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SKEWED = 3
EXIT_UNACHIEVABLE = 4
EXIT_VERIFY_FAIL = 5

CSV_COLUMNS = ("pt_db", "policy", "mean_rate", "stderr", "trials", "seed")


@dataclass
class RunReport:
    config: dict
    closed_form: dict
    oracle: dict | None = None
    deltas: dict | None = None
    feasible: dict = field(default_factory=dict)
    status: str = "OK"
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "config": self.config,
            "closed_form": self.closed_form,
            "feasible": self.feasible,
            "status": self.status,
            "timings": self.timings,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle
            out["deltas"] = self.deltas
        return out


def _rate(snrs: SnrPair, config: ScenarioConfig) -> float:
    if config.mode == "common-rate":
        return common_rate(snrs, config.prelog)
    return weighted_sum_rate(snrs, config.a1, config.a2, config.prelog)


def _powers_dict(p):
    return {"p1": p.p1, "p2": p.p2, "pr": p.pr, "pt": p.pt}


def _closed_form(config: ScenarioConfig, ch, pt):
    """Closed-form powers and SNRs for the configured mode."""
    if config.mode == "common-rate":
        powers = common_rate_powers(ch, pt)
        snrs = snr_pair(powers, ch)
    else:
        snrs = weighted_optimal_snrs(config.a1, config.a2, effective_gains(ch, pt))
        powers = recover_powers(snrs, ch, pt)
    return powers, snrs


def cmd_solve(config: ScenarioConfig) -> RunReport:
    """Closed-form solution for one scenario.

    ``framework`` mode runs the generic solvers on the relay SNR region: the
    weighted product on the shifted region ``(1 + g1, 1 + g2)`` and max-min on
    the unshifted one, each with its membership check.
    """
    config.validate()
    start = time.perf_counter()
    ch = config.channel()
    pt = config.total_power
    k = snr_sum_budget(effective_gains(ch, pt))
    report = RunReport(config=config.to_dict(), closed_form={"budget": k})

    if config.mode == "framework":
        shifted = relay_feasible_region(ch, pt, shifted=True)
        wsr = solve_weighted_product(shifted, WeightVector((config.a1, config.a2)))
        snrs = SnrPair(*(max(x - 1.0, 0.0) for x in wsr.point))
        mm = solve_max_min(relay_feasible_region(ch, pt))
        report.closed_form.update(
            weighted_product={
                "point": list(wsr.point),
                "log_objective": wsr.log_objective,
                "snrs": list(snrs.as_tuple()),
                "rate": weighted_sum_rate(snrs, config.a1, config.a2, config.prelog),
            },
            max_min={
                "point": list(mm.point),
                "objective": mm.objective,
                "rate": common_rate(SnrPair(*mm.point), config.prelog),
            },
        )
        report.feasible = {"weighted_product": wsr.feasible, "max_min": mm.feasible}
    else:
        powers, snrs = _closed_form(config, ch, pt)
        report.closed_form.update(
            powers=_powers_dict(powers),
            snrs=list(snrs.as_tuple()),
            achieved_snrs=list(snr_pair(powers, ch).as_tuple()),
            rate=_rate(snrs, config),
        )
        report.feasible = {"closed_form": True}
    report.timings["total_s"] = time.perf_counter() - start
    return report


def verify_tolerance(objective: float, step: float) -> float:
    return max(1e-6, max(1.0, abs(objective)) * step)


def cmd_verify(config: ScenarioConfig, corrupt: float = 0.0) -> RunReport:
    """Closed form against the ``(alpha, beta)`` grid search at ``config.step``.

    The objective is ``min(g1, g2)`` in common-rate mode and the weighted
    sum-rate otherwise.  ``corrupt`` is subtracted from the closed-form
    objective; it exists so tests can exercise the FAIL path.
    """
    config.validate()
    if config.mode == "framework":
        raise ConfigError({"mode": "verify supports common-rate and weighted-sum"})
    ch = config.channel()
    pt = config.total_power

    t0 = time.perf_counter()
    powers, snrs = _closed_form(config, ch, pt)
    t1 = time.perf_counter()
    grid = grid_search(ch, pt, config.step, config.weights, config.prelog)
    t2 = time.perf_counter()

    if config.mode == "common-rate":
        cf_obj = min(snrs.as_tuple())
    else:
        cf_obj = _rate(snrs, config)
    cf_obj -= corrupt
    tol = verify_tolerance(grid.objective, config.step)
    passed = cf_obj >= grid.objective - tol

    closed = {
        "powers": _powers_dict(powers),
        "snrs": list(snrs.as_tuple()),
        "rate": _rate(snrs, config),
        "objective": cf_obj,
    }
    oracle = {
        "alpha": grid.best_alpha,
        "beta": grid.best_beta,
        "powers": _powers_dict(grid.best_powers),
        "snrs": list(grid.best_snrs.as_tuple()),
        "rate": _rate(grid.best_snrs, config),
        "objective": grid.objective,
        "step": grid.step,
    }
    deltas = {
        "objective": cf_obj - grid.objective,
        "rate": closed["rate"] - oracle["rate"],
        "snrs": [a - b for a, b in zip(closed["snrs"], oracle["snrs"])],
        "powers": {k: closed["powers"][k] - oracle["powers"][k] for k in ("p1", "p2", "pr")},
        "tolerance": tol,
    }
    return RunReport(
        config=config.to_dict(),
        closed_form=closed,
        oracle=oracle,
        deltas=deltas,
        feasible={"closed_form": True},
        status="PASS" if passed else "FAIL",
        timings={"closed_form_s": t1 - t0, "grid_search_s": t2 - t1},
    )


def cmd_sweep(config: ScenarioConfig, pt_db_grid=None, threads: int | None = None) -> str:
    """Monte Carlo sweep rendered as CSV text (one row per budget and policy)."""
    config.validate()
    if config.mode == "framework":
        raise ConfigError({"mode": "sweep supports common-rate and weighted-sum"})
    grid_db = list(config.pt_db_grid if pt_db_grid is None else pt_db_grid)
    if not grid_db:
        raise ConfigError({"pt_db_grid": "must not be empty"})
    result = monte_carlo_sweep(
        config.fading_model(),
        [10.0 ** (db / 10.0) for db in grid_db],
        config.trials,
        config.policies,
        config.seed,
        config.weights,
        config.step,
        config.prelog,
        threads,
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i, db in enumerate(grid_db):
        for policy in config.policies:
            writer.writerow([
                f"{db:.9g}",
                policy,
                f"{result.mean_rates[policy][i]:.9g}",
                f"{result.stderrs[policy][i]:.9g}",
                result.trials,
                result.seed,
            ])
    if any(result.skewed):
        print(
            f"note: weighted closed form fell back to the budget corner in "
            f"{sum(result.skewed)} trial(s)",
            file=sys.stderr,
        )
    return buf.getvalue()


# -- argument handling ------------------------------------------------------

_OVERRIDES = {
    "mode": str, "a1": float, "a2": float, "gamma1r": float, "gamma2r": float,
    "nr": int, "var1": float, "var2": float, "sigma2": float, "step": float,
    "trials": int, "seed": int, "prelog": float,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file")
    common.add_argument("--out", help="write output here instead of stdout")
    for name, typ in _OVERRIDES.items():
        common.add_argument("--" + name.replace("_", "-"), dest=name, type=typ)

    parser = argparse.ArgumentParser(
        prog="rateopt",
        description="Closed-form power allocation for a two-way MRC relay.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("solve", "closed-form solution (JSON report)"),
                            ("verify", "closed form vs grid search (JSON report)")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--pt-db", dest="pt_db", type=float)
    verify = sub.choices["verify"]
    verify.add_argument("--corrupt", type=float, default=0.0, help=argparse.SUPPRESS)
    sweep = sub.add_parser("sweep", parents=[common], help="Monte Carlo sweep (CSV)")
    sweep.add_argument("--pt-db", dest="pt_db_grid", type=float, nargs="+",
                       help="budgets in dB (default 0 to 30 in 5 dB steps)")
    sweep.add_argument("--policies", nargs="+", help="subset of closed-form grid-search upa")
    sweep.add_argument("--threads", type=int, help="worker threads (default: RATEOPT_THREADS)")
    return parser


def load_config(args) -> ScenarioConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError({"config": str(exc)}) from None
        data = ScenarioConfig.from_json(text).to_dict()
    for name in list(_OVERRIDES) + ["pt_db", "pt_db_grid", "policies"]:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if getattr(args, "pt_db", None) is not None:
        data.pop("pt", None)
    return ScenarioConfig.from_dict(data)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        if args.command == "solve":
            text = json.dumps(cmd_solve(config).to_dict(), indent=2) + "\n"
            status = EXIT_OK
        elif args.command == "verify":
            report = cmd_verify(config, corrupt=args.corrupt)
            text = json.dumps(report.to_dict(), indent=2) + "\n"
            status = EXIT_OK if report.status == "PASS" else EXIT_VERIFY_FAIL
        else:
            text = cmd_sweep(config, threads=args.threads)
            status = EXIT_OK
        _emit(text, args.out)
    except ConfigError as exc:
        for name, msg in exc.errors.items():
            print(f"config error: {name}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except WeightTooSkewed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SKEWED
    except Unachievable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNACHIEVABLE
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return status


if __name__ == "__main__":
    sys.exit(main())
